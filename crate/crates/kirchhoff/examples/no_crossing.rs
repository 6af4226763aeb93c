//! A branch whose values sit far above the admissible window: the crossing
//! function never changes sign, and the solver refuses with a diagnostic
//! instead of silently returning a wrong root.
//!
//! ```text
//! cargo run --example no_crossing
//! ```

use kirchhoff::fixpoint::{solve_lambda_bisect, SolveOptions};
use kirchhoff::grid::{build_operators, DomainSpec};
use kirchhoff::kfun::KirchhoffBranch;
use kirchhoff::sublinear::{Coefficient, Nonlinearity};
use kirchhoff::Error;

fn main() -> kirchhoff::Result<()> {
    let spec = DomainSpec::Interval {
        length: 1.0,
        resolution: 63,
    };
    let op = build_operators(spec)?;
    let coeff = Coefficient::constant(spec, 1.0)?;
    let f = Nonlinearity::power(0.5)?;

    // (c - t)^{-1/2} with c = 1e-20: increasing on (0, c), but its smallest
    // value is c^{-1/2} = 1e10 — every branch value lies above the λ-window.
    let branch = KirchhoffBranch::singular_power(1e-20, 0.5)?;
    let rep = branch.validate(64)?;
    println!(
        "branch {}: monotone {}, positive {}, range low {:.3e}",
        branch.label(),
        rep.monotone_ok,
        rep.positive_ok,
        rep.range_low
    );
    println!("the branch is perfectly usable — it just lives in the wrong place.\n");

    match solve_lambda_bisect(&op, &coeff, &f, &branch, SolveOptions::default()) {
        Ok(sol) => unreachable!("unexpected crossing at t̃ = {}", sol.t_tilde),
        Err(Error::NoCrossing { reason }) => {
            println!("solver refused, as it must:\n  {reason}");
            println!("\n(the CLI maps this class to exit code 3)");
        }
        Err(other) => return Err(other),
    }
    Ok(())
}
