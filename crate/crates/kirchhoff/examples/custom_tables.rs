//! User-supplied data end to end: both the Kirchhoff branch and the
//! nonlinearity given as sample tables. Tables force the generic λ-bisection
//! (no power structure to exploit), which is exactly the point.
//!
//! ```text
//! cargo run --example custom_tables
//! ```

use kirchhoff::fixpoint::{solve_auto, solve_lambda_bisect, SolveOptions};
use kirchhoff::grid::{build_operators, DomainSpec};
use kirchhoff::kfun::KirchhoffBranch;
use kirchhoff::sublinear::{Coefficient, Nonlinearity};

fn main() -> kirchhoff::Result<()> {
    let spec = DomainSpec::Interval {
        length: 1.0,
        resolution: 127,
    };
    let op = build_operators(spec)?;
    let coeff = Coefficient::constant(spec, 1.0)?;

    // A tabulated branch: samples of 0.05 + t²/4 on (0, 3]. Any strictly
    // increasing positive table works; evaluation interpolates linearly.
    let ts: Vec<f64> = (1..=60).map(|i| 0.05 * i as f64).collect();
    let ks: Vec<f64> = ts.iter().map(|t| 0.05 + 0.25 * t * t).collect();
    let branch = KirchhoffBranch::table(ts, ks)?;
    let rep = branch.validate(64)?;
    println!(
        "tabulated branch {}: usable = {}, range [{:.4}, {:.4}]",
        branch.label(),
        rep.is_usable(),
        rep.range_low,
        rep.range_high
    );

    // A tabulated nonlinearity: dense samples of √ξ with its primitive
    // (supplying the primitive keeps the energy checks trapezoid-free).
    let xs: Vec<f64> = (0..=400).map(|i| 0.01 * i as f64).collect();
    let fs: Vec<f64> = xs.iter().map(|x| x.sqrt()).collect();
    let prims: Vec<f64> = xs.iter().map(|x| x.powf(1.5) / 1.5).collect();
    let f_table = Nonlinearity::table(xs, fs, Some(prims))?;
    println!("tabulated nonlinearity {}: usable = {}\n", f_table.label(), f_table.validate(64)?.is_usable());

    // solve_auto sees no power structure and takes the λ-bisection.
    let sol = solve_auto(&op, &coeff, &f_table, &branch, SolveOptions::default())?;
    println!("table f, table K:  t̃ = {:.9}, λ̃ = {:.9} ({:?} route)", sol.t_tilde, sol.lam_tilde, sol.route);

    // The table samples √ξ, so the genuine power should land close by —
    // the gap is interpolation error, not solver error.
    let f_power = Nonlinearity::power(0.5)?;
    let exact = solve_lambda_bisect(&op, &coeff, &f_power, &branch, SolveOptions::default())?;
    println!("power f, table K:  t̃ = {:.9}, λ̃ = {:.9}", exact.t_tilde, exact.lam_tilde);
    println!(
        "table-vs-power gap: {:.3e} (relative, in t̃)",
        (sol.t_tilde - exact.t_tilde).abs() / exact.t_tilde
    );
    Ok(())
}
