//! Sample the two-sided saddle structure of the auxiliary functional around
//! a computed solution: along the λ-axis the solution row is a maximum at
//! the center; across random perturbations of u it is a minimum.
//!
//! ```text
//! cargo run --example saddle_probe
//! ```

use kirchhoff::fixpoint::{saddle_probe, solve_auto, SolveOptions};
use kirchhoff::grid::{build_operators, DomainSpec};
use kirchhoff::kfun::KirchhoffBranch;
use kirchhoff::sublinear::{Coefficient, Nonlinearity};
use rand::SeedableRng;

fn main() -> kirchhoff::Result<()> {
    let spec = DomainSpec::Interval {
        length: 1.0,
        resolution: 127,
    };
    let op = build_operators(spec)?;
    let coeff = Coefficient::constant(spec, 1.0)?;
    let f = Nonlinearity::power(0.5)?;
    let branch = KirchhoffBranch::log();
    let sol = solve_auto(&op, &coeff, &f, &branch, SolveOptions::default())?;
    println!(
        "solution on branch {}: t̃ = {:.9}, λ̃ = {:.9}",
        branch.label(),
        sol.t_tilde,
        sol.lam_tilde
    );

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let probe = saddle_probe(&sol, &op, &coeff, &f, &mut rng, 9, 12)?;

    println!(
        "\nprobe grid: {} λ-samples over [λ̃/4, 4λ̃] × {} perturbed functions",
        probe.lam_samples.len(),
        probe.u_labels.len(),
    );
    println!("rows = functions, columns = λ; the solution sits at ({}, {}).",
        probe.center_row, probe.center_col);
    println!(
        "sup over the center row   : worst margin {:.3e} ≤ ε = {:.3e}",
        probe.worst_sup_margin, probe.eps
    );
    println!(
        "inf over the center column: worst margin {:.3e} ≤ ε",
        probe.worst_inf_margin
    );

    // A slice of the λ-row through the solution: the center value dominates.
    println!("\nauxiliary value along the solution's row:");
    for (j, lam) in probe.lam_samples.iter().enumerate() {
        let v = probe.phi_values[probe.center_row][j];
        let marker = if j == probe.center_col { "  <- λ̃" } else { "" };
        println!("  λ = {lam:>12.6} : {v:>16.9e}{marker}");
    }
    Ok(())
}
