//! One solve per branch of a multi-branch K, tabulating the invariant
//! column `K(t̃)^{2/(1-q)}·t̃`: it must equal Φ(u₁) on every branch, so the
//! branches differ only in *where* the energy lands, never in the data.
//!
//! ```text
//! cargo run --example branch_survey
//! ```

use kirchhoff::fixpoint::SolveOptions;
use kirchhoff::grid::{build_operators, DomainSpec};
use kirchhoff::kfun::KirchhoffBranch;
use kirchhoff::sublinear::{Coefficient, Nonlinearity};
use kirchhoff::verify::{cross_branch_survey, survey_to_csv};

fn main() -> kirchhoff::Result<()> {
    let spec = DomainSpec::Interval {
        length: 1.0,
        resolution: 127,
    };
    let op = build_operators(spec)?;
    let coeff = Coefficient::constant(spec, 1.0)?;
    let f = Nonlinearity::power(0.5)?;
    let branches = vec![
        KirchhoffBranch::tan(1)?,
        KirchhoffBranch::tan(2)?,
        KirchhoffBranch::tan(3)?,
        KirchhoffBranch::log(),
        KirchhoffBranch::affine(1.0, 0.0)?,
    ];
    let (lambda1, _) = op.principal_eigenvalue(1e-10)?;

    let report = cross_branch_survey(&op, &coeff, &f, &branches, lambda1, SolveOptions::default())?;

    println!(
        "{:<16} {:>14} {:>14} {:>16} {:>8}",
        "branch", "t̃", "λ̃", "K(t̃)^4·t̃", "status"
    );
    for row in &report.rows {
        match (row.t_tilde, row.lam_tilde, row.apriori_lhs) {
            (Some(t), Some(l), Some(lhs)) => println!(
                "{:<16} {t:>14.9} {l:>14.9} {lhs:>16.12} {:>8}",
                row.branch, row.status
            ),
            _ => println!("{:<16} {:>56}", row.branch, row.status),
        }
    }
    println!("\nΦ(u₁)              = {:.12e}", report.base_phi);
    println!("invariant spread   = {:.3e}", report.invariance_spread);
    println!("deviation from Φ   = {:.3e}", report.max_deviation_from_base);
    println!(
        "distinct energies  = {} (one solution per branch, all different)",
        report.distinct_ok
    );
    assert!(report.invariance_ok && report.distinct_ok);

    // The same table the CLI writes as survey.csv:
    println!("\n--- survey.csv ---\n{}", survey_to_csv(&report));
    Ok(())
}
