//! The discrete Laplacian on its own: a Poisson solve against a closed-form
//! solution, and a convergence table for the principal eigenvalue.
//!
//! ```text
//! cargo run --example poisson_grid
//! ```

use kirchhoff::grid::{build_operators, DomainSpec, GridFunction};

fn main() -> kirchhoff::Result<()> {
    // -u'' = 1 on (0, 1): the exact solution x(1-x)/2 is quadratic, so the
    // three-point stencil reproduces it to rounding at any resolution.
    let spec = DomainSpec::Interval {
        length: 1.0,
        resolution: 63,
    };
    let op = build_operators(spec)?;
    let rhs = GridFunction::constant(spec, 1.0);
    let u = op.solve_spd(&rhs, 1e-12)?;
    let exact = GridFunction::sample(spec, |x, _| 0.5 * x * (1.0 - x));
    println!(
        "Poisson, constant load:   max |u - exact| = {:.3e}",
        u.values()
            .iter()
            .zip(exact.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max)
    );

    // -u'' = sin(pi x) has solution sin(pi x)/pi^2 and a genuine O(h^2)
    // discretization error — the classical second-order convergence.
    println!("\nPoisson, sine load, against sin(pi x)/pi^2:");
    println!("{:>6} {:>12} {:>8}", "n", "max error", "order");
    let mut prev: Option<f64> = None;
    for resolution in [31, 63, 127, 255] {
        let spec = DomainSpec::Interval {
            length: 1.0,
            resolution,
        };
        let op = build_operators(spec)?;
        let load = GridFunction::sample(spec, |x, _| (std::f64::consts::PI * x).sin());
        let u = op.solve_spd(&load, 1e-13)?;
        let pi2 = std::f64::consts::PI.powi(2);
        let err = u
            .values()
            .iter()
            .zip(load.values())
            .map(|(a, b)| (a - b / pi2).abs())
            .fold(0.0f64, f64::max);
        let order = prev.map(|p: f64| (p / err).log2());
        match order {
            Some(o) => println!("{resolution:>6} {err:>12.4e} {o:>8.3}"),
            None => println!("{resolution:>6} {err:>12.4e} {:>8}", "-"),
        }
        prev = Some(err);
    }

    // The smallest eigenvalue of the stiffness/mass pencil approaches pi^2
    // (interval) at the same second-order rate.
    println!("\nPrincipal eigenvalue vs pi^2 = {:.9}:", std::f64::consts::PI.powi(2));
    println!("{:>6} {:>16} {:>12}", "n", "lambda_1(h)", "defect");
    for resolution in [31, 63, 127, 255] {
        let spec = DomainSpec::Interval {
            length: 1.0,
            resolution,
        };
        let op = build_operators(spec)?;
        let (lam, mode) = op.principal_eigenvalue(1e-12)?;
        let defect = lam - spec.lambda1_continuum();
        println!("{resolution:>6} {lam:>16.10} {defect:>12.3e}");
        assert!(mode.min() > 0.0, "ground mode must be one-signed");
    }
    Ok(())
}
