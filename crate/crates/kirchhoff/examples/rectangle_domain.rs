//! The same nonlocal solve on a 2D rectangle: the five-point Laplacian,
//! a non-constant coefficient, and the λ-bisection route (the power
//! shortcut works here too — the scaling argument is dimension-blind).
//!
//! ```text
//! cargo run --example rectangle_domain
//! ```

use kirchhoff::fixpoint::{solve_lambda_bisect, solve_t_equation, SolveOptions};
use kirchhoff::grid::{build_operators, DomainSpec};
use kirchhoff::kfun::KirchhoffBranch;
use kirchhoff::sublinear::{Coefficient, Nonlinearity};

fn main() -> kirchhoff::Result<()> {
    let spec = DomainSpec::Rectangle {
        width: 1.0,
        height: 1.0,
        nx: 47,
        ny: 47,
    };
    let op = build_operators(spec)?;
    let (lambda1, _) = op.principal_eigenvalue(1e-10)?;
    println!(
        "unit square, 47×47 interior nodes: λ₁(h) = {:.6} (continuum 2π² = {:.6})",
        lambda1,
        spec.lambda1_continuum()
    );

    // α(x, y) = 1 + x·y: positive, non-constant, nothing special.
    let alpha = kirchhoff::grid::GridFunction::sample(spec, |x, y| 1.0 + x * y);
    let coeff = Coefficient::from_values(alpha)?;
    let f = Nonlinearity::power(0.5)?;
    let branch = KirchhoffBranch::tan(1)?;

    let sol = solve_lambda_bisect(&op, &coeff, &f, &branch, SolveOptions::default())?;
    println!("\nbranch tan on (0, π/2), f(u) = u^1/2, α = 1 + xy:");
    println!("  t̃ = {:.10}, λ̃ = {:.10}", sol.t_tilde, sol.lam_tilde);
    println!("  0 < t̃ < π/2: {}", sol.t_tilde > 0.0 && sol.t_tilde < std::f64::consts::FRAC_PI_2);
    println!("  u ∈ [{:.4e}, {:.4e}]", sol.u.min(), sol.u.max());
    println!("  nonlocal residual {:.3e}", sol.kirchhoff_residual);

    let by_t = solve_t_equation(&op, &coeff, &f, &branch, SolveOptions::default())?;
    println!(
        "  t-equation route agrees to {:.3e} (relative)",
        (by_t.t_tilde - sol.t_tilde).abs() / sol.t_tilde
    );
    Ok(())
}
