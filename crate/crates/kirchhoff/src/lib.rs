//! Positive solutions of nonlocal Kirchhoff problems
//! `-K(∫|∇u|²) Δu = α(x) f(u)` on a prescribed monotone branch of `K`.
//!
//! The Kirchhoff coefficient couples the equation to the Dirichlet energy of
//! its own solution, so the problem is nonlocal — and when `K` jumps or has
//! several increasing branches, the solution is selected by *which branch*
//! the energy is required to land on. This crate computes that solution
//! constructively for sublinear right-hand sides:
//!
//! 1. freeze the coefficient at a scalar `λ` and solve the semilinear
//!    problem `-Δu = (1/λ) α f(u)` by a monotone supersolution iteration
//!    ([`sublinear`]) — its positive solution `u_λ` is unique;
//! 2. match the scalar to the branch through the fixed-point equation
//!    `K(Φ(u_λ)) = λ` ([`fixpoint`]), by two independent routes (generic
//!    λ-bisection, and an exact-rescaling shortcut for `f(ξ) = ξ^q`);
//! 3. verify every claimed property after the fact ([`verify`]): the
//!    a priori bound, energy minimization, positivity, localization of the
//!    energy inside the branch interval, and branch-independence of
//!    `K(t̃)^{2/(1-q)}·t̃`.
//!
//! Discretization is a finite-difference Laplacian on an interval or a
//! rectangle ([`grid`]); branches of `K` live in [`kfun`]; an independent
//! shooting-method oracle ([`shooting`]) cross-checks the 1D power case
//! end to end.
//!
//! # Example
//!
//! Solve with `f(ξ) = ξ^{1/2}`, `α ≡ 1` on `(0, 1)`, on the first branch of
//! `K = tan` — the energy of the solution is then confined to
//! `(0, π/2)`:
//!
//! ```
//! use kirchhoff::fixpoint::{solve_auto, SolveOptions};
//! use kirchhoff::grid::{build_operators, DomainSpec};
//! use kirchhoff::kfun::KirchhoffBranch;
//! use kirchhoff::sublinear::{Coefficient, Nonlinearity};
//!
//! let spec = DomainSpec::Interval { length: 1.0, resolution: 127 };
//! let op = build_operators(spec)?;
//! let coeff = Coefficient::constant(spec, 1.0)?;
//! let f = Nonlinearity::power(0.5)?;
//! let branch = KirchhoffBranch::tan(1)?;
//!
//! let sol = solve_auto(&op, &coeff, &f, &branch, SolveOptions::default())?;
//! assert!(sol.t_tilde > 0.0 && sol.t_tilde < std::f64::consts::FRAC_PI_2);
//! assert!((sol.branch.eval(sol.t_tilde)? - sol.lam_tilde).abs() < 1e-12);
//! assert!(sol.u.min() > 0.0);
//! # Ok::<(), kirchhoff::error::Error>(())
//! ```
//!
//! # Tour of the `examples/` directory
//!
//! Each example is runnable with `cargo run --example <name>`:
//!
//! * `poisson_grid` — the discrete Laplacian, a Poisson solve, and the
//!   principal eigenvalue with a convergence table.
//! * `branch_validation` — sampling diagnostics for every branch family.
//! * `frozen_solve` — the monotone iteration at fixed `λ`, with the exact
//!   scaling law as a cross-check.
//! * `kirchhoff_tan` — the headline solve above, both routes compared.
//! * `branch_survey` — one solve per branch, tabulating the invariant
//!   column `K(t̃)^{2/(1-q)}·t̃`.
//! * `shooting_oracle` — the independent ODE oracle vs the grid solver.
//! * `saddle_probe` — the two saddle inequalities sampled around a
//!   solution.
//! * `no_crossing` — a branch whose range sits above the admissible
//!   window, and the diagnostic it produces.
//! * `rectangle_domain` — the same solve on a 2D rectangle.
//! * `custom_tables` — user-supplied `K` and `f` given as sample tables.
//!
//! The command-line binary (`kirchhoff`) drives the same pipeline from a
//! TOML config: subcommands `run`, `oracle`, `survey`, `validate`. See
//! `docs/config.md` for the schema.

pub mod config;
pub mod error;
pub mod fixpoint;
pub mod grid;
pub mod kfun;
pub mod pipeline;
pub mod reference;
pub mod report;
pub mod shooting;
pub mod sublinear;
pub mod verify;

pub use error::{Error, Result};
