//! Property-based checks of the solver invariants: randomized grids, data,
//! and branches must keep every structural identity intact, not just the
//! hand-picked cases of the unit tests.

use proptest::prelude::*;

use kirchhoff::fixpoint::{solve_lambda_bisect, solve_t_equation, SolveOptions};
use kirchhoff::grid::{build_operators, DomainSpec, GridFunction};
use kirchhoff::kfun::KirchhoffBranch;
use kirchhoff::sublinear::{
    frozen_energy, solve_frozen, solve_frozen_from, supersolution_start, Coefficient,
    Nonlinearity,
};

fn interval(res: usize) -> DomainSpec {
    DomainSpec::Interval {
        length: 1.0,
        resolution: res,
    }
}

/// Small odd grid sizes keep the solve cheap without degenerating.
fn res_strategy() -> impl Strategy<Value = usize> {
    prop_oneof![Just(15usize), Just(31), Just(47), Just(63)]
}

fn q_strategy() -> impl Strategy<Value = f64> {
    (0.15f64..0.85).prop_map(|q| (q * 100.0).round() / 100.0)
}

/// log-uniform λ over two decades around 1.
fn lambda_strategy() -> impl Strategy<Value = f64> {
    (-1.0f64..1.0).prop_map(|e| 10f64.powf(e))
}

/// Branches guaranteed to carry a crossing for the unit-interval problems
/// exercised here (their K sweeps all of (0, ∞)).
fn crossing_branch_strategy() -> impl Strategy<Value = KirchhoffBranch> {
    prop_oneof![
        (1u32..=3).prop_map(|k| KirchhoffBranch::tan(k).unwrap()),
        Just(KirchhoffBranch::log()),
        (0.5f64..2.0).prop_map(|a| KirchhoffBranch::affine(a, 0.0).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// The stiffness form is symmetric: (Au, v) = (u, Av).
    #[test]
    fn stiffness_form_is_symmetric(
        res in res_strategy(),
        seed_u in 0u64..1000,
        seed_v in 1000u64..2000,
    ) {
        let spec = interval(res);
        let op = build_operators(spec).unwrap();
        let wave = |seed: u64| {
            GridFunction::sample(spec, move |x, _| {
                let m = 1 + (seed % 5) as usize;
                (std::f64::consts::PI * m as f64 * x).sin() + 0.1 * (seed as f64).cos()
            })
        };
        let u = wave(seed_u);
        let v = wave(seed_v);
        let n = spec.node_count();
        let mut au = vec![0.0; n];
        let mut av = vec![0.0; n];
        op.apply_stiffness(u.values(), &mut au);
        op.apply_stiffness(v.values(), &mut av);
        let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
        let lhs = dot(&au, v.values());
        let rhs = dot(u.values(), &av);
        // The two pairings are orthogonal-ish, so the dot values cancel far
        // below their termwise magnitude; measure the gap against the latter.
        let scale: f64 = au
            .iter()
            .zip(v.values())
            .map(|(x, y)| (x * y).abs())
            .sum::<f64>()
            .max(1e-30);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "{lhs} vs {rhs}");
    }

    /// Branch inverses round-trip through K and are monotone in λ.
    #[test]
    fn branch_inverse_round_trips_and_is_monotone(
        branch in crossing_branch_strategy(),
        la in lambda_strategy(),
        lb in lambda_strategy(),
    ) {
        let ta = branch.inverse(la, 1e-12).unwrap();
        let ka = branch.eval(ta).unwrap();
        prop_assert!(
            (ka - la).abs() <= 1e-9 * la.max(1.0),
            "K(K⁻¹({la})) = {ka} on {}",
            branch.label()
        );
        let tb = branch.inverse(lb, 1e-12).unwrap();
        if la < lb {
            prop_assert!(ta <= tb, "inverse not monotone: t({la}) = {ta} > t({lb}) = {tb}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The frozen solve returns a strictly positive function whose energy
    /// decreases when λ grows, and any admissible start lands on the same
    /// solution.
    #[test]
    fn frozen_solution_is_positive_unique_and_lambda_monotone(
        res in res_strategy(),
        q in q_strategy(),
        lam in lambda_strategy(),
        factor in 1.5f64..6.0,
    ) {
        let spec = interval(res);
        let op = build_operators(spec).unwrap();
        let coeff = Coefficient::constant(spec, 1.0).unwrap();
        let f = Nonlinearity::power(q).unwrap();

        let sol = solve_frozen(&op, &coeff, &f, lam, 1e-10).unwrap();
        prop_assert!(sol.u.min() > 0.0, "minimum {}", sol.u.min());

        let mut start = supersolution_start(&op, &coeff, &f, lam).unwrap();
        for v in start.values_mut() {
            *v *= factor;
        }
        let again = solve_frozen_from(&op, &coeff, &f, lam, 1e-10, start).unwrap();
        let d = sol.u.rel_max_distance(&again.u);
        prop_assert!(d <= 1e-7, "restart distance {d}");

        let larger = solve_frozen(&op, &coeff, &f, lam * 1.5, 1e-10).unwrap();
        prop_assert!(
            larger.phi < sol.phi,
            "Φ must strictly decrease in λ: {} at λ = {lam} vs {} at λ = {}",
            sol.phi,
            larger.phi,
            lam * 1.5
        );
    }

    /// The frozen solution minimizes its energy along the scaling ray s·u.
    #[test]
    fn frozen_energy_is_minimal_along_the_ray(
        res in res_strategy(),
        q in q_strategy(),
        lam in lambda_strategy(),
        s in prop_oneof![0.2f64..0.9, 1.1f64..5.0],
    ) {
        let spec = interval(res);
        let op = build_operators(spec).unwrap();
        let coeff = Coefficient::constant(spec, 1.0).unwrap();
        let f = Nonlinearity::power(q).unwrap();
        let sol = solve_frozen(&op, &coeff, &f, lam, 1e-10).unwrap();
        let mut scaled = sol.u.clone();
        for v in scaled.values_mut() {
            *v *= s;
        }
        let e_scaled = frozen_energy(&op, &coeff, &f, lam, &scaled).unwrap();
        prop_assert!(
            e_scaled >= sol.energy - 1e-10 * (1.0 + sol.energy.abs()),
            "E({s}·u) = {e_scaled} undercuts E(u) = {}",
            sol.energy
        );
    }

    /// Fixed-point output invariants: t̃ strictly interior, λ̃ = K(t̃), u > 0,
    /// and the branch-independent combination K(t̃)^{2/(1−q)}·t̃ equals the
    /// λ=1 energy.
    #[test]
    fn fixed_point_localizes_and_carries_the_invariant(
        res in res_strategy(),
        branch in crossing_branch_strategy(),
    ) {
        let spec = interval(res);
        let op = build_operators(spec).unwrap();
        let coeff = Coefficient::constant(spec, 1.0).unwrap();
        let f = Nonlinearity::power(0.5).unwrap();
        let sol = solve_t_equation(&op, &coeff, &f, &branch, SolveOptions::default()).unwrap();

        let (lo, hi) = branch.interval();
        prop_assert!(sol.t_tilde > lo && sol.t_tilde < hi);
        let k_here = branch.eval(sol.t_tilde).unwrap();
        prop_assert!((k_here - sol.lam_tilde).abs() <= 1e-12 * sol.lam_tilde.max(1.0));
        prop_assert!(sol.u.min() > 0.0);

        let base = solve_frozen(&op, &coeff, &f, 1.0, 1e-10).unwrap();
        let invariant = sol.lam_tilde.powi(4) * sol.t_tilde;
        let rel = (invariant - base.phi).abs() / base.phi;
        prop_assert!(rel <= 1e-8, "invariant {invariant} vs Φ(u₁) {} (rel {rel})", base.phi);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Both engines find the same fixed point.
    #[test]
    fn routes_agree_on_random_branches(
        res in prop_oneof![Just(31usize), Just(63)],
        branch in crossing_branch_strategy(),
    ) {
        let spec = interval(res);
        let op = build_operators(spec).unwrap();
        let coeff = Coefficient::constant(spec, 1.0).unwrap();
        let f = Nonlinearity::power(0.5).unwrap();
        let a = solve_lambda_bisect(&op, &coeff, &f, &branch, SolveOptions::default()).unwrap();
        let b = solve_t_equation(&op, &coeff, &f, &branch, SolveOptions::default()).unwrap();
        let rel = (a.t_tilde - b.t_tilde).abs() / b.t_tilde;
        prop_assert!(rel <= 1e-6, "{}: {} vs {}", branch.label(), a.t_tilde, b.t_tilde);
    }
}

/// The computed t̃ converges at second order in the mesh width: refining the
/// grid must shrink the increments by ~4 per halving.
#[test]
fn t_tilde_converges_at_second_order() {
    let branch = KirchhoffBranch::tan(1).unwrap();
    let f = Nonlinearity::power(0.5).unwrap();
    let mut roots = Vec::new();
    for res in [31usize, 63, 127, 255] {
        let spec = interval(res);
        let op = build_operators(spec).unwrap();
        let coeff = Coefficient::constant(spec, 1.0).unwrap();
        let sol = solve_t_equation(&op, &coeff, &f, &branch, SolveOptions::default()).unwrap();
        roots.push(sol.t_tilde);
    }
    let d1 = (roots[0] - roots[1]).abs();
    let d2 = (roots[1] - roots[2]).abs();
    let d3 = (roots[2] - roots[3]).abs();
    for (a, b) in [(d1, d2), (d2, d3)] {
        let order = (a / b).log2();
        assert!(
            (1.5..=2.5).contains(&order),
            "observed order {order}; increments {d1:.3e}, {d2:.3e}, {d3:.3e}"
        );
    }
}
