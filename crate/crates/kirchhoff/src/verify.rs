//! Post-hoc verification of everything the solved problem promises:
//! the a priori bound, the minimization property of the frozen functional,
//! positivity, localization, and branch-independence of the invariant
//! `K(t̃)^{2/(1-q)}·t̃` across a survey of branches.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixpoint::{solve_t_equation, KirchhoffSolution, SolveOptions};
use crate::grid::DiscreteLaplacian;
use crate::kfun::KirchhoffBranch;
use crate::sublinear::{
    frozen_energy, solve_frozen, solve_frozen_from, supersolution_start, Coefficient, Nonlinearity,
};

/// Both sides of the a priori inequality
/// `K(t̃)^{2/(1-q)}·t̃ ≤ [(2/(q+1))²·(ess sup α / λ₁)^{q+1}]^{1/(1-q)}·∫α`.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AprioriCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub ok: bool,
}

/// Evaluate the a priori inequality for a power nonlinearity.
///
/// `lambda1` should be the principal eigenvalue of the same grid, keeping
/// the inequality self-consistent at the discrete level (the continuum
/// value is reported separately by the caller).
pub fn check_apriori(
    sol: &KirchhoffSolution,
    coeff: &Coefficient,
    q: f64,
    lambda1: f64,
) -> Result<AprioriCheck> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidInput(format!(
            "a priori bound needs q in (0, 1), got {q}"
        )));
    }
    if !(lambda1 > 0.0 && lambda1.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "a priori bound needs lambda1 > 0, got {lambda1}"
        )));
    }
    let lhs = sol.lam_tilde.powf(2.0 / (1.0 - q)) * sol.t_tilde;
    let inner = (2.0 / (q + 1.0)).powi(2) * (coeff.ess_sup() / lambda1).powf(q + 1.0);
    let rhs = inner.powf(1.0 / (1.0 - q)) * coeff.integral();
    Ok(AprioriCheck {
        lhs,
        rhs,
        ratio: lhs / rhs,
        ok: lhs <= rhs * (1.0 + 1e-8),
    })
}

/// Multi-start minimization evidence for the frozen functional
/// `u ↦ ½ λ̃ Φ(u) − ½ J(u)` at `λ̃ = K(t̃)`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MinimizationCheck {
    pub ok: bool,
    /// All restarts land on the solution within the requested tolerance.
    pub agree_ok: bool,
    /// Every restart's functional value is strictly below 0 (the value at
    /// the zero function).
    pub below_zero_ok: bool,
    /// No sampled perturbation undercuts the solution beyond noise.
    pub perturbation_ok: bool,
    /// Worst relative max-norm distance of a restart from the solution.
    pub spread: f64,
    /// Functional value at the solution.
    pub value_at_solution: f64,
    /// `min_v value(v) − value(ũ)` over the sampled perturbations.
    pub worst_perturbation_margin: f64,
    pub n_starts: usize,
    pub n_perturbations: usize,
}

/// Re-minimize the frozen functional from `n_starts` random supersolution
/// scalings and probe `n_perturbations` random directions around the
/// solution.
#[allow(clippy::too_many_arguments)]
pub fn check_minimization(
    sol: &KirchhoffSolution,
    op: &DiscreteLaplacian,
    coeff: &Coefficient,
    f: &Nonlinearity,
    n_starts: usize,
    n_perturbations: usize,
    tol_spread: f64,
    rng: &mut impl Rng,
) -> Result<MinimizationCheck> {
    if n_starts < 5 {
        return Err(Error::InvalidInput(format!(
            "minimization check needs at least 5 starts, got {n_starts}"
        )));
    }
    let lam = sol.lam_tilde;
    let value = |u: &crate::grid::GridFunction| -> Result<f64> {
        Ok(0.5 * frozen_energy(op, coeff, f, lam, u)?)
    };
    let value_at_solution = value(&sol.u)?;

    let u0 = supersolution_start(op, coeff, f, lam)?;
    let mut spread: f64 = 0.0;
    let mut below_zero_ok = value_at_solution < 0.0;
    for _ in 0..n_starts {
        let factor = rng.gen_range(1.0..8.0);
        let mut start = u0.clone();
        for v in start.values_mut() {
            *v *= factor;
        }
        let run = solve_frozen_from(op, coeff, f, lam, 1e-10, start)?;
        spread = spread.max(run.u.rel_max_distance(&sol.u));
        below_zero_ok &= value(&run.u)? < 0.0;
    }
    let agree_ok = spread <= tol_spread;

    let delta = 1e-3 * sol.u.max_abs();
    let noise_floor = -1e-12 * (1.0 + value_at_solution.abs());
    let mut worst_perturbation_margin = f64::INFINITY;
    for _ in 0..n_perturbations {
        let mut v = sol.u.clone();
        for x in v.values_mut() {
            *x += delta * rng.gen_range(-1.0..1.0);
        }
        let margin = value(&v)? - value_at_solution;
        worst_perturbation_margin = worst_perturbation_margin.min(margin);
    }
    let perturbation_ok = worst_perturbation_margin >= noise_floor;

    Ok(MinimizationCheck {
        ok: agree_ok && below_zero_ok && perturbation_ok,
        agree_ok,
        below_zero_ok,
        perturbation_ok,
        spread,
        value_at_solution,
        worst_perturbation_margin,
        n_starts,
        n_perturbations,
    })
}

/// Positivity of the solution and strict interiority of its energy.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PositivityLocalization {
    pub positive_ok: bool,
    pub localization_ok: bool,
    /// Smallest nodal value.
    pub min_value: f64,
    /// Distance of `t̃` to the nearest finite endpoint of the branch
    /// interval.
    pub boundary_gap: f64,
}

pub fn check_positivity_localization(sol: &KirchhoffSolution) -> PositivityLocalization {
    let (t_lo, t_hi) = sol.branch.interval();
    let min_value = sol.u.min();
    let localization_ok = sol.t_tilde > t_lo && sol.t_tilde < t_hi;
    let mut boundary_gap = sol.t_tilde - t_lo;
    if t_hi.is_finite() {
        boundary_gap = boundary_gap.min(t_hi - sol.t_tilde);
    }
    PositivityLocalization {
        positive_ok: min_value > 0.0,
        localization_ok,
        min_value,
        boundary_gap,
    }
}

/// One branch of a survey.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SurveyRow {
    pub branch: String,
    pub t_lo: f64,
    pub t_hi: f64,
    pub t_tilde: Option<f64>,
    pub lam_tilde: Option<f64>,
    pub apriori_lhs: Option<f64>,
    pub apriori_rhs: Option<f64>,
    /// "ok", or the reason the branch produced no solution.
    pub status: String,
}

/// Survey outcome: per-branch rows plus the cross-branch facts.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SurveyReport {
    pub rows: Vec<SurveyRow>,
    /// `Φ(u₁)`, which every solved branch's invariant must reproduce.
    pub base_phi: f64,
    /// Relative spread of the `aprioriLhs` column over solved rows.
    pub invariance_spread: f64,
    /// Worst relative deviation of the column from `Φ(u₁)`.
    pub max_deviation_from_base: f64,
    /// Spread and deviation both within 1e-8.
    pub invariance_ok: bool,
    /// All solved `t̃` pairwise distinct (beyond 1e-6 relative).
    pub distinct_ok: bool,
}

/// Solve the same data on every branch of the list and tabulate
/// `(t̃, λ̃, both sides of the a priori bound)` per branch.
///
/// The invariant column `K(t̃)^{2/(1-q)}·t̃` must be branch-independent and
/// equal to `Φ(u₁)`: the survey measures exactly that. Branches that fail
/// validation or produce no crossing are recorded in their row's status and
/// do not abort the survey.
pub fn cross_branch_survey(
    op: &DiscreteLaplacian,
    coeff: &Coefficient,
    f: &Nonlinearity,
    branches: &[KirchhoffBranch],
    lambda1: f64,
    opts: SolveOptions,
) -> Result<SurveyReport> {
    let Some(q) = f.power_exponent() else {
        return Err(Error::InvalidInput(
            "the cross-branch survey needs a power nonlinearity".into(),
        ));
    };
    let base_phi = if branches.is_empty() {
        f64::NAN
    } else {
        solve_frozen(op, coeff, f, 1.0, opts.tol_frozen)?.phi
    };

    let mut rows = Vec::with_capacity(branches.len());
    let mut solved: Vec<(f64, f64)> = Vec::new(); // (tTilde, lhs)
    for branch in branches {
        let (t_lo, t_hi) = branch.interval();
        let validation = branch.validate(64)?;
        if !validation.is_usable() {
            rows.push(SurveyRow {
                branch: branch.label(),
                t_lo,
                t_hi,
                t_tilde: None,
                lam_tilde: None,
                apriori_lhs: None,
                apriori_rhs: None,
                status: "invalid: not strictly increasing and positive on the sample".into(),
            });
            continue;
        }
        match solve_t_equation(op, coeff, f, branch, opts) {
            Ok(sol) => {
                let ap = check_apriori(&sol, coeff, q, lambda1)?;
                solved.push((sol.t_tilde, ap.lhs));
                rows.push(SurveyRow {
                    branch: branch.label(),
                    t_lo,
                    t_hi,
                    t_tilde: Some(sol.t_tilde),
                    lam_tilde: Some(sol.lam_tilde),
                    apriori_lhs: Some(ap.lhs),
                    apriori_rhs: Some(ap.rhs),
                    status: "ok".into(),
                });
            }
            Err(Error::NoCrossing { reason }) => {
                rows.push(SurveyRow {
                    branch: branch.label(),
                    t_lo,
                    t_hi,
                    t_tilde: None,
                    lam_tilde: None,
                    apriori_lhs: None,
                    apriori_rhs: None,
                    status: format!("no-crossing: {reason}"),
                });
            }
            Err(e) => return Err(e),
        }
    }

    let (invariance_spread, max_deviation_from_base) = if solved.is_empty() {
        (0.0, 0.0)
    } else {
        let max = solved.iter().map(|s| s.1).fold(f64::MIN, f64::max);
        let min = solved.iter().map(|s| s.1).fold(f64::MAX, f64::min);
        let dev = solved
            .iter()
            .map(|s| (s.1 - base_phi).abs() / base_phi)
            .fold(0.0, f64::max);
        ((max - min) / max, dev)
    };
    let mut distinct_ok = true;
    for i in 0..solved.len() {
        for j in (i + 1)..solved.len() {
            let (a, b) = (solved[i].0, solved[j].0);
            if (a - b).abs() <= 1e-6 * a.abs().max(b.abs()) {
                distinct_ok = false;
            }
        }
    }
    Ok(SurveyReport {
        rows,
        base_phi,
        invariance_spread,
        max_deviation_from_base,
        invariance_ok: invariance_spread <= 1e-8 && max_deviation_from_base <= 1e-8,
        distinct_ok,
    })
}

/// Render a survey as CSV (`inf` for an unbounded interval end, empty cells
/// for unsolved branches).
pub fn survey_to_csv(report: &SurveyReport) -> String {
    let mut out = String::from("branch,tLo,tHi,tTilde,lamTilde,aprioriLhs,aprioriRhs,status\n");
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.branch,
            r.t_lo,
            r.t_hi,
            cell(r.t_tilde),
            cell(r.lam_tilde),
            cell(r.apriori_lhs),
            cell(r.apriori_rhs),
            r.status
        ));
    }
    out
}

/// Aggregate verification verdict stored in the run report.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub apriori_lhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub apriori_rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub apriori_ok: Option<bool>,
    pub minimization_ok: bool,
    pub positivity_ok: bool,
    pub localization_ok: bool,
    pub multi_start_spread: f64,
    pub notes: String,
}

impl VerificationReport {
    pub fn all_ok(&self) -> bool {
        self.apriori_ok.unwrap_or(true)
            && self.minimization_ok
            && self.positivity_ok
            && self.localization_ok
    }
}

/// Run the full verification battery on a solution. `q` is `None` for table
/// nonlinearities, which have no a priori bound to check.
#[allow(clippy::too_many_arguments)]
pub fn verify_solution(
    sol: &KirchhoffSolution,
    op: &DiscreteLaplacian,
    coeff: &Coefficient,
    f: &Nonlinearity,
    lambda1: f64,
    n_starts: usize,
    n_perturbations: usize,
    tol_spread: f64,
    rng: &mut impl Rng,
) -> Result<VerificationReport> {
    let apriori = match f.power_exponent() {
        Some(q) => Some(check_apriori(sol, coeff, q, lambda1)?),
        None => None,
    };
    let minim = check_minimization(sol, op, coeff, f, n_starts, n_perturbations, tol_spread, rng)?;
    let pos = check_positivity_localization(sol);

    let mut notes = vec![format!(
        "functional value at the solution {:.6e}; worst perturbation margin {:.3e}",
        minim.value_at_solution, minim.worst_perturbation_margin
    )];
    match &apriori {
        Some(ap) => notes.push(format!("a priori ratio lhs/rhs = {:.6}", ap.ratio)),
        None => notes.push("a priori bound skipped: table nonlinearity has no exponent".into()),
    }
    notes.push(format!(
        "t̃ sits {:.3e} from the nearest branch endpoint",
        pos.boundary_gap
    ));

    Ok(VerificationReport {
        apriori_lhs: apriori.map(|a| a.lhs),
        apriori_rhs: apriori.map(|a| a.rhs),
        apriori_ok: apriori.map(|a| a.ok),
        minimization_ok: minim.ok,
        positivity_ok: pos.positive_ok,
        localization_ok: pos.localization_ok,
        multi_start_spread: minim.spread,
        notes: notes.join("; "),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_operators, DomainSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    struct Setup {
        op: DiscreteLaplacian,
        coeff: Coefficient,
        f: Nonlinearity,
    }

    fn setup(res: usize) -> Setup {
        let spec = DomainSpec::Interval {
            length: 1.0,
            resolution: res,
        };
        Setup {
            op: build_operators(spec).unwrap(),
            coeff: Coefficient::constant(spec, 1.0).unwrap(),
            f: Nonlinearity::power(0.5).unwrap(),
        }
    }

    fn solved(s: &Setup) -> KirchhoffSolution {
        let branch = KirchhoffBranch::tan(1).unwrap();
        solve_t_equation(&s.op, &s.coeff, &s.f, &branch, SolveOptions::default()).unwrap()
    }

    #[test]
    fn apriori_rhs_matches_hand_arithmetic() {
        // For q = 1/2, α ≡ 1 (continuum aggregates), λ₁ = π²:
        // rhs = [(4/3)²·π^{-3}]² · ∫α = (256/81)·π^{-6} · ∫α.
        let s = setup(255);
        let sol = solved(&s);
        let lam1 = PI * PI;
        let ap = check_apriori(&sol, &s.coeff, 0.5, lam1).unwrap();
        let expected = 256.0 / 81.0 * PI.powi(-6) * s.coeff.integral();
        assert!((ap.rhs - expected).abs() <= 1e-12 * expected);
        assert!(ap.ok, "lhs = {}, rhs = {}", ap.lhs, ap.rhs);
        assert!(ap.ratio < 1.0);
    }

    #[test]
    fn apriori_extreme_exponent_cross_check() {
        // q = 0.9 pushes both powers hard; recompute the bracketed
        // expression by independent arithmetic.
        let s = setup(63);
        let sol = solved(&s);
        let lam1 = 9.8;
        let q = 0.9;
        let ap = check_apriori(&sol, &s.coeff, q, lam1).unwrap();
        let inner: f64 = (2.0 / 1.9) * (2.0 / 1.9) * (1.0f64 / 9.8).powf(1.9);
        let expected = inner.powf(10.0) * s.coeff.integral();
        assert!((ap.rhs - expected).abs() <= 1e-10 * expected);
    }

    #[test]
    fn minimization_multi_start_agrees() {
        let s = setup(127);
        let sol = solved(&s);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m =
            check_minimization(&sol, &s.op, &s.coeff, &s.f, 5, 50, 1e-8, &mut rng).unwrap();
        assert!(m.ok, "{m:?}");
        assert!(m.value_at_solution < 0.0);
        assert!(m.spread <= 1e-8);
        assert!(m.worst_perturbation_margin >= -1e-12 * (1.0 + m.value_at_solution.abs()));
    }

    #[test]
    fn minimization_needs_five_starts() {
        let s = setup(31);
        let sol = solved(&s);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(
            check_minimization(&sol, &s.op, &s.coeff, &s.f, 3, 10, 1e-8, &mut rng).is_err()
        );
    }

    #[test]
    fn scaled_up_solution_costs_more() {
        let s = setup(63);
        let sol = solved(&s);
        let mut v = sol.u.clone();
        for x in v.values_mut() {
            *x *= 1.01;
        }
        let at_sol = frozen_energy(&s.op, &s.coeff, &s.f, sol.lam_tilde, &sol.u).unwrap();
        let at_v = frozen_energy(&s.op, &s.coeff, &s.f, sol.lam_tilde, &v).unwrap();
        assert!(at_v > at_sol);
    }

    #[test]
    fn positivity_and_localization_flags() {
        let s = setup(63);
        let sol = solved(&s);
        let check = check_positivity_localization(&sol);
        assert!(check.positive_ok && check.localization_ok);
        assert!(check.min_value > 0.0);
        assert!(check.boundary_gap > 0.0);

        // Constructed failures: a negated solution and an energy pushed to
        // the interval's end.
        let mut negated = sol.clone();
        for v in negated.u.values_mut() {
            *v = -*v;
        }
        assert!(!check_positivity_localization(&negated).positive_ok);

        let mut pushed = sol.clone();
        pushed.t_tilde = pushed.branch.interval().1;
        assert!(!check_positivity_localization(&pushed).localization_ok);
    }

    #[test]
    fn survey_over_mixed_branches_shares_the_invariant() {
        let s = setup(127);
        let branches = vec![
            KirchhoffBranch::affine(1.0, 0.0).unwrap(),
            KirchhoffBranch::log(),
            KirchhoffBranch::tan(1).unwrap(),
        ];
        let lam1 = s.op.principal_eigenvalue(1e-10).unwrap().0;
        let rep = cross_branch_survey(
            &s.op,
            &s.coeff,
            &s.f,
            &branches,
            lam1,
            SolveOptions::default(),
        )
        .unwrap();
        assert_eq!(rep.rows.len(), 3);
        assert!(rep.rows.iter().all(|r| r.status == "ok"));
        assert!(rep.invariance_ok, "spread = {}", rep.invariance_spread);
        assert!(rep.distinct_ok);
    }

    #[test]
    fn survey_records_failures_without_aborting() {
        let s = setup(63);
        let branches = vec![
            KirchhoffBranch::tan(1).unwrap(),
            KirchhoffBranch::singular_power(1e-20, 0.5).unwrap(),
            KirchhoffBranch::affine(0.0, 1.0).unwrap(), // constant: invalid
        ];
        let rep = cross_branch_survey(
            &s.op,
            &s.coeff,
            &s.f,
            &branches,
            9.8,
            SolveOptions::default(),
        )
        .unwrap();
        assert_eq!(rep.rows.len(), 3);
        assert_eq!(rep.rows[0].status, "ok");
        assert!(rep.rows[1].status.starts_with("no-crossing"));
        assert!(rep.rows[2].status.starts_with("invalid"));
        let csv = survey_to_csv(&rep);
        assert!(csv.starts_with("branch,tLo,tHi,tTilde,lamTilde,aprioriLhs,aprioriRhs,status"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn empty_survey_is_vacuous() {
        let s = setup(31);
        let rep =
            cross_branch_survey(&s.op, &s.coeff, &s.f, &[], 9.8, SolveOptions::default()).unwrap();
        assert!(rep.rows.is_empty());
        assert!(rep.invariance_ok && rep.distinct_ok);
        assert_eq!(survey_to_csv(&rep).lines().count(), 1);
    }

    #[test]
    fn full_verification_battery_passes() {
        let s = setup(127);
        let sol = solved(&s);
        let lam1 = s.op.principal_eigenvalue(1e-10).unwrap().0;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rep = verify_solution(
            &sol, &s.op, &s.coeff, &s.f, lam1, 5, 100, 1e-8, &mut rng,
        )
        .unwrap();
        assert!(rep.all_ok(), "{rep:?}");
        assert!(rep.apriori_ok == Some(true));
        assert!(rep.multi_start_spread <= 1e-8);
        assert!(!rep.notes.is_empty());
    }
}
