//! The frozen-parameter sublinear solve.
//!
//! For a fixed `lam > 0` the problem `-Δu = (1/lam) α(x) f(u)`, `u = 0` on
//! the boundary, has exactly one positive solution when `f` is sublinear
//! (quotient `f(ξ)/ξ` strictly decreasing, blowing up at `0⁺`, vanishing at
//! the far end). That solution is the unique global minimum of the energy
//! `lam·Φ(u) − J(u)` and is computed here by a monotone iteration started
//! from a constructed supersolution: every iterate stays positive, decreases
//! entrywise, and converges without any line search.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{DiscreteLaplacian, GridFunction, DEFAULT_LINEAR_TOL};

/// Default relative max-norm tolerance on successive iterates.
pub const DEFAULT_FROZEN_TOL: f64 = 1e-10;

/// Outer iteration cap for the monotone scheme.
const MAX_OUTER_ITERATIONS: usize = 10_000;

/// Collapse threshold: iterates below this fraction of the starting maximum
/// signal a degenerate limit rather than a legitimate small solution.
const POSITIVITY_FLOOR: f64 = 1e-14;

/// Required total decay factor of the quotient `f(ξ)/ξ` across the
/// validation window for the endpoint trend checks.
const TREND_FACTOR: f64 = 1.5;

/// Sampling window for validating a power nonlinearity (tables use their
/// own knots).
const POWER_GRID: (f64, f64) = (1e-8, 1e8);

/// Piecewise-linear nonlinearity sampled on `[0, ξmax]`.
///
/// Beyond the last knot `f` is extended by its final value (keeping it
/// nondecreasing), and below zero by `f ≡ 0`. The primitive `F` is either
/// supplied knot-wise or accumulated by composite trapezoid — exact for a
/// piecewise-linear integrand.
#[derive(Debug, Clone, PartialEq)]
pub struct FTable {
    xs: Vec<f64>,
    fs: Vec<f64>,
    prims: Vec<f64>,
}

impl FTable {
    pub fn new(xs: Vec<f64>, fs: Vec<f64>, primitive: Option<Vec<f64>>) -> Result<Self> {
        if xs.len() != fs.len() {
            return Err(Error::InvalidInput(format!(
                "nonlinearity table columns differ in length: {} vs {}",
                xs.len(),
                fs.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::InvalidInput(
                "a nonlinearity table needs at least two rows".into(),
            ));
        }
        if xs[0] != 0.0 {
            return Err(Error::InvalidInput(format!(
                "nonlinearity table must start at ξ = 0, got {}",
                xs[0]
            )));
        }
        if fs[0] != 0.0 {
            return Err(Error::InvalidInput(format!(
                "nonlinearity table must have f(0) = 0, got {}",
                fs[0]
            )));
        }
        for w in xs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidInput(format!(
                    "nonlinearity abscissae must increase strictly, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for (i, &v) in fs.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "nonlinearity value f[{i}] = {v} must be finite and nonnegative"
                )));
            }
        }
        let prims = match primitive {
            Some(p) => {
                if p.len() != xs.len() {
                    return Err(Error::InvalidInput(
                        "primitive table must match the f table in length".into(),
                    ));
                }
                if p[0] != 0.0 {
                    return Err(Error::InvalidInput("primitive must satisfy F(0) = 0".into()));
                }
                if p.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::InvalidInput("primitive must be nondecreasing".into()));
                }
                p
            }
            None => {
                let mut acc = vec![0.0; xs.len()];
                for i in 1..xs.len() {
                    acc[i] =
                        acc[i - 1] + 0.5 * (fs[i] + fs[i - 1]) * (xs[i] - xs[i - 1]);
                }
                acc
            }
        };
        Ok(FTable { xs, fs, prims })
    }

    fn segment(&self, xi: f64) -> usize {
        match self.xs.partition_point(|&x| x <= xi) {
            0 => 0,
            p => (p - 1).min(self.xs.len() - 2),
        }
    }

    fn eval(&self, xi: f64) -> f64 {
        if xi <= 0.0 {
            return 0.0;
        }
        let last = self.xs.len() - 1;
        if xi >= self.xs[last] {
            return self.fs[last];
        }
        let i = self.segment(xi);
        let t = (xi - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.fs[i] + t * (self.fs[i + 1] - self.fs[i])
    }

    fn primitive(&self, xi: f64) -> f64 {
        if xi <= 0.0 {
            return 0.0;
        }
        let last = self.xs.len() - 1;
        if xi >= self.xs[last] {
            return self.prims[last] + self.fs[last] * (xi - self.xs[last]);
        }
        let i = self.segment(xi);
        self.prims[i] + 0.5 * (self.fs[i] + self.eval(xi)) * (xi - self.xs[i])
    }
}

/// The sublinear nonlinearity `f`, extended by `f(ξ) = 0` for `ξ < 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum Nonlinearity {
    /// `f(ξ) = ξ^q` with `q ∈ (0, 1)`; `F(ξ) = ξ^{q+1}/(q+1)`.
    Power { q: f64 },
    /// User-supplied sample table.
    Table(FTable),
}

/// Diagnostics from sampling a nonlinearity.
///
/// The two endpoint trends are finite renderings of the limits
/// `f(ξ)/ξ → ∞` at `0⁺` and `→ 0` at the far end: on a finite window both
/// reduce to the same total-decay test — the quotient at the smallest sample
/// must exceed the quotient at the largest by [`TREND_FACTOR`] — reported
/// under both names for the two hypotheses they stand in for.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NonlinearityReport {
    /// `f(ξ)/ξ` strictly decreases across the samples.
    pub quotient_strictly_decreasing: bool,
    /// `f` is nondecreasing across the samples.
    pub nondecreasing: bool,
    /// `f(0) = 0`, `f ≥ 0` on the grid, and `f ≡ 0` left of zero.
    pub sign_ok: bool,
    pub blows_up_at_zero: bool,
    pub vanishes_at_far_end: bool,
    pub grid_points: usize,
}

impl NonlinearityReport {
    pub fn is_usable(&self) -> bool {
        self.quotient_strictly_decreasing
            && self.nondecreasing
            && self.sign_ok
            && self.blows_up_at_zero
            && self.vanishes_at_far_end
    }
}

impl Nonlinearity {
    pub fn power(q: f64) -> Result<Self> {
        if !(q.is_finite() && q > 0.0 && q < 1.0) {
            return Err(Error::InvalidInput(format!(
                "power exponent must lie in (0, 1), got {q}"
            )));
        }
        Ok(Nonlinearity::Power { q })
    }

    pub fn table(xs: Vec<f64>, fs: Vec<f64>, primitive: Option<Vec<f64>>) -> Result<Self> {
        Ok(Nonlinearity::Table(FTable::new(xs, fs, primitive)?))
    }

    /// The exponent when this is a pure power, else `None`. The power-only
    /// shortcuts (exact scaling, the t-equation route) key off this.
    pub fn power_exponent(&self) -> Option<f64> {
        match self {
            Nonlinearity::Power { q } => Some(*q),
            Nonlinearity::Table(_) => None,
        }
    }

    pub fn f(&self, xi: f64) -> f64 {
        match self {
            Nonlinearity::Power { q } => {
                if xi <= 0.0 {
                    0.0
                } else {
                    xi.powf(*q)
                }
            }
            Nonlinearity::Table(t) => t.eval(xi),
        }
    }

    /// `F(ξ) = ∫₀^ξ f`.
    pub fn primitive(&self, xi: f64) -> f64 {
        match self {
            Nonlinearity::Power { q } => {
                if xi <= 0.0 {
                    0.0
                } else {
                    xi.powf(q + 1.0) / (q + 1.0)
                }
            }
            Nonlinearity::Table(t) => t.primitive(xi),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Nonlinearity::Power { q } => format!("power(q={q})"),
            Nonlinearity::Table(t) => format!("table(n={})", t.xs.len()),
        }
    }

    /// Sample the sublinearity hypotheses and report which hold.
    ///
    /// Powers are sampled log-spaced across a wide window; tables are
    /// sampled at their own knots — inside a linear segment the quotient is
    /// locally affine and probing it mid-segment would flag a spurious
    /// strictness failure. The `grid_points` budget drives the sign sweep
    /// and the power grid.
    pub fn validate(&self, grid_points: usize) -> Result<NonlinearityReport> {
        if grid_points < 32 {
            return Err(Error::InvalidInput(format!(
                "nonlinearity validation needs at least 32 grid points, got {grid_points}"
            )));
        }
        // Quotient samples: (ξ, f(ξ)/ξ) at strictly positive abscissae.
        let xis: Vec<f64> = match self {
            Nonlinearity::Power { .. } => {
                let (lo, hi) = POWER_GRID;
                let n = grid_points;
                (0..n)
                    .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
                    .collect()
            }
            Nonlinearity::Table(t) => t.xs[1..].to_vec(),
        };
        let quotients: Vec<f64> = xis.iter().map(|&x| self.f(x) / x).collect();
        let fvals: Vec<f64> = xis.iter().map(|&x| self.f(x)).collect();

        let quotient_strictly_decreasing = quotients.windows(2).all(|w| w[1] < w[0]);
        let nondecreasing = fvals.windows(2).all(|w| w[1] >= w[0]);

        let mut sign_ok = self.f(0.0) == 0.0;
        for i in 1..=8 {
            sign_ok &= self.f(-(i as f64)) == 0.0;
        }
        sign_ok &= fvals.iter().all(|&v| v.is_finite() && v >= 0.0);

        let q_first = quotients.first().copied().unwrap_or(f64::NAN);
        let q_last = quotients.last().copied().unwrap_or(f64::NAN);
        let trend = q_first.is_finite() && q_last.is_finite() && q_first >= TREND_FACTOR * q_last;

        Ok(NonlinearityReport {
            quotient_strictly_decreasing,
            nondecreasing,
            sign_ok,
            blows_up_at_zero: trend,
            vanishes_at_far_end: trend,
            grid_points: xis.len(),
        })
    }
}

/// Positive weight `α` with the two aggregates the a priori bound needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    alpha: GridFunction,
    ess_sup: f64,
    integral: f64,
}

impl Coefficient {
    /// Wrap nodal values; all must be strictly positive and finite.
    pub fn from_values(alpha: GridFunction) -> Result<Self> {
        if alpha.values().iter().any(|&a| !a.is_finite() || a <= 0.0) {
            return Err(Error::InvalidInput(
                "coefficient must be strictly positive and finite at every node".into(),
            ));
        }
        let ess_sup = alpha.max();
        let (hx, hy) = alpha.spec().mesh_widths();
        let cell = hx * hy.unwrap_or(1.0);
        let integral = cell * alpha.values().iter().sum::<f64>();
        Ok(Coefficient {
            alpha,
            ess_sup,
            integral,
        })
    }

    pub fn constant(spec: crate::grid::DomainSpec, value: f64) -> Result<Self> {
        Self::from_values(GridFunction::constant(spec, value))
    }

    /// `α(x) = lo + (hi - lo)·x/Lx`, graded along the first axis.
    pub fn linear_ramp(spec: crate::grid::DomainSpec, lo: f64, hi: f64) -> Result<Self> {
        let lx = match spec {
            crate::grid::DomainSpec::Interval { length, .. } => length,
            crate::grid::DomainSpec::Rectangle { width, .. } => width,
        };
        Self::from_values(GridFunction::sample(spec, |x, _| lo + (hi - lo) * x / lx))
    }

    /// Alternating `low`/`high` cells, `cells` per axis.
    pub fn checkerboard(
        spec: crate::grid::DomainSpec,
        low: f64,
        high: f64,
        cells: u32,
    ) -> Result<Self> {
        if cells == 0 {
            return Err(Error::InvalidInput("checkerboard needs at least one cell".into()));
        }
        let (lx, ly) = match spec {
            crate::grid::DomainSpec::Interval { length, .. } => (length, None),
            crate::grid::DomainSpec::Rectangle { width, height, .. } => (width, Some(height)),
        };
        Self::from_values(GridFunction::sample(spec, |x, y| {
            let mut parity = ((x / lx * cells as f64).floor() as i64).min(cells as i64 - 1);
            if let Some(ly) = ly {
                parity += ((y / ly * cells as f64).floor() as i64).min(cells as i64 - 1);
            }
            if parity % 2 == 0 {
                low
            } else {
                high
            }
        }))
    }

    pub fn alpha(&self) -> &GridFunction {
        &self.alpha
    }

    pub fn ess_sup(&self) -> f64 {
        self.ess_sup
    }

    /// Lumped-quadrature `∫ α`.
    pub fn integral(&self) -> f64 {
        self.integral
    }
}

/// Outcome of a frozen solve.
#[derive(Debug, Clone)]
pub struct SublinearSolution {
    pub u: GridFunction,
    pub lambda: f64,
    /// `Φ(u)`, the Dirichlet energy of the solution.
    pub phi: f64,
    /// `lam·Φ(u) − J(u)`.
    pub energy: f64,
    pub iterations: usize,
    /// `‖lam·Au − M(α⊙f(u))‖ / ‖M(α⊙f(u))‖`.
    pub residual: f64,
}

/// `J(u) = 2·Σ_i M_ii α_i F(u_i⁺)`: twice the lumped integral of `α F(u⁺)`.
pub fn functional_j(
    op: &DiscreteLaplacian,
    coeff: &Coefficient,
    f: &Nonlinearity,
    u: &GridFunction,
) -> Result<f64> {
    check_dims(op, coeff, u)?;
    let mut j = 0.0;
    for ((&m, &a), &ui) in op
        .mass()
        .iter()
        .zip(coeff.alpha().values())
        .zip(u.values())
    {
        j += m * a * f.primitive(ui.max(0.0));
    }
    Ok(2.0 * j)
}

/// The frozen energy `lam·Φ(u) − J(u)` whose unique global minimum is the
/// positive solution.
pub fn frozen_energy(
    op: &DiscreteLaplacian,
    coeff: &Coefficient,
    f: &Nonlinearity,
    lam: f64,
    u: &GridFunction,
) -> Result<f64> {
    if !(lam > 0.0 && lam.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "frozen energy needs lam > 0, got {lam}"
        )));
    }
    Ok(lam * op.dirichlet_energy(u)? - functional_j(op, coeff, f, u)?)
}

/// Build the starting supersolution `u₀` for the monotone iteration.
///
/// With `w` the lifted weight (`Aw = Mα`): for a power, `u₀ = (C^q/lam) w`
/// with `C = (max w / lam)^{1/(1-q)}`, which satisfies
/// `lam·Au₀ = C^q·Mα ≥ M(α f(u₀))` exactly. For a table, `u₀ = c·w` where
/// `c` doubles up from 1 until `f(c·max w) ≤ lam·c` — reachable because the
/// quotient vanishes at the far end.
pub fn supersolution_start(
    op: &DiscreteLaplacian,
    coeff: &Coefficient,
    f: &Nonlinearity,
    lam: f64,
) -> Result<GridFunction> {
    if !(lam > 0.0 && lam.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "supersolution needs lam > 0, got {lam}"
        )));
    }
    let w = op.solve_spd(coeff.alpha(), DEFAULT_LINEAR_TOL)?;
    let w_max = w.max();
    if !(w_max > 0.0) {
        return Err(Error::InvalidInput(
            "weight lift collapsed; coefficient must be positive".into(),
        ));
    }
    let scale = match f {
        Nonlinearity::Power { q } => {
            let c = (w_max / lam).powf(1.0 / (1.0 - q));
            c.powf(*q) / lam
        }
        Nonlinearity::Table(_) => {
            let mut c = 1.0;
            let mut found = false;
            for _ in 0..200 {
                if f.f(c * w_max) <= lam * c {
                    found = true;
                    break;
                }
                c *= 2.0;
            }
            if !found {
                return Err(Error::NoConvergence {
                    what: "supersolution bracket",
                    iterations: 200,
                    residual: f.f(c * w_max) / (lam * c),
                });
            }
            c
        }
    };
    let mut u0 = w;
    for v in u0.values_mut() {
        *v *= scale;
    }
    Ok(u0)
}

/// Solve the frozen problem by the monotone iteration from the constructed
/// supersolution. See [`solve_frozen_from`] for the loop itself.
pub fn solve_frozen(
    op: &DiscreteLaplacian,
    coeff: &Coefficient,
    f: &Nonlinearity,
    lam: f64,
    tol: f64,
) -> Result<SublinearSolution> {
    let u0 = supersolution_start(op, coeff, f, lam)?;
    solve_frozen_from(op, coeff, f, lam, tol, u0)
}

/// Monotone iteration `u_{k+1} = A⁻¹ M(α⊙f(u_k))/lam` from a caller-supplied
/// positive start that dominates the solution.
///
/// Stops when successive iterates agree to `tol` in the relative max norm
/// *and* the Euler–Lagrange residual is below `10·tol`; collapses below the
/// positivity floor raise `DegenerateLimit`.
pub fn solve_frozen_from(
    op: &DiscreteLaplacian,
    coeff: &Coefficient,
    f: &Nonlinearity,
    lam: f64,
    tol: f64,
    u0: GridFunction,
) -> Result<SublinearSolution> {
    if !(lam > 0.0 && lam.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "frozen solve needs lam > 0, got {lam}"
        )));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "frozen solve tolerance must be positive, got {tol}"
        )));
    }
    check_dims(op, coeff, &u0)?;
    let floor = POSITIVITY_FLOOR * u0.max();
    let inner_tol = DEFAULT_LINEAR_TOL.min(tol / 100.0).max(1e-14);

    let mut u = u0;
    let mut rhs = GridFunction::zeros(op.spec());
    for k in 1..=MAX_OUTER_ITERATIONS {
        for ((r, &a), &ui) in rhs
            .values_mut()
            .iter_mut()
            .zip(coeff.alpha().values())
            .zip(u.values())
        {
            *r = a * f.f(ui) / lam;
        }
        let next = op.solve_spd(&rhs, inner_tol)?;
        if next.max() < floor {
            return Err(Error::DegenerateLimit {
                detail: format!(
                    "iterate {k} collapsed to max {:.3e} from start max {:.3e}",
                    next.max(),
                    floor / POSITIVITY_FLOOR
                ),
            });
        }
        let diff = next.rel_max_distance(&u);
        u = next;
        if diff <= tol {
            let residual = frozen_residual(op, coeff, f, lam, &u)?;
            if residual <= 10.0 * tol {
                let phi = op.dirichlet_energy(&u)?;
                let energy = frozen_energy(op, coeff, f, lam, &u)?;
                return Ok(SublinearSolution {
                    u,
                    lambda: lam,
                    phi,
                    energy,
                    iterations: k,
                    residual,
                });
            }
        }
    }
    let residual = frozen_residual(op, coeff, f, lam, &u)?;
    Err(Error::NoConvergence {
        what: "frozen monotone iteration",
        iterations: MAX_OUTER_ITERATIONS,
        residual,
    })
}

/// `‖lam·Au − M(α⊙f(u))‖₂ / ‖M(α⊙f(u))‖₂`.
pub fn frozen_residual(
    op: &DiscreteLaplacian,
    coeff: &Coefficient,
    f: &Nonlinearity,
    lam: f64,
    u: &GridFunction,
) -> Result<f64> {
    check_dims(op, coeff, u)?;
    let n = op.node_count();
    let mut au = vec![0.0; n];
    op.apply_stiffness(u.values(), &mut au);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        let rhs = op.mass()[i] * coeff.alpha().values()[i] * f.f(u.values()[i]);
        let r = lam * au[i] - rhs;
        num += r * r;
        den += rhs * rhs;
    }
    if den == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((num / den).sqrt())
}

/// Exact power-case rescaling: the solution at `lam_new` is
/// `(lam_new/lam_base)^{-1/(1-q)}` times the one at `lam_base`. The residual
/// of the returned solution is recomputed on the grid, not scaled.
pub fn scale_solution(
    op: &DiscreteLaplacian,
    coeff: &Coefficient,
    f: &Nonlinearity,
    base: &SublinearSolution,
    lam_new: f64,
) -> Result<SublinearSolution> {
    let Some(q) = f.power_exponent() else {
        return Err(Error::InvalidInput(
            "scaling shortcut applies to power nonlinearities only".into(),
        ));
    };
    if !(lam_new > 0.0 && lam_new.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "scaling needs lam > 0, got {lam_new}"
        )));
    }
    let ratio = (lam_new / base.lambda).powf(-1.0 / (1.0 - q));
    let mut u = base.u.clone();
    for v in u.values_mut() {
        *v *= ratio;
    }
    let phi = base.phi * ratio * ratio;
    let energy = frozen_energy(op, coeff, f, lam_new, &u)?;
    let residual = frozen_residual(op, coeff, f, lam_new, &u)?;
    Ok(SublinearSolution {
        u,
        lambda: lam_new,
        phi,
        energy,
        iterations: 0,
        residual,
    })
}

fn check_dims(op: &DiscreteLaplacian, coeff: &Coefficient, u: &GridFunction) -> Result<()> {
    if coeff.alpha().spec() != op.spec() || u.spec() != op.spec() {
        return Err(Error::DimensionMismatch(
            "operator, coefficient, and function live on different grids".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_operators, DomainSpec};
    use approx::assert_abs_diff_eq;

    fn unit_interval(res: usize) -> DomainSpec {
        DomainSpec::Interval {
            length: 1.0,
            resolution: res,
        }
    }

    #[test]
    fn power_nonlinearity_passes_validation() {
        let f = Nonlinearity::power(0.5).unwrap();
        let rep = f.validate(64).unwrap();
        assert!(rep.quotient_strictly_decreasing);
        assert!(rep.nondecreasing);
        assert!(rep.sign_ok);
        assert!(rep.blows_up_at_zero);
        assert!(rep.vanishes_at_far_end);
        assert!(rep.is_usable());
    }

    #[test]
    fn linear_table_fails_the_quotient_check() {
        let f = Nonlinearity::table(vec![0.0, 0.5, 1.0], vec![0.0, 0.5, 1.0], None).unwrap();
        let rep = f.validate(64).unwrap();
        assert!(!rep.quotient_strictly_decreasing, "f/ξ ≡ 1 is constant");
        assert!(!rep.is_usable());
    }

    #[test]
    fn saturating_table_fails_the_blow_up_check() {
        // f(ξ) = ξ/(1+ξ): the quotient tends to 1 at zero instead of
        // blowing up. Knots at {0, 1/2, 1} give quotients 2/3 and 1/2 —
        // strictly decreasing, but the total decay 4/3 < 3/2.
        let xs = vec![0.0, 0.5, 1.0];
        let fs: Vec<f64> = xs.iter().map(|x| x / (1.0 + x)).collect();
        let f = Nonlinearity::table(xs, fs, None).unwrap();
        let rep = f.validate(64).unwrap();
        assert!(rep.quotient_strictly_decreasing);
        assert!(!rep.blows_up_at_zero);
        assert!(!rep.is_usable());
    }

    #[test]
    fn concave_table_is_usable() {
        let f = Nonlinearity::table(vec![0.0, 0.5, 1.0], vec![0.0, 0.9, 1.0], None).unwrap();
        let rep = f.validate(64).unwrap();
        assert!(rep.is_usable(), "{rep:?}");
    }

    #[test]
    fn table_primitive_is_trapezoid_exact() {
        let f = Nonlinearity::table(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 1.0], None).unwrap();
        // F(1) = 1/2 (triangle), F(2) = 3/2, extension F(3) = 5/2.
        assert_abs_diff_eq!(f.primitive(1.0), 0.5);
        assert_abs_diff_eq!(f.primitive(2.0), 1.5);
        assert_abs_diff_eq!(f.primitive(3.0), 2.5);
        assert_abs_diff_eq!(f.primitive(0.5), 0.125);
        assert_eq!(f.primitive(-1.0), 0.0);
    }

    #[test]
    fn negative_axis_is_flat_zero() {
        let f = Nonlinearity::power(0.5).unwrap();
        assert_eq!(f.f(-2.0), 0.0);
        assert_eq!(f.f(0.0), 0.0);
        assert_eq!(f.primitive(-2.0), 0.0);
    }

    #[test]
    fn coefficient_aggregates() {
        let spec = unit_interval(99);
        let c = Coefficient::constant(spec, 2.0).unwrap();
        assert_eq!(c.ess_sup(), 2.0);
        // Lumped integral of a constant misses one boundary cell: 2(1-h).
        let h = 1.0 / 100.0;
        assert_abs_diff_eq!(c.integral(), 2.0 * (1.0 - h), epsilon = 1e-12);

        let ramp = Coefficient::linear_ramp(spec, 1.0, 2.0).unwrap();
        assert_abs_diff_eq!(ramp.integral(), 1.5, epsilon = 2.0 * h);
        assert!(ramp.ess_sup() < 2.0 && ramp.ess_sup() > 1.9);

        let check = Coefficient::checkerboard(spec, 1.0, 3.0, 4).unwrap();
        assert_eq!(check.ess_sup(), 3.0);
        assert!(check.alpha().min() >= 1.0);
    }

    #[test]
    fn coefficient_rejects_nonpositive_values() {
        let spec = unit_interval(9);
        let g = GridFunction::sample(spec, |x, _| x - 0.5);
        assert!(Coefficient::from_values(g).is_err());
    }

    #[test]
    fn functional_j_of_constant_one() {
        let spec = unit_interval(199);
        let op = build_operators(spec).unwrap();
        let coeff = Coefficient::constant(spec, 1.0).unwrap();
        let f = Nonlinearity::power(0.5).unwrap();
        let u = GridFunction::constant(spec, 1.0);
        // J = 2·Σ h·F(1) = (4/3)(1-h) under lumped quadrature.
        let h = 1.0 / 200.0;
        let j = functional_j(&op, &coeff, &f, &u).unwrap();
        assert_abs_diff_eq!(j, 4.0 / 3.0 * (1.0 - h), epsilon = 1e-12);
    }

    #[test]
    fn energy_of_zero_is_zero_and_nonpositive_parts_cost() {
        let spec = unit_interval(49);
        let op = build_operators(spec).unwrap();
        let coeff = Coefficient::constant(spec, 1.0).unwrap();
        let f = Nonlinearity::power(0.5).unwrap();
        let zero = GridFunction::zeros(spec);
        assert_eq!(frozen_energy(&op, &coeff, &f, 1.0, &zero).unwrap(), 0.0);

        let neg = GridFunction::sample(spec, |x, _| -x * (1.0 - x));
        let e = frozen_energy(&op, &coeff, &f, 1.0, &neg).unwrap();
        assert!(e > 0.0, "J vanishes on nonpositive functions, Φ does not");
    }

    #[test]
    fn supersolution_dominates_the_solution() {
        let spec = unit_interval(127);
        let op = build_operators(spec).unwrap();
        let coeff = Coefficient::constant(spec, 1.0).unwrap();
        let f = Nonlinearity::power(0.5).unwrap();
        let u0 = supersolution_start(&op, &coeff, &f, 1.0).unwrap();
        let sol = solve_frozen(&op, &coeff, &f, 1.0, 1e-11).unwrap();
        for (a, b) in u0.values().iter().zip(sol.u.values()) {
            assert!(a + 1e-12 >= *b, "start must dominate the solution");
        }
        assert!(sol.u.min() > 0.0);
        assert!(sol.energy < 0.0, "zero is not the energy minimum");
        assert!(sol.residual <= 1e-9);
    }

    #[test]
    fn frozen_scaling_law_is_exact() {
        let spec = unit_interval(127);
        let op = build_operators(spec).unwrap();
        let coeff = Coefficient::constant(spec, 1.0).unwrap();
        let f = Nonlinearity::power(0.5).unwrap();
        let s1 = solve_frozen(&op, &coeff, &f, 1.0, 1e-11).unwrap();
        let s2 = solve_frozen(&op, &coeff, &f, 2.0, 1e-11).unwrap();
        // u(2) = 2^{-1/(1-q)} u(1) = u(1)/4 entrywise, Φ ratio 1/16.
        let mut quarter = s1.u.clone();
        for v in quarter.values_mut() {
            *v *= 0.25;
        }
        assert!(s2.u.rel_max_distance(&quarter) <= 1e-9);
        assert_abs_diff_eq!(s2.phi / s1.phi, 1.0 / 16.0, epsilon = 1e-8);

        let scaled = scale_solution(&op, &coeff, &f, &s1, 2.0).unwrap();
        assert!(scaled.u.rel_max_distance(&s2.u) <= 1e-8);
        assert!(scaled.residual <= 1e-9, "residual is recomputed");
        assert_eq!(
            scale_solution(&op, &coeff, &f, &s1, 1.0)
                .unwrap()
                .u
                .rel_max_distance(&s1.u),
            0.0
        );
    }

    #[test]
    fn restarts_land_on_the_same_solution() {
        let spec = unit_interval(99);
        let op = build_operators(spec).unwrap();
        let coeff = Coefficient::constant(spec, 1.0).unwrap();
        let f = Nonlinearity::power(0.5).unwrap();
        let tol = 1e-10;
        let u0 = supersolution_start(&op, &coeff, &f, 1.0).unwrap();
        let mut sols = Vec::new();
        for factor in [1.0, 2.0, 5.0] {
            let mut start = u0.clone();
            for v in start.values_mut() {
                *v *= factor;
            }
            sols.push(solve_frozen_from(&op, &coeff, &f, 1.0, tol, start).unwrap());
        }
        for s in &sols[1..] {
            assert!(s.u.rel_max_distance(&sols[0].u) <= 10.0 * tol);
        }
    }

    #[test]
    fn vanishing_table_collapses_to_degenerate_limit() {
        let spec = unit_interval(49);
        let op = build_operators(spec).unwrap();
        let coeff = Coefficient::constant(spec, 1.0).unwrap();
        // f ≤ 1e-20: the iteration contracts to zero — an invalid
        // nonlinearity must be reported, not returned as a "solution".
        let f = Nonlinearity::table(vec![0.0, 1.0], vec![0.0, 1e-20], None).unwrap();
        match solve_frozen(&op, &coeff, &f, 1.0, 1e-10) {
            Err(Error::DegenerateLimit { .. }) => {}
            other => panic!("expected DegenerateLimit, got {other:?}"),
        }
    }

    #[test]
    fn table_nonlinearity_solves_close_to_its_power_generator() {
        let spec = unit_interval(127);
        let op = build_operators(spec).unwrap();
        let coeff = Coefficient::constant(spec, 1.0).unwrap();
        let power = Nonlinearity::power(0.5).unwrap();
        // Dense tabulation of sqrt on [0, 1]: the table solve should land
        // within the interpolation error of the power solve.
        let n = 4000;
        let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let fs: Vec<f64> = xs.iter().map(|x| x.sqrt()).collect();
        let table = Nonlinearity::table(xs, fs, None).unwrap();
        let a = solve_frozen(&op, &coeff, &power, 1.0, 1e-10).unwrap();
        let b = solve_frozen(&op, &coeff, &table, 1.0, 1e-10).unwrap();
        assert!(a.u.rel_max_distance(&b.u) < 1e-3);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let op = build_operators(unit_interval(9)).unwrap();
        let coeff = Coefficient::constant(unit_interval(19), 1.0).unwrap();
        let f = Nonlinearity::power(0.5).unwrap();
        assert!(matches!(
            solve_frozen(&op, &coeff, &f, 1.0, 1e-10),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
