//! Monotone branches of the Kirchhoff function `K` and their inverses.
//!
//! A branch is an open interval `I = (tLo, tHi)` on which `K` is positive and
//! strictly increasing. The solver only ever sees `K` through a branch: its
//! forward values, the inverse `lam -> t` (extended by `t = tLo` at
//! `lam = 0`), and the running integral of the inverse used by the auxiliary
//! functional.

use serde::Serialize;

use crate::error::{Error, RangeSide, Result};

/// Sampled sup of `K` beyond which a branch is reported as numerically
/// unbounded above.
pub const RANGE_SUP_THRESHOLD: f64 = 1e6;

/// Largest table starting value `K(t_0)` for which the inverse integral is
/// extended down to 0 (the missing piece is bounded by `tLo * K(t_0)`).
const TABLE_LOW_EXTENSION: f64 = 1e-6;

/// Relative tolerance of the adaptive Simpson quadrature for table branches.
const QUAD_REL_TOL: f64 = 1e-8;

/// Bisection width tolerance (relative, on t) for the closed-form families.
const INVERSE_WIDTH_TOL: f64 = 1e-12;

/// Strictly increasing table `(t_i, K_i)` defining a piecewise-linear branch.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchTable {
    ts: Vec<f64>,
    ks: Vec<f64>,
}

impl BranchTable {
    pub fn new(ts: Vec<f64>, ks: Vec<f64>) -> Result<Self> {
        if ts.len() != ks.len() {
            return Err(Error::InvalidInput(format!(
                "table columns differ in length: {} vs {}",
                ts.len(),
                ks.len()
            )));
        }
        if ts.len() < 2 {
            return Err(Error::InvalidInput(
                "a branch table needs at least two rows".into(),
            ));
        }
        for w in ts.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidInput(format!(
                    "table abscissae must increase strictly, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for (i, &k) in ks.iter().enumerate() {
            if !k.is_finite() || k <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "table value K[{i}] = {k} must be finite and positive"
                )));
            }
        }
        for w in ks.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidInput(format!(
                    "table values must increase strictly, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(BranchTable { ts, ks })
    }

    fn eval(&self, t: f64) -> f64 {
        // t is interior: locate the segment and interpolate linearly.
        let i = match self.ts.partition_point(|&x| x <= t) {
            0 => 0,
            p => (p - 1).min(self.ts.len() - 2),
        };
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let (k0, k1) = (self.ks[i], self.ks[i + 1]);
        k0 + (k1 - k0) * (t - t0) / (t1 - t0)
    }

    fn inverse(&self, lam: f64) -> Result<f64> {
        let k_lo = self.ks[0];
        let k_hi = *self.ks.last().unwrap();
        if lam < k_lo {
            return Err(Error::OutOfRange {
                lam,
                side: RangeSide::Below,
            });
        }
        if lam > k_hi {
            return Err(Error::OutOfRange {
                lam,
                side: RangeSide::Above,
            });
        }
        let i = match self.ks.partition_point(|&k| k <= lam) {
            0 => 0,
            p => (p - 1).min(self.ks.len() - 2),
        };
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let (k0, k1) = (self.ks[i], self.ks[i + 1]);
        Ok(t0 + (t1 - t0) * (lam - k0) / (k1 - k0))
    }
}

/// The supported branch families.
#[derive(Debug, Clone, PartialEq)]
pub enum BranchFamily {
    /// `tan(t)` on `((k-1)pi, (k-1)pi + pi/2)`, `k >= 1`.
    Tan { k: u32 },
    /// `log(t)` on `(1, inf)`.
    Log,
    /// `(c - t)^{-s}` on `(0, c)`; increasing but bounded below by `c^{-s}`.
    SingularPower { c: f64, s: f64 },
    /// `a t + b` on `(0, inf)`.
    Affine { a: f64, b: f64 },
    /// Piecewise-linear interpolation of a strictly increasing table.
    Table(BranchTable),
}

/// A monotone branch of the Kirchhoff function.
#[derive(Debug, Clone, PartialEq)]
pub struct KirchhoffBranch {
    family: BranchFamily,
    t_lo: f64,
    t_hi: f64,
    range_full: bool,
}

/// Diagnostics from sampling a branch.
///
/// `range_full` echoes the analytic flag of the family: whether
/// `K(I) = (0, inf)` holds exactly. It is deliberately not inferred from the
/// sampled sup alone — `log` attains any positive value, yet exceeds the
/// reporting threshold only at `t = e^{1e6}`, far outside f64. The sampled
/// facts (`range_low`, `range_high`, the threshold flag) are reported next to
/// it so the two can be compared.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BranchValidationReport {
    pub monotone_ok: bool,
    pub positive_ok: bool,
    /// Smallest sampled value of `K` (taken near `tLo`).
    pub range_low: f64,
    /// Largest sampled value of `K`.
    pub range_high: f64,
    /// Whether the sampled sup exceeds [`RANGE_SUP_THRESHOLD`].
    pub range_high_unbounded: bool,
    /// Analytic full-range flag of the family.
    pub range_full: bool,
    pub samples: usize,
}

impl BranchValidationReport {
    /// The hypotheses the solver actually needs: strict increase and
    /// positivity on the sampled grid.
    pub fn is_usable(&self) -> bool {
        self.monotone_ok && self.positive_ok
    }
}

impl KirchhoffBranch {
    /// Branch `k` of the tangent: `tan` restricted to
    /// `((k-1)pi, (k-1)pi + pi/2)`.
    pub fn tan(k: u32) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidInput("tan branch index starts at 1".into()));
        }
        let shift = (k - 1) as f64 * std::f64::consts::PI;
        Ok(KirchhoffBranch {
            family: BranchFamily::Tan { k },
            t_lo: shift,
            t_hi: shift + std::f64::consts::FRAC_PI_2,
            range_full: true,
        })
    }

    pub fn log() -> Self {
        KirchhoffBranch {
            family: BranchFamily::Log,
            t_lo: 1.0,
            t_hi: f64::INFINITY,
            range_full: true,
        }
    }

    pub fn singular_power(c: f64, s: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0 && s.is_finite() && s > 0.0) {
            return Err(Error::InvalidInput(format!(
                "singular power needs c > 0 and s > 0, got c = {c}, s = {s}"
            )));
        }
        Ok(KirchhoffBranch {
            family: BranchFamily::SingularPower { c, s },
            t_lo: 0.0,
            t_hi: c,
            // inf K = c^{-s} > 0: the range misses (0, c^{-s}].
            range_full: false,
        })
    }

    pub fn affine(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0 && b.is_finite() && b >= 0.0) || (a == 0.0 && b == 0.0) {
            return Err(Error::InvalidInput(format!(
                "affine branch needs a >= 0, b >= 0, not both zero, got a = {a}, b = {b}"
            )));
        }
        Ok(KirchhoffBranch {
            family: BranchFamily::Affine { a, b },
            t_lo: 0.0,
            t_hi: f64::INFINITY,
            range_full: a > 0.0 && b == 0.0,
        })
    }

    pub fn table(ts: Vec<f64>, ks: Vec<f64>) -> Result<Self> {
        let table = BranchTable::new(ts, ks)?;
        let t_lo = table.ts[0];
        let t_hi = *table.ts.last().unwrap();
        Ok(KirchhoffBranch {
            family: BranchFamily::Table(table),
            t_lo,
            t_hi,
            // A finite table attains a compact range; never full.
            range_full: false,
        })
    }

    pub fn family(&self) -> &BranchFamily {
        &self.family
    }

    /// The open localization interval `(tLo, tHi)`; `tHi` may be infinite.
    pub fn interval(&self) -> (f64, f64) {
        (self.t_lo, self.t_hi)
    }

    /// Whether `K(I) = (0, inf)` holds exactly for this family.
    pub fn range_full(&self) -> bool {
        self.range_full
    }

    /// Short label for reports and survey rows. Comma-free on purpose:
    /// labels land in survey.csv cells unquoted.
    pub fn label(&self) -> String {
        match &self.family {
            BranchFamily::Tan { k } => format!("tan(k={k})"),
            BranchFamily::Log => "log".into(),
            BranchFamily::SingularPower { c, s } => format!("singular-power(c={c:e} s={s})"),
            BranchFamily::Affine { a, b } => format!("affine(a={a} b={b})"),
            BranchFamily::Table(t) => format!("table(n={})", t.ts.len()),
        }
    }

    /// `K(t)` for `t` strictly inside the branch interval.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > self.t_lo && t < self.t_hi) || !t.is_finite() {
            return Err(Error::OutOfBranch {
                t,
                lo: self.t_lo,
                hi: self.t_hi,
            });
        }
        Ok(self.eval_unchecked(t))
    }

    fn eval_unchecked(&self, t: f64) -> f64 {
        match &self.family {
            BranchFamily::Tan { k } => {
                let shift = (*k - 1) as f64 * std::f64::consts::PI;
                (t - shift).tan()
            }
            BranchFamily::Log => t.ln(),
            BranchFamily::SingularPower { c, s } => (c - t).powf(-s),
            BranchFamily::Affine { a, b } => a * t + b,
            BranchFamily::Table(table) => table.eval(t),
        }
    }

    /// The value `t` in the closure of `I` with `K(t) = lam`.
    ///
    /// `lam = 0` returns `tLo` exactly (the continuous extension of the
    /// inverse at the bottom of a full-range branch). For `lam > 0` the
    /// inverse is found by bisection, stopping once
    /// `|K(t) - lam| <= tol * max(1, lam)`; when one ulp of `t` moves `K` by
    /// more than that (tan close to its asymptote, `lam >~ 1e4`), the
    /// ulp-exact `t` is returned instead — f64 admits nothing tighter.
    /// Table branches invert their segments directly.
    pub fn inverse(&self, lam: f64, tol: f64) -> Result<f64> {
        if !(lam.is_finite() && lam >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "inverse needs lam >= 0, got {lam}"
            )));
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "inverse tolerance must be positive, got {tol}"
            )));
        }
        if lam == 0.0 {
            return Ok(self.t_lo);
        }
        if let BranchFamily::Table(table) = &self.family {
            return table.inverse(lam);
        }

        // Lower anchor: a point of I with K <= lam.
        let width = if self.t_hi.is_finite() {
            self.t_hi - self.t_lo
        } else {
            self.t_lo.abs().max(1.0)
        };
        let mut a = None;
        let mut step = width * 0.5;
        for _ in 0..1100 {
            let cand = self.t_lo + step;
            if cand > self.t_lo && cand < self.t_hi && self.eval_unchecked(cand) <= lam {
                a = Some(cand);
                break;
            }
            step *= 0.5;
            if self.t_lo + step == self.t_lo {
                break;
            }
        }
        let Some(mut a) = a else {
            return Err(Error::OutOfRange {
                lam,
                side: RangeSide::Below,
            });
        };

        // Upper anchor: a point with K >= lam.
        let mut b = None;
        if self.t_hi.is_finite() {
            let mut step = (self.t_hi - self.t_lo) * 0.5;
            for _ in 0..1100 {
                let cand = self.t_hi - step;
                if cand > a && self.eval_unchecked(cand) >= lam {
                    b = Some(cand);
                    break;
                }
                step *= 0.5;
                if self.t_hi - step == self.t_hi {
                    break;
                }
            }
        } else {
            let mut cand = self.t_lo + width;
            for _ in 0..1100 {
                if self.eval_unchecked(cand) >= lam {
                    b = Some(cand);
                    break;
                }
                cand = self.t_lo + (cand - self.t_lo) * 2.0;
                if !cand.is_finite() {
                    break;
                }
            }
        }
        let Some(mut b) = b else {
            return Err(Error::OutOfRange {
                lam,
                side: RangeSide::Above,
            });
        };

        let accept = tol * lam.max(1.0);
        let mut best = a;
        let mut best_res = (self.eval_unchecked(a) - lam).abs();
        for _ in 0..400 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break; // interval collapsed to adjacent floats
            }
            let km = self.eval_unchecked(mid);
            let res = (km - lam).abs();
            if res < best_res {
                best = mid;
                best_res = res;
            }
            if res <= accept && (b - a) <= INVERSE_WIDTH_TOL * mid.abs().max(1.0) {
                return Ok(mid);
            }
            if res <= accept && best_res <= accept {
                return Ok(best);
            }
            if km < lam {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(best)
    }

    /// Sample the branch on a geometric-plus-uniform grid and report the
    /// monotonicity/positivity/range diagnostics. `samples >= 16`.
    pub fn validate(&self, samples: usize) -> Result<BranchValidationReport> {
        if samples < 16 {
            return Err(Error::InvalidInput(format!(
                "validation needs at least 16 samples, got {samples}"
            )));
        }
        let mut ts: Vec<f64> = Vec::with_capacity(samples + 2);
        if self.t_hi.is_finite() {
            let span = self.t_hi - self.t_lo;
            let n_geo = samples / 4;
            let r = 1e-12f64.powf(1.0 / n_geo as f64);
            let mut f = 0.5;
            for _ in 1..=n_geo {
                ts.push(self.t_lo + span * f);
                ts.push(self.t_hi - span * f);
                f *= r;
            }
            let n_uni = samples - 2 * n_geo;
            for i in 0..n_uni {
                ts.push(self.t_lo + span * (i as f64 + 0.5) / n_uni as f64);
            }
        } else {
            let w = self.t_lo.abs().max(1.0);
            let n_geo = samples / 2;
            let r = 1e-12f64.powf(1.0 / n_geo as f64);
            let mut f = 0.5;
            for _ in 1..=n_geo {
                ts.push(self.t_lo + w * f);
                f *= r;
            }
            let n_up = samples - n_geo;
            let mut step = w;
            for _ in 0..n_up {
                ts.push(self.t_lo + step);
                step *= 2.0;
                if step > 1e12 * w {
                    break;
                }
            }
        }
        ts.retain(|t| *t > self.t_lo && *t < self.t_hi);
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup();

        let ks: Vec<f64> = ts.iter().map(|&t| self.eval_unchecked(t)).collect();
        let monotone_ok = ks.windows(2).all(|w| w[1] > w[0]);
        let positive_ok = ks.iter().all(|&k| k.is_finite() && k > 0.0);
        let range_low = ks.iter().cloned().fold(f64::INFINITY, f64::min);
        let range_high = ks.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(BranchValidationReport {
            monotone_ok,
            positive_ok,
            range_low,
            range_high,
            range_high_unbounded: range_high >= RANGE_SUP_THRESHOLD,
            range_full: self.range_full,
            samples: ts.len(),
        })
    }

    /// `Q(lam) = int_0^lam inverse(s) ds`, the running integral of the
    /// inverse used by the auxiliary functional.
    ///
    /// Closed forms for the analytic families (for tan branch `k`:
    /// `(k-1)pi lam + lam atan(lam) - ln(1 + lam^2)/2`); adaptive Simpson for
    /// tables whose range starts low enough to extend continuously to 0.
    /// Families whose inverse is genuinely undefined near 0 (singular power,
    /// affine with `b > 0`, high-starting tables) report `OutOfRange`.
    pub fn integral_of_inverse(&self, lam: f64) -> Result<f64> {
        if !(lam.is_finite() && lam >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "integral needs lam >= 0, got {lam}"
            )));
        }
        if lam == 0.0 {
            return Ok(0.0);
        }
        match &self.family {
            BranchFamily::Tan { k } => {
                let shift = (*k - 1) as f64 * std::f64::consts::PI;
                Ok(shift * lam + lam * lam.atan() - 0.5 * (lam * lam).ln_1p())
            }
            BranchFamily::Log => {
                if lam > 709.0 {
                    // e^lam overflows; the inverse is unreachable in f64.
                    Err(Error::OutOfRange {
                        lam,
                        side: RangeSide::Above,
                    })
                } else {
                    Ok(lam.exp_m1())
                }
            }
            BranchFamily::Affine { a, b } => {
                if *b == 0.0 && *a > 0.0 {
                    Ok(lam * lam / (2.0 * a))
                } else {
                    // inverse undefined on (0, b): the integral from 0 does
                    // not exist.
                    Err(Error::OutOfRange {
                        lam,
                        side: RangeSide::Below,
                    })
                }
            }
            BranchFamily::SingularPower { .. } => Err(Error::OutOfRange {
                lam,
                side: RangeSide::Below,
            }),
            BranchFamily::Table(table) => {
                let k0 = table.ks[0];
                let k_hi = *table.ks.last().unwrap();
                if k0 > TABLE_LOW_EXTENSION {
                    return Err(Error::OutOfRange {
                        lam,
                        side: RangeSide::Below,
                    });
                }
                if lam > k_hi {
                    return Err(Error::OutOfRange {
                        lam,
                        side: RangeSide::Above,
                    });
                }
                // Stub over [0, k0] where the inverse is extended by tLo,
                // then adaptive Simpson over the attained part.
                let cut = lam.min(k0);
                let mut q = self.t_lo * cut;
                if lam > k0 {
                    q += adaptive_simpson(|x| table.inverse(x).unwrap(), k0, lam, QUAD_REL_TOL)?;
                }
                Ok(q)
            }
        }
    }
}

/// Adaptive Simpson quadrature with relative tolerance `rel_tol`.
fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1)
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    let tol = rel_tol * whole.abs().max(f64::MIN_POSITIVE);
    Ok(rec(&f, a, b, fa, fm, fb, whole, tol, 30))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn intervals_per_family() {
        assert_eq!(KirchhoffBranch::tan(1).unwrap().interval(), (0.0, FRAC_PI_2));
        let (lo, hi) = KirchhoffBranch::tan(2).unwrap().interval();
        assert_abs_diff_eq!(lo, PI);
        assert_abs_diff_eq!(hi, PI + FRAC_PI_2);
        assert_eq!(KirchhoffBranch::log().interval(), (1.0, f64::INFINITY));
        assert_eq!(
            KirchhoffBranch::singular_power(2.0, 1.0).unwrap().interval(),
            (0.0, 2.0)
        );
        assert_eq!(
            KirchhoffBranch::affine(1.0, 0.0).unwrap().interval(),
            (0.0, f64::INFINITY)
        );
    }

    #[test]
    fn eval_outside_interval_is_rejected() {
        let b = KirchhoffBranch::tan(1).unwrap();
        assert!(matches!(b.eval(2.0), Err(Error::OutOfBranch { .. })));
        assert!(matches!(b.eval(0.0), Err(Error::OutOfBranch { .. })));
        assert_abs_diff_eq!(b.eval(FRAC_PI_4).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn tan_branches_shift_by_pi() {
        let b2 = KirchhoffBranch::tan(2).unwrap();
        assert_abs_diff_eq!(b2.eval(PI + FRAC_PI_4).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn inverse_closed_forms() {
        let tan1 = KirchhoffBranch::tan(1).unwrap();
        let t = tan1.inverse(1.0, 1e-12).unwrap();
        assert_abs_diff_eq!(t, FRAC_PI_4, epsilon = 1e-10);

        let log = KirchhoffBranch::log();
        let t = log.inverse(2.0, 1e-12).unwrap();
        assert_abs_diff_eq!(t, std::f64::consts::E * std::f64::consts::E, epsilon = 1e-8);

        // K = 2t + 1 on (0, inf): K(2) = 5.
        let aff = KirchhoffBranch::affine(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(aff.inverse(5.0, 1e-12).unwrap(), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn inverse_at_zero_is_the_left_endpoint() {
        assert_eq!(KirchhoffBranch::log().inverse(0.0, 1e-10).unwrap(), 1.0);
        assert_eq!(
            KirchhoffBranch::singular_power(2.0, 1.0)
                .unwrap()
                .inverse(0.0, 1e-10)
                .unwrap(),
            0.0
        );
        let t2 = KirchhoffBranch::tan(2).unwrap().inverse(0.0, 1e-10).unwrap();
        assert_eq!(t2, PI);
    }

    #[test]
    fn inverse_below_attained_range_errors() {
        // K(t) = (2 - t)^{-1} has range (1/2, inf): 0.3 is not attained.
        let b = KirchhoffBranch::singular_power(2.0, 1.0).unwrap();
        match b.inverse(0.3, 1e-10) {
            Err(Error::OutOfRange { side, .. }) => assert_eq!(side, RangeSide::Below),
            other => panic!("expected OutOfRange, got {other:?}"),
        }
        // Affine with b > 0: values below b are not attained.
        let aff = KirchhoffBranch::affine(2.0, 1.0).unwrap();
        assert!(matches!(
            aff.inverse(0.5, 1e-10),
            Err(Error::OutOfRange {
                side: RangeSide::Below,
                ..
            })
        ));
    }

    #[test]
    fn inverse_roundtrip_singular() {
        let b = KirchhoffBranch::singular_power(2.0, 1.0).unwrap();
        let t = b.inverse(4.0, 1e-12).unwrap();
        // (2 - t)^{-1} = 4 => t = 1.75.
        assert_abs_diff_eq!(t, 1.75, epsilon = 1e-9);
    }

    #[test]
    fn validation_flags_per_family() {
        let rep = KirchhoffBranch::tan(1).unwrap().validate(64).unwrap();
        assert!(rep.monotone_ok && rep.positive_ok && rep.range_full);
        assert!(rep.range_high_unbounded);
        assert!(rep.range_low < 1e-6);

        let rep = KirchhoffBranch::singular_power(2.0, 1.0)
            .unwrap()
            .validate(64)
            .unwrap();
        assert!(rep.monotone_ok && rep.positive_ok);
        assert!(!rep.range_full);
        assert!((rep.range_low - 0.5).abs() < 0.05, "inf K = 1/2");

        let rep = KirchhoffBranch::affine(1.0, 0.0).unwrap().validate(64).unwrap();
        assert!(rep.range_full && rep.monotone_ok);

        // Constant branch: not strictly increasing.
        let rep = KirchhoffBranch::affine(0.0, 1.0).unwrap().validate(64).unwrap();
        assert!(!rep.monotone_ok);

        let rep = KirchhoffBranch::log().validate(64).unwrap();
        assert!(rep.monotone_ok && rep.positive_ok && rep.range_full);
        assert!(rep.range_low < 1e-6);
    }

    #[test]
    fn validation_needs_enough_samples() {
        assert!(KirchhoffBranch::log().validate(8).is_err());
    }

    #[test]
    fn integral_closed_forms() {
        // int_0^1 arctan = pi/4 - ln(2)/2.
        let q = KirchhoffBranch::tan(1).unwrap().integral_of_inverse(1.0).unwrap();
        assert_abs_diff_eq!(q, FRAC_PI_4 - 0.5 * 2.0f64.ln(), epsilon = 1e-14);

        // Shifted branch adds (k-1)pi * lam.
        let q2 = KirchhoffBranch::tan(2).unwrap().integral_of_inverse(1.0).unwrap();
        assert_abs_diff_eq!(q2, q + PI, epsilon = 1e-12);

        let ql = KirchhoffBranch::log().integral_of_inverse(1.0).unwrap();
        assert_abs_diff_eq!(ql, std::f64::consts::E - 1.0, epsilon = 1e-14);

        let qa = KirchhoffBranch::affine(2.0, 0.0)
            .unwrap()
            .integral_of_inverse(3.0)
            .unwrap();
        assert_abs_diff_eq!(qa, 9.0 / 4.0, epsilon = 1e-14);
    }

    #[test]
    fn integral_undefined_families_error() {
        assert!(matches!(
            KirchhoffBranch::singular_power(2.0, 1.0)
                .unwrap()
                .integral_of_inverse(1.0),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            KirchhoffBranch::affine(1.0, 0.5)
                .unwrap()
                .integral_of_inverse(1.0),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn table_branch_tracks_its_generator() {
        // Tabulate t -> t^2 on (0, 2]: low-starting, so the inverse integral
        // extends to 0.
        let n = 2000;
        let ts: Vec<f64> = (1..=n).map(|i| 2.0 * i as f64 / n as f64).collect();
        let ks: Vec<f64> = ts.iter().map(|t| t * t).collect();
        let b = KirchhoffBranch::table(ts, ks).unwrap();
        assert!(!b.range_full());

        let t = b.inverse(1.0, 1e-10).unwrap();
        assert_abs_diff_eq!(t, 1.0, epsilon = 1e-4);

        // int_0^lam sqrt(s) ds = (2/3) lam^{3/2}; table error dominates.
        let q = b.integral_of_inverse(1.0).unwrap();
        assert_abs_diff_eq!(q, 2.0 / 3.0, epsilon = 1e-3);
    }

    #[test]
    fn table_rejects_non_monotone_data() {
        assert!(KirchhoffBranch::table(vec![0.0, 1.0, 2.0], vec![1.0, 3.0, 2.0]).is_err());
        assert!(KirchhoffBranch::table(vec![0.0, 0.0, 2.0], vec![1.0, 2.0, 3.0]).is_err());
        assert!(KirchhoffBranch::table(vec![0.0, 1.0], vec![-1.0, 2.0]).is_err());
    }

    #[test]
    fn steep_inverse_is_ulp_exact() {
        // Near the asymptote one ulp of t moves K by more than any sane
        // tolerance; the returned t must still round-trip as well as f64
        // allows (relative K error at the 1e-12 level for lam = 1e6).
        let b = KirchhoffBranch::tan(1).unwrap();
        let lam = 1e6;
        let t = b.inverse(lam, 1e-12).unwrap();
        let k = b.eval(t).unwrap();
        assert!((k - lam).abs() / lam < 1e-9);
    }
}
