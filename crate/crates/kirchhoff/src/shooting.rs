//! Independent shooting-method oracle for the frozen 1D problem.
//!
//! Solves `-u'' = α ξ^q` on `(0, L)` with `u(0) = u(L) = 0`, `u > 0`, by
//! bisecting the initial slope of an adaptive Runge–Kutta integration, and
//! returns the Dirichlet energy `Φ(u) = ∫ u'²` accumulated along the orbit.
//! This path shares no code with the grid solver — no stiffness matrix, no
//! monotone iteration — so agreement between the two is a genuine
//! cross-check, not a tautology.

use crate::error::{Error, Result};

/// Result of a shooting solve.
#[derive(Debug, Clone, Copy)]
pub struct ShootingResult {
    /// `Φ(u) = ∫₀^L u'(x)² dx`.
    pub t1: f64,
    /// `max_x u(x)`.
    pub max_u: f64,
    /// The slope `u'(0)` selected by the bisection.
    pub initial_slope: f64,
    /// Accepted integrator steps of the final orbit.
    pub steps: usize,
}

/// Relative tolerance of the adaptive integrator.
const RTOL: f64 = 1e-12;
/// Absolute tolerance of the adaptive integrator.
const ATOL: f64 = 1e-14;

/// Shooting solve of `-u'' = alpha_const · u^q` on `(0, length)`.
///
/// `fine_n` caps the step size at `length / fine_n` (at least 4096), keeping
/// the orbit finely resolved even where the controller would stride.
pub fn oracle_shoot(q: f64, alpha_const: f64, length: f64, fine_n: usize) -> Result<ShootingResult> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidInput(format!(
            "shooting oracle needs q in (0, 1), got {q}"
        )));
    }
    if !(alpha_const > 0.0 && alpha_const.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "shooting oracle needs a positive constant coefficient, got {alpha_const}"
        )));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "shooting oracle needs a positive length, got {length}"
        )));
    }
    if fine_n < 4096 {
        return Err(Error::InvalidInput(format!(
            "shooting oracle needs fineN >= 4096, got {fine_n}"
        )));
    }

    let h_max = length / fine_n as f64;
    let end_u = |s: f64| -> Result<f64> {
        Ok(integrate(q, alpha_const, length, h_max, s)?.0[0])
    };

    // Bracket the slope: too small and the orbit returns to zero early
    // (ending negative), too large and it is still positive at L.
    let mut s_lo = 1e-12;
    let mut u_lo = end_u(s_lo)?;
    for _ in 0..60 {
        if u_lo < 0.0 {
            break;
        }
        s_lo *= 0.5;
        u_lo = end_u(s_lo)?;
    }
    if u_lo >= 0.0 {
        return Err(Error::NoConvergence {
            what: "shooting slope bracket (low side)",
            iterations: 60,
            residual: u_lo,
        });
    }
    let mut s_hi = 1.0;
    let mut u_hi = end_u(s_hi)?;
    for _ in 0..60 {
        if u_hi > 0.0 {
            break;
        }
        s_hi *= 2.0;
        u_hi = end_u(s_hi)?;
    }
    if u_hi <= 0.0 {
        return Err(Error::NoConvergence {
            what: "shooting slope bracket (high side)",
            iterations: 60,
            residual: u_hi,
        });
    }

    for _ in 0..200 {
        let mid = 0.5 * (s_lo + s_hi);
        if mid <= s_lo || mid >= s_hi {
            break;
        }
        let um = end_u(mid)?;
        if um < 0.0 {
            s_lo = mid;
        } else {
            s_hi = mid;
        }
        if (s_hi - s_lo) <= 1e-15 * s_hi {
            break;
        }
    }

    let slope = 0.5 * (s_lo + s_hi);
    let (state, max_u, steps) = integrate(q, alpha_const, length, h_max, slope)?;
    Ok(ShootingResult {
        t1: state[2],
        max_u,
        initial_slope: slope,
        steps,
    })
}

/// Right-hand side of the first-order system `[u, v, w]` with `u' = v`,
/// `v' = -α (u⁺)^q`, `w' = v²` (so `w(L) = Φ(u)`).
fn rhs(q: f64, alpha: f64, y: [f64; 3]) -> [f64; 3] {
    let u_plus = y[0].max(0.0);
    [y[1], -alpha * u_plus.powf(q), y[1] * y[1]]
}

/// Dormand–Prince 5(4) integration from `x = 0` to `length` starting at
/// `[0, slope, 0]`. Returns the final state, the peak of `u`, and the number
/// of accepted steps.
fn integrate(
    q: f64,
    alpha: f64,
    length: f64,
    h_max: f64,
    slope: f64,
) -> Result<([f64; 3], f64, usize)> {
    // Dormand–Prince coefficients; the last stage row doubles as the
    // fifth-order weights (FSAL).
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let mut x = 0.0;
    let mut y = [0.0, slope, 0.0];
    let mut h = h_max;
    let mut max_u: f64 = 0.0;
    let mut steps = 0usize;
    let mut rejected_in_a_row = 0usize;

    while x < length {
        if x + h > length {
            h = length - x;
        }
        let mut k = [[0.0; 3]; 7];
        k[0] = rhs(q, alpha, y);
        for stage in 0..6 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(stage + 1) {
                let a = A[stage][j];
                if a != 0.0 {
                    for c in 0..3 {
                        ys[c] += h * a * kj[c];
                    }
                }
            }
            k[stage + 1] = rhs(q, alpha, ys);
        }
        // Fifth-order solution and embedded-difference error estimate.
        let mut y5 = y;
        let mut y4 = y;
        for (j, kj) in k.iter().enumerate() {
            let b5 = if j < 6 { A[5][j] } else { 0.0 };
            // A[5] holds the 5th-order weights for stages 0..5; stage 6
            // contributes only to the 4th-order solution.
            for c in 0..3 {
                y5[c] += h * b5 * kj[c];
                y4[c] += h * B4[j] * kj[c];
            }
        }
        let mut err: f64 = 0.0;
        for c in 0..3 {
            let scale = ATOL + RTOL * y[c].abs().max(y5[c].abs());
            let e = (y5[c] - y4[c]) / scale;
            err += e * e;
        }
        err = (err / 3.0).sqrt();

        if err <= 1.0 {
            x += h;
            y = y5;
            max_u = max_u.max(y[0]);
            steps += 1;
            rejected_in_a_row = 0;
        } else {
            rejected_in_a_row += 1;
            if rejected_in_a_row > 200 {
                return Err(Error::NoConvergence {
                    what: "adaptive integrator step control",
                    iterations: steps,
                    residual: err,
                });
            }
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = (h * factor).min(h_max);
        if h <= f64::EPSILON * length {
            return Err(Error::NoConvergence {
                what: "adaptive integrator step size underflow",
                iterations: steps,
                residual: err,
            });
        }
        if steps > 100 * 8192 {
            return Err(Error::NoConvergence {
                what: "adaptive integrator step budget",
                iterations: steps,
                residual: err,
            });
        }
    }
    Ok((y, max_u, steps))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values for q = 1/2, α ≡ 1, L = 1, minted from the
    // beta-function closed form of the 1D time map before this module was
    // written (see the golden-value table in crate::reference).
    const T1_HALF: f64 = 8.040_014_232_117_593_8e-4;
    const MAX_U_HALF: f64 = 1.255_634_512_160_476_2e-2;
    const SLOPE_HALF: f64 = 4.331_285_398_739e-2;

    #[test]
    fn matches_the_closed_form_energy() {
        let r = oracle_shoot(0.5, 1.0, 1.0, 4096).unwrap();
        assert!(
            (r.t1 - T1_HALF).abs() / T1_HALF < 1e-10,
            "t1 = {}, expected {}",
            r.t1,
            T1_HALF
        );
        // The peak is sampled at accepted-step endpoints, so it is only
        // quadratically close in the step cap.
        assert!((r.max_u - MAX_U_HALF).abs() / MAX_U_HALF < 1e-6);
        assert!((r.initial_slope - SLOPE_HALF).abs() / SLOPE_HALF < 1e-9);
        assert!(r.steps >= 4096);
    }

    #[test]
    fn coefficient_scaling_is_exact() {
        // t1(c·α) = c^{2/(1-q)}·t1(α): for q = 1/2 and c = 4 the factor is
        // 4^4 = 256.
        let base = oracle_shoot(0.5, 1.0, 1.0, 4096).unwrap();
        let scaled = oracle_shoot(0.5, 4.0, 1.0, 4096).unwrap();
        let ratio = scaled.t1 / base.t1;
        assert!((ratio - 256.0).abs() / 256.0 < 1e-9, "ratio = {ratio}");
    }

    #[test]
    fn length_scaling_is_exact() {
        // t1 on (0, L) = L^{(3+q)/(1-q)}·t1 on (0, 1): for q = 1/2, L = 2
        // the factor is 2^7 = 128.
        let base = oracle_shoot(0.5, 1.0, 1.0, 4096).unwrap();
        let long = oracle_shoot(0.5, 1.0, 2.0, 4096).unwrap();
        let ratio = long.t1 / base.t1;
        assert!((ratio - 128.0).abs() / 128.0 < 1e-9, "ratio = {ratio}");
    }

    #[test]
    fn other_exponents_match_their_closed_forms() {
        // Same beta-function source as T1_HALF.
        let cases = [(0.25, 1.752_409_244_047_524_2e-2), (0.75, 8.256_187_552_457_745e-8)];
        for (q, t1) in cases {
            let r = oracle_shoot(q, 1.0, 1.0, 4096).unwrap();
            assert!(
                (r.t1 - t1).abs() / t1 < 1e-9,
                "q = {q}: t1 = {}, expected {t1}",
                r.t1
            );
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(oracle_shoot(1.5, 1.0, 1.0, 4096).is_err());
        assert!(oracle_shoot(0.5, -1.0, 1.0, 4096).is_err());
        assert!(oracle_shoot(0.5, 1.0, 0.0, 4096).is_err());
        assert!(oracle_shoot(0.5, 1.0, 1.0, 100).is_err());
    }
}
