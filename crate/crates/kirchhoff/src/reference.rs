//! Frozen reference constants for the unit-coefficient power problem on an
//! interval.
//!
//! For `-u'' = u^q` on `(0, 1)` with zero boundary values, the time map of
//! the planar Hamiltonian system gives the positive solution in closed
//! form: with `C_q = B(1/(q+1), 1/2)/(q+1)` (`B` the Euler beta function),
//! the peak is `m = (2(q+1)·C_q²)^{-1/(1-q)}` and the Dirichlet energy is
//! `t₁ = 2·m^{q+1}/(q+3)`. The numbers below were evaluated in 50-digit
//! arithmetic from that formula and frozen; both the shooting oracle and
//! the grid solver are validated against them, never the other way around.
//!
//! Scalings: multiplying the coefficient by `a` multiplies `t₁` by
//! `a^{2/(1-q)}`; stretching the interval to length `L` multiplies it by
//! `L^{(3+q)/(1-q)}`.

/// Closed-form facts about the unit problem at one exponent.
#[derive(Debug, Clone, Copy)]
pub struct PowerReference {
    pub q: f64,
    /// `max u` of the positive solution.
    pub peak: f64,
    /// `Φ(u) = ∫ u'²`.
    pub energy: f64,
}

/// The exponents exercised throughout the test matrix.
pub const UNIT_POWER_REFERENCES: [PowerReference; 3] = [
    PowerReference {
        q: 0.25,
        peak: 5.802_178_969_752_415_3e-2,
        energy: 1.752_409_244_047_524_2e-2,
    },
    PowerReference {
        q: 0.5,
        peak: 1.255_634_512_160_476_2e-2,
        energy: 8.040_014_232_117_593_8e-4,
    },
    PowerReference {
        q: 0.75,
        peak: 1.283_648_696_362_127_2e-4,
        energy: 8.256_187_552_457_745e-8,
    },
];

/// `Φ(u₁)` for `-u'' = u^q` on `(0, 1)`, if `q` is one of the tabulated
/// exponents.
pub fn unit_energy(q: f64) -> Option<f64> {
    UNIT_POWER_REFERENCES
        .iter()
        .find(|r| r.q == q)
        .map(|r| r.energy)
}

/// `Φ(u₁)` for `-u'' = a·u^q` on `(0, L)` by the exact similarity
/// transforms, if `q` is tabulated.
pub fn scaled_energy(q: f64, alpha_const: f64, length: f64) -> Option<f64> {
    unit_energy(q).map(|t1| {
        alpha_const.powf(2.0 / (1.0 - q)) * length.powf((3.0 + q) / (1.0 - q)) * t1
    })
}
