//! Dirichlet finite-difference operators on an interval or an axis-aligned
//! rectangle.
//!
//! Unknowns are the interior grid nodes; the homogeneous Dirichlet boundary
//! is eliminated. The stiffness matrix `A` carries the usual second-difference
//! stencil scaled so that `u^T A u` equals the Dirichlet energy of the
//! piecewise-linear interpolant of `u` (including the boundary cells), and the
//! mass matrix `M` is diagonal (lumped). All solves are unpreconditioned
//! conjugate gradients on the explicit sparse rows — at the problem sizes this
//! crate targets (<= a few times 10^4 nodes) nothing fancier pays off.

use std::io::Write as IoWrite;

use crate::error::{Error, Result};

/// Domain description plus resolution. `resolution` counts *interior* nodes
/// per axis; an axis of length `L` with `m` interior nodes has mesh width
/// `h = L / (m + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainSpec {
    /// The interval `(0, length)`.
    Interval { length: f64, resolution: usize },
    /// The rectangle `(0, width) x (0, height)` with `nx * ny` interior nodes.
    Rectangle {
        width: f64,
        height: f64,
        nx: usize,
        ny: usize,
    },
}

impl DomainSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDomain(msg));
        match *self {
            DomainSpec::Interval { length, resolution } => {
                if !(length.is_finite() && length > 0.0) {
                    return bad(format!("interval length must be positive, got {length}"));
                }
                if resolution < 2 {
                    return bad(format!("resolution must be >= 2, got {resolution}"));
                }
            }
            DomainSpec::Rectangle {
                width,
                height,
                nx,
                ny,
            } => {
                if !(width.is_finite() && width > 0.0 && height.is_finite() && height > 0.0) {
                    return bad(format!(
                        "rectangle sides must be positive, got {width} x {height}"
                    ));
                }
                if nx < 2 || ny < 2 {
                    return bad(format!("resolution must be >= 2 per axis, got {nx} x {ny}"));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Interval { .. } => 1,
            DomainSpec::Rectangle { .. } => 2,
        }
    }

    pub fn node_count(&self) -> usize {
        match *self {
            DomainSpec::Interval { resolution, .. } => resolution,
            DomainSpec::Rectangle { nx, ny, .. } => nx * ny,
        }
    }

    /// Mesh widths `(hx, hy)`; `hy` is `None` on an interval.
    pub fn mesh_widths(&self) -> (f64, Option<f64>) {
        match *self {
            DomainSpec::Interval { length, resolution } => (length / (resolution + 1) as f64, None),
            DomainSpec::Rectangle {
                width,
                height,
                nx,
                ny,
            } => (
                width / (nx + 1) as f64,
                Some(height / (ny + 1) as f64),
            ),
        }
    }

    /// Coordinates of node `idx`. Nodes are ordered lexicographically by
    /// `(x, y)`: on a rectangle `idx = ix * ny + iy`.
    pub fn coords(&self, idx: usize) -> (f64, Option<f64>) {
        match *self {
            DomainSpec::Interval { .. } => {
                let (h, _) = self.mesh_widths();
                ((idx + 1) as f64 * h, None)
            }
            DomainSpec::Rectangle { ny, .. } => {
                let (hx, hy) = self.mesh_widths();
                let hy = hy.unwrap();
                let ix = idx / ny;
                let iy = idx % ny;
                ((ix + 1) as f64 * hx, Some((iy + 1) as f64 * hy))
            }
        }
    }

    /// First Dirichlet eigenvalue of the continuum Laplacian on this domain.
    pub fn lambda1_continuum(&self) -> f64 {
        use std::f64::consts::PI;
        match *self {
            DomainSpec::Interval { length, .. } => (PI / length).powi(2),
            DomainSpec::Rectangle { width, height, .. } => {
                (PI / width).powi(2) + (PI / height).powi(2)
            }
        }
    }
}

/// Nodal values of a function on the interior nodes of a [`DomainSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: DomainSpec,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(spec: DomainSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.node_count() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} nodal values, got {}",
                spec.node_count(),
                values.len()
            )));
        }
        Ok(GridFunction { spec, values })
    }

    pub fn zeros(spec: DomainSpec) -> Self {
        GridFunction {
            spec,
            values: vec![0.0; spec.node_count()],
        }
    }

    pub fn constant(spec: DomainSpec, v: f64) -> Self {
        GridFunction {
            spec,
            values: vec![v; spec.node_count()],
        }
    }

    /// Sample a closure on the nodes. On an interval the second argument is 0.
    pub fn sample(spec: DomainSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..spec.node_count())
            .map(|i| {
                let (x, y) = spec.coords(i);
                f(x, y.unwrap_or(0.0))
            })
            .collect();
        GridFunction { spec, values }
    }

    pub fn spec(&self) -> DomainSpec {
        self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// Relative max-norm distance to `other`, scaled by `max_abs` of `other`.
    pub fn rel_max_distance(&self, other: &GridFunction) -> f64 {
        let scale = other.max_abs().max(f64::MIN_POSITIVE);
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()))
            / scale
    }

    /// Write `nodeIndex,x[,y],value` rows in node order.
    pub fn write_csv<W: IoWrite>(&self, mut w: W) -> std::io::Result<()> {
        match self.spec.dim() {
            1 => {
                writeln!(w, "nodeIndex,x,value")?;
                for (i, v) in self.values.iter().enumerate() {
                    let (x, _) = self.spec.coords(i);
                    writeln!(w, "{i},{x},{v}")?;
                }
            }
            _ => {
                writeln!(w, "nodeIndex,x,y,value")?;
                for (i, v) in self.values.iter().enumerate() {
                    let (x, y) = self.spec.coords(i);
                    writeln!(w, "{i},{x},{},{v}", y.unwrap())?;
                }
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }
}

/// Assembled Dirichlet operators: sparse symmetric stiffness `A` (CSR) and
/// diagonal lumped mass `M`.
#[derive(Debug, Clone)]
pub struct DiscreteLaplacian {
    spec: DomainSpec,
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
    mass: Vec<f64>,
}

/// Default relative residual tolerance for linear solves.
pub const DEFAULT_LINEAR_TOL: f64 = 1e-10;

/// Build the stiffness/mass pair for a validated domain.
///
/// Interval row stencil: `(-1/h, 2/h, -1/h)`, mass `h`. Rectangle (5-point):
/// diagonal `2(hy/hx + hx/hy)`, x-neighbours `-hy/hx`, y-neighbours `-hx/hy`,
/// mass `hx*hy`.
pub fn build_operators(spec: DomainSpec) -> Result<DiscreteLaplacian> {
    spec.validate()?;
    let n = spec.node_count();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);

    match spec {
        DomainSpec::Interval { resolution: m, .. } => {
            let (h, _) = spec.mesh_widths();
            for i in 0..m {
                if i > 0 {
                    col_idx.push(i - 1);
                    vals.push(-1.0 / h);
                }
                col_idx.push(i);
                vals.push(2.0 / h);
                if i + 1 < m {
                    col_idx.push(i + 1);
                    vals.push(-1.0 / h);
                }
                row_ptr.push(col_idx.len());
            }
            let mass = vec![h; n];
            Ok(DiscreteLaplacian {
                spec,
                n,
                row_ptr,
                col_idx,
                vals,
                mass,
            })
        }
        DomainSpec::Rectangle { nx, ny, .. } => {
            let (hx, hy) = spec.mesh_widths();
            let hy = hy.unwrap();
            let cx = hy / hx;
            let cy = hx / hy;
            for ix in 0..nx {
                for iy in 0..ny {
                    let i = ix * ny + iy;
                    debug_assert_eq!(i + 1, ix * ny + iy + 1);
                    // CSR columns in increasing order.
                    if ix > 0 {
                        col_idx.push(i - ny);
                        vals.push(-cx);
                    }
                    if iy > 0 {
                        col_idx.push(i - 1);
                        vals.push(-cy);
                    }
                    col_idx.push(i);
                    vals.push(2.0 * (cx + cy));
                    if iy + 1 < ny {
                        col_idx.push(i + 1);
                        vals.push(-cy);
                    }
                    if ix + 1 < nx {
                        col_idx.push(i + ny);
                        vals.push(-cx);
                    }
                    row_ptr.push(col_idx.len());
                }
            }
            let mass = vec![hx * hy; n];
            Ok(DiscreteLaplacian {
                spec,
                n,
                row_ptr,
                col_idx,
                vals,
                mass,
            })
        }
    }
}

impl DiscreteLaplacian {
    pub fn spec(&self) -> DomainSpec {
        self.spec
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Diagonal of the lumped mass matrix.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Nonzero entries `(column, value)` of stiffness row `i`.
    pub fn stiffness_row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi]
            .iter()
            .cloned()
            .zip(self.vals[lo..hi].iter().cloned())
    }

    /// `out = A u`.
    pub fn apply_stiffness(&self, u: &[f64], out: &mut [f64]) {
        debug_assert_eq!(u.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * u[self.col_idx[k]];
            }
            out[i] = acc;
        }
    }

    fn check_spec(&self, g: &GridFunction) -> Result<()> {
        if g.spec() != self.spec {
            return Err(Error::DimensionMismatch(
                "grid function was sampled on a different domain".into(),
            ));
        }
        Ok(())
    }

    /// Dirichlet energy `u^T A u` of the piecewise-linear interpolant.
    pub fn dirichlet_energy(&self, u: &GridFunction) -> Result<f64> {
        self.check_spec(u)?;
        let v = u.values();
        let mut acc = 0.0;
        for i in 0..self.n {
            let mut row = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                row += self.vals[k] * v[self.col_idx[k]];
            }
            acc += v[i] * row;
        }
        Ok(acc)
    }

    /// Solve `A u = M g` by conjugate gradients with relative residual
    /// tolerance `tol` (Euclidean norm against `||M g||`).
    pub fn solve_spd(&self, g: &GridFunction, tol: f64) -> Result<GridFunction> {
        self.check_spec(g)?;
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "linear tolerance must be positive, got {tol}"
            )));
        }
        let b: Vec<f64> = g
            .values()
            .iter()
            .zip(&self.mass)
            .map(|(g, m)| g * m)
            .collect();
        let x = self.cg(&b, tol)?;
        Ok(GridFunction {
            spec: self.spec,
            values: x,
        })
    }

    fn cg(&self, b: &[f64], tol: f64) -> Result<Vec<f64>> {
        let n = self.n;
        let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nb == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        let mut p = r.clone();
        let mut ap = vec![0.0; n];
        let mut rs: f64 = r.iter().map(|v| v * v).sum();
        let max_iter = 50 * n;
        for _it in 0..max_iter {
            if rs.sqrt() <= tol * nb {
                return Ok(x);
            }
            self.apply_stiffness(&p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            let alpha = rs / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rs_new: f64 = r.iter().map(|v| v * v).sum();
            let beta = rs_new / rs;
            rs = rs_new;
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
            }
        }
        if rs.sqrt() <= tol * nb {
            return Ok(x);
        }
        Err(Error::NoConvergence {
            what: "conjugate gradient",
            iterations: max_iter,
            residual: rs.sqrt() / nb,
        })
    }

    /// Smallest Dirichlet eigenvalue and its positive, M-normalized
    /// eigenvector, by inverse power iteration (stops when the Rayleigh
    /// quotient is stationary to `tol`).
    pub fn principal_eigenvalue(&self, tol: f64) -> Result<(f64, GridFunction)> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::InvalidInput(format!(
                "eigenvalue tolerance must be positive, got {tol}"
            )));
        }
        let inner_tol = (tol * 1e-2).max(1e-14);
        let n = self.n;
        let mut x = vec![1.0; n];
        self.m_normalize(&mut x);
        let mut lam_prev = f64::INFINITY;
        let max_outer = 1000;
        for it in 0..max_outer {
            let b: Vec<f64> = x.iter().zip(&self.mass).map(|(v, m)| v * m).collect();
            let mut y = self.cg(&b, inner_tol)?;
            self.m_normalize(&mut y);
            let mut ay = vec![0.0; n];
            self.apply_stiffness(&y, &mut ay);
            let lam: f64 = y.iter().zip(&ay).map(|(a, b)| a * b).sum();
            x = y;
            if (lam - lam_prev).abs() <= tol * lam.abs().max(1.0) {
                // Orient positively; the iteration preserves sign structure,
                // so with a positive start the vector is already one-signed.
                let flip = x.iter().sum::<f64>() < 0.0;
                if flip {
                    for v in &mut x {
                        *v = -*v;
                    }
                }
                let _ = it;
                return Ok((
                    lam,
                    GridFunction {
                        spec: self.spec,
                        values: x,
                    },
                ));
            }
            lam_prev = lam;
        }
        Err(Error::NoConvergence {
            what: "inverse power iteration",
            iterations: max_outer,
            residual: f64::NAN,
        })
    }

    fn m_normalize(&self, x: &mut [f64]) {
        let nm: f64 = x
            .iter()
            .zip(&self.mass)
            .map(|(v, m)| v * v * m)
            .sum::<f64>()
            .sqrt();
        if nm > 0.0 {
            for v in x.iter_mut() {
                *v /= nm;
            }
        }
    }
}
