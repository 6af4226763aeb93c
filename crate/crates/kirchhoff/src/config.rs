//! Run configuration: a single TOML file describing the domain, data,
//! branch, solver route, tolerances, and output location.
//!
//! The schema is deliberately flat — one table per concern — so that a config
//! file reads top to bottom like the problem statement it encodes. Unknown
//! keys are rejected everywhere: a typo should fail the parse, not silently
//! fall back to a default. See `docs/config.md` for the documented schema and
//! worked examples.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fixpoint::{Route, SolveOptions};
use crate::grid::{DomainSpec, GridFunction};
use crate::kfun::KirchhoffBranch;
use crate::sublinear::{Coefficient, Nonlinearity};

/// Parsed and hash-stamped configuration file.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    /// The deserialized configuration.
    pub run: RunConfig,
    /// Hex SHA-256 of the raw file bytes, stamped into the report.
    pub hash: String,
    /// Directory of the config file; relative data paths resolve against it.
    pub base_dir: PathBuf,
}

/// Top-level configuration. Every section except the four problem-defining
/// ones (`domain`, `alpha`, `nonlinearity`, `branch`) has full defaults.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainConfig,
    pub alpha: AlphaConfig,
    pub nonlinearity: NonlinearityConfig,
    pub branch: BranchConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub survey: SurveyConfig,
}

/// `[domain]` — the computational domain and its grid resolution.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainConfig {
    /// `(0, length)` with `resolution` interior nodes.
    Interval { length: f64, resolution: usize },
    /// `(0, width) × (0, height)` with `nx × ny` interior nodes.
    Rectangle {
        width: f64,
        height: f64,
        nx: usize,
        ny: usize,
    },
}

/// `[alpha]` — the weight in front of the nonlinearity.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlphaConfig {
    /// `α ≡ value`.
    Constant { value: f64 },
    /// `α(x) = lo + (hi − lo)·x/Lx`, graded along the first axis.
    LinearRamp { lo: f64, hi: f64 },
    /// Alternating `low`/`high` tiles, `cells` per axis.
    Checkerboard { low: f64, high: f64, cells: u32 },
    /// Nodal values from a CSV file, one row per grid node in grid order;
    /// the last comma-separated field of each row is the value.
    Csv { path: PathBuf },
}

/// `[nonlinearity]` — the sublinear right-hand side `f`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NonlinearityConfig {
    /// `f(ξ) = ξ^q` with `0 < q < 1`.
    Power { q: f64 },
    /// Tabulated `f` from a CSV with columns `xi,fi` and an optional third
    /// column holding the primitive `F(xi)`.
    Table { path: PathBuf },
}

/// `[branch]` — the monotone branch of the Kirchhoff function.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BranchConfig {
    /// `K(t) = tan(t − (k−1)π)` on its k-th increasing window.
    Tan { k: u32 },
    /// `K(t) = ln t` on `(1, ∞)`.
    Log,
    /// `K(t) = (c − t)^{−s}` on `(0, c)`.
    SingularPower { c: f64, s: f64 },
    /// `K(t) = a·t + b` on `(0, ∞)`.
    Affine { a: f64, b: f64 },
    /// Piecewise-linear branch from a CSV with columns `t,K`.
    Table { path: PathBuf },
}

/// Which fixed-point engine to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteChoice {
    /// Power nonlinearity → scalar t-equation, otherwise λ-bisection.
    Auto,
    /// Force the λ-bisection engine.
    Lambda,
    /// Force the scalar t-equation (requires a power nonlinearity).
    T,
}

/// `[solver]` — route selection and reproducibility knobs.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_route")]
    pub route: RouteChoice,
    /// Seed for every randomized check; stamped into the report.
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Starting λ for the bisection bracket expansion.
    #[serde(default = "default_lambda_seed")]
    pub lambda_seed: f64,
}

/// `[tolerances]` — one knob per layer of the solve.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Tolerances {
    /// Conjugate-gradient and eigenvalue tolerance.
    #[serde(default = "default_tol_linear")]
    pub linear: f64,
    /// Frozen-problem outer iteration tolerance.
    #[serde(default = "default_tol_frozen")]
    pub frozen: f64,
    /// Scalar root tolerance for the fixed-point equation.
    #[serde(default = "default_tol_root")]
    pub root: f64,
    /// Multi-start spread tolerance in the verification battery.
    #[serde(default = "default_tol_verify")]
    pub verify: f64,
}

/// `[verify]` — sample counts for the randomized checks.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct VerifyConfig {
    /// Independent starts of the frozen solve (≥ 5).
    #[serde(default = "default_starts")]
    pub starts: usize,
    /// Random perturbations around the minimizer.
    #[serde(default = "default_perturbations")]
    pub perturbations: usize,
    /// λ-samples of the saddle probe (rounded up to odd).
    #[serde(default = "default_saddle_lambda_samples")]
    pub saddle_lambda_samples: usize,
    /// Perturbed functions per kind (local and coarse) in the saddle probe.
    #[serde(default = "default_saddle_u_samples")]
    pub saddle_u_samples: usize,
}

/// `[output]` — where artifacts land. Overridden by `--out` and the
/// `KIRCHHOFF_OUT` environment variable, in that order of precedence.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

/// `[survey]` — the branch list for the cross-branch survey subcommand.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct SurveyConfig {
    #[serde(default)]
    pub branches: Vec<BranchConfig>,
}

fn default_route() -> RouteChoice {
    RouteChoice::Auto
}
fn default_seed() -> u64 {
    42
}
fn default_lambda_seed() -> f64 {
    1.0
}
fn default_tol_linear() -> f64 {
    1e-10
}
fn default_tol_frozen() -> f64 {
    1e-10
}
fn default_tol_root() -> f64 {
    1e-10
}
fn default_tol_verify() -> f64 {
    1e-8
}
fn default_starts() -> usize {
    5
}
fn default_perturbations() -> usize {
    200
}
fn default_saddle_lambda_samples() -> usize {
    21
}
fn default_saddle_u_samples() -> usize {
    25
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            route: default_route(),
            seed: default_seed(),
            lambda_seed: default_lambda_seed(),
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            linear: default_tol_linear(),
            frozen: default_tol_frozen(),
            root: default_tol_root(),
            verify: default_tol_verify(),
        }
    }
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            starts: default_starts(),
            perturbations: default_perturbations(),
            saddle_lambda_samples: default_saddle_lambda_samples(),
            saddle_u_samples: default_saddle_u_samples(),
        }
    }
}

impl LoadedConfig {
    /// Read, hash, parse, and cross-validate a config file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        let hash = hex_digest(&bytes);
        let text = String::from_utf8(bytes)
            .map_err(|e| Error::InvalidConfig(format!("config is not UTF-8: {e}")))?;
        let run: RunConfig = toml::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        run.validate()?;
        let base_dir = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(Self {
            run,
            hash,
            base_dir,
        })
    }

    /// Resolve a data path from the config against the config's directory.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

impl RunConfig {
    /// Structural checks that need no file access: positive tolerances and
    /// route/nonlinearity compatibility. Rejects `route = "t"` with a table
    /// nonlinearity before any solve is attempted.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("linear", self.tolerances.linear),
            ("frozen", self.tolerances.frozen),
            ("root", self.tolerances.root),
            ("verify", self.tolerances.verify),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "tolerances.{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.solver.route == RouteChoice::T
            && !matches!(self.nonlinearity, NonlinearityConfig::Power { .. })
        {
            return Err(Error::InvalidConfig(
                "route = \"t\" needs a power nonlinearity; use \"lambda\" or \"auto\" \
                 for tabulated f"
                    .into(),
            ));
        }
        if !(self.solver.lambda_seed > 0.0 && self.solver.lambda_seed.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "solver.lambda-seed must be positive, got {}",
                self.solver.lambda_seed
            )));
        }
        Ok(())
    }

    /// Solve options implied by the `[solver]` and `[tolerances]` sections.
    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            tol_root: self.tolerances.root,
            tol_frozen: self.tolerances.frozen,
            lam_seed: self.solver.lambda_seed,
        }
    }

    /// The forced route, or `None` for automatic dispatch.
    pub fn forced_route(&self) -> Option<Route> {
        match self.solver.route {
            RouteChoice::Auto => None,
            RouteChoice::Lambda => Some(Route::LambdaBisect),
            RouteChoice::T => Some(Route::TEquation),
        }
    }
}

impl DomainConfig {
    pub fn to_spec(&self) -> Result<DomainSpec> {
        let spec = match *self {
            DomainConfig::Interval { length, resolution } => DomainSpec::Interval {
                length,
                resolution,
            },
            DomainConfig::Rectangle {
                width,
                height,
                nx,
                ny,
            } => DomainSpec::Rectangle {
                width,
                height,
                nx,
                ny,
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl AlphaConfig {
    pub fn build(&self, cfg: &LoadedConfig, spec: DomainSpec) -> Result<Coefficient> {
        match self {
            AlphaConfig::Constant { value } => Coefficient::constant(spec, *value),
            AlphaConfig::LinearRamp { lo, hi } => Coefficient::linear_ramp(spec, *lo, *hi),
            AlphaConfig::Checkerboard { low, high, cells } => {
                Coefficient::checkerboard(spec, *low, *high, *cells)
            }
            AlphaConfig::Csv { path } => {
                let values = read_csv_last_column(&cfg.resolve(path))?;
                if values.len() != spec.node_count() {
                    return Err(Error::InvalidConfig(format!(
                        "alpha CSV has {} rows but the grid has {} nodes",
                        values.len(),
                        spec.node_count()
                    )));
                }
                let mut g = GridFunction::zeros(spec);
                g.values_mut().copy_from_slice(&values);
                Coefficient::from_values(g)
            }
        }
    }
}

impl NonlinearityConfig {
    pub fn build(&self, cfg: &LoadedConfig) -> Result<Nonlinearity> {
        match self {
            NonlinearityConfig::Power { q } => Nonlinearity::power(*q),
            NonlinearityConfig::Table { path } => {
                let cols = read_csv_columns(&cfg.resolve(path))?;
                match cols.len() {
                    2 => Nonlinearity::table(cols[0].clone(), cols[1].clone(), None),
                    3 => Nonlinearity::table(
                        cols[0].clone(),
                        cols[1].clone(),
                        Some(cols[2].clone()),
                    ),
                    n => Err(Error::InvalidConfig(format!(
                        "nonlinearity table needs 2 or 3 columns (xi, fi[, Fi]), got {n}"
                    ))),
                }
            }
        }
    }
}

impl BranchConfig {
    pub fn build(&self, cfg: &LoadedConfig) -> Result<KirchhoffBranch> {
        match self {
            BranchConfig::Tan { k } => KirchhoffBranch::tan(*k),
            BranchConfig::Log => Ok(KirchhoffBranch::log()),
            BranchConfig::SingularPower { c, s } => KirchhoffBranch::singular_power(*c, *s),
            BranchConfig::Affine { a, b } => KirchhoffBranch::affine(*a, *b),
            BranchConfig::Table { path } => {
                let cols = read_csv_columns(&cfg.resolve(path))?;
                if cols.len() != 2 {
                    return Err(Error::InvalidConfig(format!(
                        "branch table needs exactly 2 columns (t, K), got {}",
                        cols.len()
                    )));
                }
                KirchhoffBranch::table(cols[0].clone(), cols[1].clone())
            }
        }
    }

    /// Short display name for survey rows and log lines.
    pub fn label(&self) -> String {
        match self {
            BranchConfig::Tan { k } => format!("tan({k})"),
            BranchConfig::Log => "log".into(),
            BranchConfig::SingularPower { c, s } => format!("singular-power({c}, {s})"),
            BranchConfig::Affine { a, b } => format!("affine({a}, {b})"),
            BranchConfig::Table { path } => format!("table({})", path.display()),
        }
    }
}

/// Hex-encoded SHA-256 of `bytes`.
pub fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Parse a numeric CSV into columns. A single leading header line is
/// tolerated (skipped when its fields do not all parse); blank lines are
/// ignored. All data rows must have the same arity.
fn read_csv_columns(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: Option<Vec<f64>> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>().ok())
            .collect();
        let Some(row) = parsed else {
            if cols.is_empty() && idx == 0 {
                continue; // header
            }
            return Err(Error::InvalidConfig(format!(
                "{}: line {} is not numeric: {line:?}",
                path.display(),
                idx + 1
            )));
        };
        if cols.is_empty() {
            cols = vec![Vec::new(); row.len()];
        } else if row.len() != cols.len() {
            return Err(Error::InvalidConfig(format!(
                "{}: line {} has {} fields, expected {}",
                path.display(),
                idx + 1,
                row.len(),
                cols.len()
            )));
        }
        for (c, v) in cols.iter_mut().zip(row) {
            c.push(v);
        }
    }
    if cols.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "{}: no numeric rows",
            path.display()
        )));
    }
    Ok(cols)
}

/// Last column of a numeric-or-labeled CSV: accepts both bare value rows and
/// `nodeIndex,x[,y],value` rows as written by the solution writer.
fn read_csv_last_column(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let last = line.rsplit(',').next().unwrap_or(line).trim();
        match last.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if idx == 0 && out.is_empty() => continue, // header
            Err(_) => {
                return Err(Error::InvalidConfig(format!(
                    "{}: line {} has no numeric value field: {line:?}",
                    path.display(),
                    idx + 1
                )))
            }
        }
    }
    Ok(out)
}
