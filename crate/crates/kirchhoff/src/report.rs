//! Structured run report: everything needed to audit and reproduce a solve.
//!
//! The report is one JSON document per run. All numerical results, the
//! validation verdicts, the seed, the tool version, and a hash of the exact
//! config bytes go in; wall-clock timings are the only non-reproducible part
//! and live under the single key `timings`, which [`masked`] strips so that
//! two runs of the same config can be compared byte for byte.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixpoint::{Route, SaddleProbe};
use crate::grid::DomainSpec;
use crate::kfun::{BranchValidationReport, KirchhoffBranch};
use crate::reference;
use crate::sublinear::{Nonlinearity, NonlinearityReport};
use crate::verify::VerificationReport;

/// Name and version of the binary that produced the report.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// Grid facts recorded for the run.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GridSection {
    pub kind: &'static str,
    pub lengths: Vec<f64>,
    pub resolutions: Vec<usize>,
    pub node_count: usize,
    pub mesh_widths: Vec<f64>,
    pub lambda1_discrete: f64,
    pub lambda1_continuum: f64,
}

impl GridSection {
    pub fn new(spec: DomainSpec, lambda1_discrete: f64) -> Self {
        let (kind, lengths, resolutions) = match spec {
            DomainSpec::Interval { length, resolution } => {
                ("interval", vec![length], vec![resolution])
            }
            DomainSpec::Rectangle {
                width,
                height,
                nx,
                ny,
            } => ("rectangle", vec![width, height], vec![nx, ny]),
        };
        let (hx, hy) = spec.mesh_widths();
        let mut mesh_widths = vec![hx];
        mesh_widths.extend(hy);
        Self {
            kind,
            lengths,
            resolutions,
            node_count: spec.node_count(),
            mesh_widths,
            lambda1_discrete,
            lambda1_continuum: spec.lambda1_continuum(),
        }
    }
}

/// Branch facts: the interval, the analytic surjectivity flag, and the
/// sampled validation verdict.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BranchSection {
    pub label: String,
    pub t_lo: f64,
    /// `null` when the branch extends to +∞.
    pub t_hi: Option<f64>,
    pub range_full: bool,
    pub validation: BranchValidationReport,
}

impl BranchSection {
    pub fn new(branch: &KirchhoffBranch, validation: BranchValidationReport) -> Self {
        let (t_lo, t_hi) = branch.interval();
        Self {
            label: branch.label(),
            t_lo,
            t_hi: t_hi.is_finite().then_some(t_hi),
            range_full: branch.range_full(),
            validation,
        }
    }
}

/// Nonlinearity facts and its sampled validation verdict.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NonlinearitySection {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    pub validation: NonlinearityReport,
}

impl NonlinearitySection {
    pub fn new(f: &Nonlinearity, validation: NonlinearityReport) -> Self {
        Self {
            label: f.label(),
            q: f.power_exponent(),
            validation,
        }
    }
}

/// The solved fixed point and its residuals.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SolutionSection {
    pub route: Route,
    pub t_tilde: f64,
    pub lam_tilde: f64,
    pub kirchhoff_residual: f64,
    pub localization_gap: f64,
    pub inner_solves: usize,
    pub frozen_iterations: usize,
    pub u_min: f64,
    pub u_max: f64,
}

/// Saddle probe outcome. `status` is `"ok"`, `"violated"`, or `"skipped"`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SaddleSection {
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_sup_margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_inf_margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturbed_functions: Option<usize>,
}

impl SaddleSection {
    pub fn passed(probe: &SaddleProbe) -> Self {
        Self {
            status: "ok".into(),
            detail: None,
            worst_sup_margin: Some(probe.worst_sup_margin),
            worst_inf_margin: Some(probe.worst_inf_margin),
            eps: Some(probe.eps),
            lambda_samples: Some(probe.lam_samples.len()),
            perturbed_functions: Some(probe.u_labels.len().saturating_sub(1)),
        }
    }

    pub fn violated(detail: String, margin: f64, eps: f64) -> Self {
        Self {
            status: "violated".into(),
            detail: Some(detail),
            worst_sup_margin: Some(margin),
            worst_inf_margin: None,
            eps: Some(eps),
            lambda_samples: None,
            perturbed_functions: None,
        }
    }

    pub fn skipped(reason: String) -> Self {
        Self {
            status: "skipped".into(),
            detail: Some(reason),
            worst_sup_margin: None,
            worst_inf_margin: None,
            eps: None,
            lambda_samples: None,
            perturbed_functions: None,
        }
    }
}

/// Closed-form reference values applicable to the run, if any. These are the
/// frozen constants minted by the shooting oracle for the unit power cases,
/// rescaled to the run's coefficient and interval length.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReferenceSection {
    pub q: f64,
    pub alpha_const: f64,
    pub length: f64,
    pub unit_t1: f64,
    pub continuum_t1: f64,
}

impl ReferenceSection {
    /// Available only for 1D runs with constant α and a tabulated power.
    pub fn lookup(q: f64, alpha_const: f64, length: f64) -> Option<Self> {
        let unit_t1 = reference::unit_energy(q)?;
        let continuum_t1 = reference::scaled_energy(q, alpha_const, length)?;
        Some(Self {
            q,
            alpha_const,
            length,
            unit_t1,
            continuum_t1,
        })
    }
}

/// Wall-clock milliseconds per phase. Masked out of comparisons.
#[derive(Debug, Clone, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Timings {
    pub validate_ms: f64,
    pub solve_ms: f64,
    pub verify_ms: f64,
    pub total_ms: f64,
}

/// The complete run report.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub tool: ToolInfo,
    /// `"ok"`, or the failure class when the run stopped early.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub config_hash: String,
    pub seed: u64,
    pub grid: GridSection,
    pub branch: BranchSection,
    pub nonlinearity: NonlinearitySection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub saddle: Option<SaddleSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceSection>,
    pub timings: Timings,
}

impl RunReport {
    /// Pretty JSON with a trailing newline, as written to `report.json`.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::InvalidInput(format!("report serialization failed: {e}")))?;
        s.push('\n');
        Ok(s)
    }
}

/// The documented determinism mask: parse a report and drop the top-level
/// `timings` key. Two runs with identical config bytes and seed must agree
/// byte for byte after this mask.
pub fn masked(report_json: &str) -> Result<String> {
    let mut v: serde_json::Value = serde_json::from_str(report_json)
        .map_err(|e| Error::InvalidInput(format!("report is not valid JSON: {e}")))?;
    if let Some(map) = v.as_object_mut() {
        map.remove("timings");
    }
    let mut s = serde_json::to_string_pretty(&v)
        .map_err(|e| Error::InvalidInput(format!("report re-serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masking_strips_exactly_the_timings_key() {
        let a = r#"{"status":"ok","timings":{"totalMs":1.5},"seed":42}"#;
        let b = r#"{"status":"ok","timings":{"totalMs":99.0},"seed":42}"#;
        let ma = masked(a).unwrap();
        let mb = masked(b).unwrap();
        assert_eq!(ma, mb);
        assert!(ma.contains("\"seed\""));
        assert!(!ma.contains("timings"));
    }

    #[test]
    fn reference_lookup_covers_the_tabulated_powers_only() {
        assert!(ReferenceSection::lookup(0.5, 1.0, 1.0).is_some());
        assert!(ReferenceSection::lookup(0.3, 1.0, 1.0).is_none());
        let r = ReferenceSection::lookup(0.5, 2.0, 1.0).unwrap();
        assert!((r.continuum_t1 / r.unit_t1 - 16.0).abs() < 1e-12);
    }
}
