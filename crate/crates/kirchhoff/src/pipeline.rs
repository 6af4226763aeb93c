//! End-to-end drivers behind the CLI subcommands: validate → solve → verify
//! for `run`, the cross-branch sweep for `survey`, and the data checks for
//! `validate`. Every failure class maps to exactly one exit code, and any
//! failure past config parsing still writes a diagnostic `report.json`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{AlphaConfig, DomainConfig, LoadedConfig, RouteChoice};
use crate::error::{Error, Result};
use crate::fixpoint::{saddle_probe, solve_auto, solve_lambda_bisect, solve_t_equation};
use crate::grid::build_operators;
use crate::report::{
    BranchSection, GridSection, NonlinearitySection, ReferenceSection, RunReport, SaddleSection,
    SolutionSection, Timings, ToolInfo,
};
use crate::verify::{cross_branch_survey, survey_to_csv, verify_solution};

/// Print a line to stdout, tolerating a closed pipe (`kirchhoff ... | head`
/// must not abort mid-report).
macro_rules! emit {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

/// Exit code for an error class. Documented in `docs/config.md`:
/// 2 validation, 3 no crossing, 4 non-convergence (including degenerate
/// collapse), 5 saddle violation, 1 anything else.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::ValidationFailed(_) => 2,
        Error::NoCrossing { .. } => 3,
        Error::NoConvergence { .. } | Error::DegenerateLimit { .. } => 4,
        Error::SaddleViolation { .. } => 5,
        _ => 1,
    }
}

/// Short machine-readable class name stored in the report's `status` field.
pub fn class_name(err: &Error) -> &'static str {
    match err {
        Error::ValidationFailed(_) => "validation-failed",
        Error::NoCrossing { .. } => "no-crossing",
        Error::NoConvergence { .. } => "no-convergence",
        Error::DegenerateLimit { .. } => "degenerate-limit",
        Error::SaddleViolation { .. } => "saddle-violation",
        _ => "error",
    }
}

/// Output directory precedence: `--out` flag, then `KIRCHHOFF_OUT`, then the
/// config's `[output] dir` (relative to the config file), then `./out`.
pub fn resolve_out_dir(flag: Option<PathBuf>, cfg: &LoadedConfig) -> PathBuf {
    if let Some(p) = flag {
        return p;
    }
    if let Some(p) = std::env::var_os("KIRCHHOFF_OUT") {
        return PathBuf::from(p);
    }
    if let Some(p) = &cfg.run.output.dir {
        return cfg.resolve(p);
    }
    PathBuf::from("out")
}

/// What a `run` left behind.
#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub status: String,
    pub report_path: PathBuf,
    pub solution_path: Option<PathBuf>,
}

/// Full pipeline: build, validate, solve, verify, write artifacts.
///
/// Returns `Ok` whenever a report could be written, with the exit code of
/// the outcome inside; returns `Err` only for failures before or while
/// producing artifacts (config building, I/O).
pub fn run(cfg: &LoadedConfig, out_dir: &Path) -> Result<RunOutcome> {
    let t_total = Instant::now();

    // Stage 1: materialize the problem. Failures here are config rejections:
    // nothing to report on, caller exits nonzero with the message.
    let spec = cfg.run.domain.to_spec()?;
    let op = build_operators(spec)?;
    let coeff = cfg.run.alpha.build(cfg, spec)?;
    let f = cfg.run.nonlinearity.build(cfg)?;
    let branch = cfg.run.branch.build(cfg)?;

    // Stage 2: validate the data and take the grid's eigenvalue.
    let t_validate = Instant::now();
    let branch_validation = branch.validate(64)?;
    let f_validation = f.validate(64)?;
    let (lambda1, _) = op.principal_eigenvalue(cfg.run.tolerances.linear)?;
    let validate_ms = t_validate.elapsed().as_secs_f64() * 1e3;

    let mut report = RunReport {
        tool: ToolInfo::default(),
        status: "ok".into(),
        error: None,
        config_hash: cfg.hash.clone(),
        seed: cfg.run.solver.seed,
        grid: GridSection::new(spec, lambda1),
        branch: BranchSection::new(&branch, branch_validation.clone()),
        nonlinearity: NonlinearitySection::new(&f, f_validation.clone()),
        solution: None,
        verify: None,
        saddle: None,
        reference: reference_for(cfg),
        timings: Timings::default(),
    };
    report.timings.validate_ms = validate_ms;

    if !branch_validation.is_usable() || !f_validation.is_usable() {
        let mut reasons = Vec::new();
        if !branch_validation.is_usable() {
            reasons.push(format!(
                "branch {} failed validation (monotone: {}, positive: {})",
                branch.label(),
                branch_validation.monotone_ok,
                branch_validation.positive_ok
            ));
        }
        if !f_validation.is_usable() {
            reasons.push(format!(
                "nonlinearity {} failed validation (see report)",
                f.label()
            ));
        }
        let err = Error::ValidationFailed(reasons.join("; "));
        return finish_failed(report, err, out_dir, t_total);
    }

    // Stage 3: solve on the requested route.
    let t_solve = Instant::now();
    let opts = cfg.run.solve_options();
    let solved = match cfg.run.solver.route {
        RouteChoice::Auto => solve_auto(&op, &coeff, &f, &branch, opts),
        RouteChoice::Lambda => solve_lambda_bisect(&op, &coeff, &f, &branch, opts),
        RouteChoice::T => solve_t_equation(&op, &coeff, &f, &branch, opts),
    };
    report.timings.solve_ms = t_solve.elapsed().as_secs_f64() * 1e3;
    let sol = match solved {
        Ok(s) => s,
        Err(err) => return finish_failed(report, err, out_dir, t_total),
    };
    report.solution = Some(SolutionSection {
        route: sol.route,
        t_tilde: sol.t_tilde,
        lam_tilde: sol.lam_tilde,
        kirchhoff_residual: sol.kirchhoff_residual,
        localization_gap: sol.localization_gap,
        inner_solves: sol.inner_solves,
        frozen_iterations: sol.frozen_iterations,
        u_min: sol.u.min(),
        u_max: sol.u.max(),
    });

    // Stage 4: verification battery plus the saddle probe, one seeded stream.
    let t_verify = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.solver.seed);
    let verification = verify_solution(
        &sol,
        &op,
        &coeff,
        &f,
        lambda1,
        cfg.run.verify.starts,
        cfg.run.verify.perturbations,
        cfg.run.tolerances.verify,
        &mut rng,
    );
    let verification = match verification {
        Ok(v) => v,
        Err(err) => {
            report.timings.verify_ms = t_verify.elapsed().as_secs_f64() * 1e3;
            return finish_failed(report, err, out_dir, t_total);
        }
    };
    report.verify = Some(verification.clone());

    let saddle = saddle_probe(
        &sol,
        &op,
        &coeff,
        &f,
        &mut rng,
        cfg.run.verify.saddle_lambda_samples,
        cfg.run.verify.saddle_u_samples,
    );
    report.timings.verify_ms = t_verify.elapsed().as_secs_f64() * 1e3;
    let saddle_failure = match saddle {
        Ok(probe) => {
            report.saddle = Some(SaddleSection::passed(&probe));
            None
        }
        Err(Error::SaddleViolation {
            detail,
            margin,
            eps,
        }) => {
            report.saddle = Some(SaddleSection::violated(detail.clone(), margin, eps));
            Some(Error::SaddleViolation {
                detail,
                margin,
                eps,
            })
        }
        Err(Error::OutOfRange { lam, side }) => {
            report.saddle = Some(SaddleSection::skipped(format!(
                "λ-primitive of the inverse branch is undefined at λ = {lam:.6e} \
                 ({side:?} the attained range); probe not applicable"
            )));
            None
        }
        Err(other) => return Err(other),
    };
    if let Some(err) = saddle_failure {
        return finish_failed(report, err, out_dir, t_total);
    }

    if !verification.all_ok() {
        let err = Error::ValidationFailed(format!(
            "verification battery failed: {}",
            verification.notes
        ));
        return finish_failed(report, err, out_dir, t_total);
    }

    // Stage 5: artifacts.
    std::fs::create_dir_all(out_dir)?;
    let solution_path = out_dir.join("solution.csv");
    let file = std::fs::File::create(&solution_path)?;
    sol.u.write_csv(std::io::BufWriter::new(file))?;
    report.timings.total_ms = t_total.elapsed().as_secs_f64() * 1e3;
    let report_path = write_report(&report, out_dir)?;

    emit!(
        "t̃ = {:.12e}, λ̃ = K(t̃) = {:.12e} on branch {} ({} route)",
        sol.t_tilde,
        sol.lam_tilde,
        sol.branch.label(),
        match sol.route {
            crate::fixpoint::Route::LambdaBisect => "λ-bisection",
            crate::fixpoint::Route::TEquation => "t-equation",
        }
    );
    emit!(
        "residual {:.3e}, localization gap {:.3e}, {} frozen solves",
        sol.kirchhoff_residual, sol.localization_gap, sol.inner_solves
    );
    emit!(
        "artifacts: {} and {}",
        solution_path.display(),
        report_path.display()
    );

    Ok(RunOutcome {
        exit_code: 0,
        status: "ok".into(),
        report_path,
        solution_path: Some(solution_path),
    })
}

/// Record a failure in the report, write it, and map the class to its code.
fn finish_failed(
    mut report: RunReport,
    err: Error,
    out_dir: &Path,
    t_total: Instant,
) -> Result<RunOutcome> {
    report.status = class_name(&err).into();
    report.error = Some(err.to_string());
    report.timings.total_ms = t_total.elapsed().as_secs_f64() * 1e3;
    let report_path = write_report(&report, out_dir)?;
    eprintln!("{err}");
    eprintln!("diagnostic report: {}", report_path.display());
    Ok(RunOutcome {
        exit_code: exit_code_for(&err),
        status: report.status,
        report_path,
        solution_path: None,
    })
}

fn write_report(report: &RunReport, out_dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join("report.json");
    std::fs::write(&path, report.to_json()?)?;
    Ok(path)
}

/// Reference constants apply to 1D constant-coefficient power runs only.
fn reference_for(cfg: &LoadedConfig) -> Option<ReferenceSection> {
    let DomainConfig::Interval { length, .. } = cfg.run.domain else {
        return None;
    };
    let AlphaConfig::Constant { value } = cfg.run.alpha else {
        return None;
    };
    let q = match cfg.run.nonlinearity {
        crate::config::NonlinearityConfig::Power { q } => q,
        _ => return None,
    };
    ReferenceSection::lookup(q, value, length)
}

/// What a `survey` left behind.
#[derive(Debug)]
pub struct SurveyOutcome {
    pub exit_code: i32,
    pub csv_path: PathBuf,
    pub rows: usize,
}

/// Cross-branch sweep over `[survey] branches`, writing `survey.csv` and a
/// summary line per branch. An empty branch list writes the header only.
pub fn survey(cfg: &LoadedConfig, out_dir: &Path) -> Result<SurveyOutcome> {
    let spec = cfg.run.domain.to_spec()?;
    let op = build_operators(spec)?;
    let coeff = cfg.run.alpha.build(cfg, spec)?;
    let f = cfg.run.nonlinearity.build(cfg)?;
    let branches = cfg
        .run
        .survey
        .branches
        .iter()
        .map(|b| b.build(cfg))
        .collect::<Result<Vec<_>>>()?;
    let (lambda1, _) = op.principal_eigenvalue(cfg.run.tolerances.linear)?;

    let report = cross_branch_survey(
        &op,
        &coeff,
        &f,
        &branches,
        lambda1,
        cfg.run.solve_options(),
    )?;

    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join("survey.csv");
    std::fs::write(&csv_path, survey_to_csv(&report))?;

    let mut any_invalid = false;
    for row in &report.rows {
        match (row.t_tilde, row.lam_tilde) {
            (Some(t), Some(l)) => {
                emit!("{}: t̃ = {t:.9e}, λ̃ = {l:.9e} ({})", row.branch, row.status)
            }
            _ => {
                emit!("{}: {}", row.branch, row.status);
                if row.status.starts_with("invalid") {
                    any_invalid = true;
                }
            }
        }
    }
    if report.rows.iter().any(|r| r.t_tilde.is_some()) {
        emit!(
            "shared invariant K(t̃)^(2/(1-q))·t̃: spread {:.3e} about Φ(u₁) = {:.9e} ({})",
            report.invariance_spread,
            report.base_phi,
            if report.invariance_ok { "ok" } else { "DRIFTING" }
        );
    }
    emit!("survey table: {}", csv_path.display());

    Ok(SurveyOutcome {
        exit_code: if any_invalid { 2 } else { 0 },
        csv_path,
        rows: report.rows.len(),
    })
}

/// Data checks only: validate the branch and the nonlinearity, print both
/// verdicts as JSON on stdout. Exit 0 when both are usable, 2 otherwise.
pub fn validate_only(cfg: &LoadedConfig) -> Result<i32> {
    let branch = cfg.run.branch.build(cfg)?;
    let f = cfg.run.nonlinearity.build(cfg)?;
    let branch_validation = branch.validate(64)?;
    let f_validation = f.validate(64)?;
    let usable = branch_validation.is_usable() && f_validation.is_usable();
    let doc = serde_json::json!({
        "branch": {
            "label": branch.label(),
            "validation": branch_validation,
        },
        "nonlinearity": {
            "label": f.label(),
            "validation": f_validation,
        },
        "usable": usable,
    });
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::InvalidInput(format!("validation serialization failed: {e}")))?;
    emit!("{text}");
    Ok(if usable { 0 } else { 2 })
}
