//! Command-line driver. All real work lives in the library's `pipeline`
//! module; this file only parses arguments and maps outcomes to exit codes.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kirchhoff::config::LoadedConfig;
use kirchhoff::pipeline::{self, resolve_out_dir};
use kirchhoff::shooting::oracle_shoot;

#[derive(Parser)]
#[command(
    name = "kirchhoff",
    version,
    about = "Positive solutions of -K(∫|∇u|²)Δu = α(x)f(u) on a monotone branch of K"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the data, solve the fixed point, run the verification
    /// battery, and write solution.csv plus report.json.
    Run {
        /// Path to the TOML config file.
        config: PathBuf,
        /// Output directory (overrides KIRCHHOFF_OUT and the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the `[survey]` branch list against one frozen problem and write
    /// survey.csv.
    Survey {
        /// Path to the TOML config file.
        config: PathBuf,
        /// Output directory (overrides KIRCHHOFF_OUT and the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the branch and the nonlinearity only; print the verdicts as
    /// JSON on stdout.
    Validate {
        /// Path to the TOML config file.
        config: PathBuf,
    },
    /// Independent shooting solve of -u'' = α·ξ^q on (0, L): prints the
    /// Dirichlet energy ∫u'² and the solution profile data as JSON.
    Oracle {
        /// Power exponent q in (0, 1).
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        /// Constant coefficient value.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Interval length L.
        #[arg(long, default_value_t = 1.0)]
        length: f64,
        /// Maximum integrator step count scale (≥ 4096).
        #[arg(long = "fine-n", default_value_t = 8192)]
        fine_n: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("{err}");
            pipeline::exit_code_for(&err)
        }
    };
    ExitCode::from(u8::try_from(code).unwrap_or(1))
}

fn dispatch(cli: Cli) -> kirchhoff::Result<i32> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = LoadedConfig::from_path(&config)?;
            let out_dir = resolve_out_dir(out, &cfg);
            let outcome = pipeline::run(&cfg, &out_dir)?;
            Ok(outcome.exit_code)
        }
        Command::Survey { config, out } => {
            let cfg = LoadedConfig::from_path(&config)?;
            let out_dir = resolve_out_dir(out, &cfg);
            let outcome = pipeline::survey(&cfg, &out_dir)?;
            Ok(outcome.exit_code)
        }
        Command::Validate { config } => {
            let cfg = LoadedConfig::from_path(&config)?;
            pipeline::validate_only(&cfg)
        }
        Command::Oracle {
            q,
            alpha,
            length,
            fine_n,
        } => {
            let shot = oracle_shoot(q, alpha, length, fine_n)?;
            let doc = serde_json::json!({
                "q": q,
                "alphaConst": alpha,
                "length": length,
                "fineN": fine_n,
                "t1": shot.t1,
                "maxU": shot.max_u,
                "initialSlope": shot.initial_slope,
                "steps": shot.steps,
            });
            use std::io::Write;
            let _ = writeln!(
                std::io::stdout(),
                "{}",
                serde_json::to_string_pretty(&doc).expect("oracle JSON serializes")
            );
            Ok(0)
        }
    }
}
