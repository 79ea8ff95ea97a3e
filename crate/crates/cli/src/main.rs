use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shadowkit_cli::config::{ExperimentConfig, Format};
use shadowkit_cli::report::{render_run, render_summary, render_sweep, verdict};
use shadowkit_cli::run::{generate_trial, run, TrialOutcome};
use shadowkit_cli::{exit_code, recheck, sweep, CliError, EXIT_ERROR};

#[derive(Parser)]
#[command(name = "shadowkit", version, about = "Pseudo-orbit shadowing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the pseudo-orbit of one trial.
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        trial: usize,
    },
    /// Solve and certify every trial; writes the per-step table.
    Shadow {
        #[command(flatten)]
        common: Common,
        /// Also store all trial certificates as JSON for `verify`.
        #[arg(long)]
        certificates: Option<PathBuf>,
    },
    /// Re-check stored certificates against the config's system.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        certificates: PathBuf,
    },
    /// Run the config's parameter grid; one summary row per point.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
}

fn load(common: &Common) -> Result<(ExperimentConfig, Format), CliError> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    let format = common.format.unwrap_or(cfg.format);
    Ok((cfg, format))
}

fn write(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Summary goes to stdout when the table went to a file, else to stderr.
fn summary(out: Option<&Path>, text: &str) {
    if out.is_some() {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Generate { common, trial } => {
            let (cfg, format) = load(&common)?;
            let (_, p) = generate_trial(&cfg, trial)?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&p).map_err(|e| CliError::Io(e.to_string()))? + "\n",
                Format::Csv => {
                    let mut s = String::from("n,defect,point\n");
                    for (n, x) in p.points().iter().enumerate() {
                        let d = p.defects().get(n).map_or_else(String::new, f64::to_string);
                        s.push_str(&format!("{n},{d},\"{}\"\n", x.render()));
                    }
                    s
                }
            };
            write(common.out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Shadow { common, certificates } => {
            let (cfg, format) = load(&common)?;
            let (report, outcomes) = run(&cfg)?;
            write(common.out.as_deref(), &render_run(&report, format)?)?;
            if let Some(path) = certificates {
                let text = serde_json::to_string(&outcomes).map_err(|e| CliError::Io(e.to_string()))?;
                write(Some(&path), &text)?;
            }
            summary(common.out.as_deref(), &render_summary(&report.summary));
            Ok(exit_code(report.summary.pass))
        }
        Command::Verify { common, certificates } => {
            let (cfg, _) = load(&common)?;
            let text = std::fs::read_to_string(&certificates)
                .map_err(|e| CliError::Io(format!("{}: {e}", certificates.display())))?;
            let trials: Vec<TrialOutcome> =
                serde_json::from_str(&text).map_err(|e| CliError::Config(format!("bad certificate file: {e}")))?;
            let checks = recheck::recheck(&cfg, &trials)?;
            let mut out = String::new();
            for c in &checks {
                out.push_str(&format!("{}: {}\n", c.name, verdict(c.pass)));
            }
            let pass = checks.iter().all(|c| c.pass);
            out.push_str(&format!("overall: {}\n", verdict(pass)));
            write(common.out.as_deref(), &out)?;
            Ok(exit_code(pass))
        }
        Command::Sweep { common } => {
            let (cfg, format) = load(&common)?;
            let report = sweep::sweep(&cfg)?;
            write(common.out.as_deref(), &render_sweep(&report, format)?)?;
            summary(common.out.as_deref(), &format!("grid points: {}\noverall: {}\n", report.rows.len(), verdict(report.pass)));
            Ok(exit_code(report.pass))
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
