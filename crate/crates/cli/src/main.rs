//! Command-line front end.
//!
//! The exit code is 0 on success. Failures print a single JSON object on
//! stderr and exit with the code given by [`Error::exit_code`].

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rotgn::coefficients::{lambda_from_theta, FamilyChoice, Transcription};
use rotgn::config::{parse_config, ExperimentConfig, InitialProfile};
use rotgn::error::{ConfigIssue, Error};
use rotgn::experiments;
use rotgn::output::{default_dir, write_outputs, Report};
use serde_json::json;

#[derive(Parser)]
#[command(name = "rotgn", version, about = "Rotating Green-Naghdi and Camassa-Holm experiments")]
struct Cli {
    /// Experiment configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `[output] dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for concurrent runs.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,
    /// Recorded in the summary; the pipeline is deterministic and does not
    /// draw random numbers.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Gbbm,
    Rch,
    Surface,
    SurfaceRch,
}

#[derive(Clone, Copy, ValueEnum)]
enum TranscriptionArg {
    Consistent,
    Uncorrected,
}

#[derive(Subcommand)]
enum Command {
    /// Print a coefficient set and its constraint report as JSON.
    Coeffs {
        #[arg(long, allow_negative_numbers = true)]
        omega: f64,
        /// Free family parameter.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        p: f64,
        /// Depth level in [0, 1] of the velocity family.
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
        #[arg(long, value_enum, default_value = "rch")]
        family: FamilyArg,
        #[arg(long, value_enum, default_value = "consistent")]
        transcription: TranscriptionArg,
    },
    /// Integrate the scalar model.
    SimulateRch,
    /// Integrate the Green-Naghdi system.
    SimulateRgn,
    /// Residual scan over the shallowness list.
    Consistency,
    /// Matched-pair convergence study.
    Converge,
    /// Dump the Green-Naghdi pair reconstructed from the initial profile.
    Reconstruct,
}

fn error_object(e: &Error) -> serde_json::Value {
    let issues: Vec<ConfigIssue> = match e.root() {
        Error::Config(v) => v.clone(),
        _ => Vec::new(),
    };
    let time = match e {
        Error::AtTime { time, .. } => Some(*time),
        _ => None,
    };
    json!({
        "error": {
            "kind": e.kind(),
            "exit_code": e.exit_code(),
            "message": e.to_string(),
            "time": time,
            "issues": issues,
        }
    })
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig, Error> {
    let path = path.ok_or_else(|| {
        Error::Config(vec![ConfigIssue {
            line: None,
            key: None,
            message: "this subcommand needs --config <file>".into(),
        }])
    })?;
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut config = parse_config(&text)?;
    if let InitialProfile::File { path: profile } = &mut config.initial.profile {
        if profile.is_relative() {
            if let Some(dir) = path.parent() {
                *profile = dir.join(&*profile);
            }
        }
    }
    Ok(config)
}

fn family_choice(family: FamilyArg, p: f64, theta: Option<f64>, transcription: Transcription) -> Result<FamilyChoice, Error> {
    Ok(match family {
        FamilyArg::Rch => FamilyChoice::Rch,
        FamilyArg::Gbbm => FamilyChoice::Gbbm {
            p,
            lambda: theta.map(lambda_from_theta).transpose()?.unwrap_or(0.0),
        },
        FamilyArg::Surface => FamilyChoice::Surface { p, transcription },
        FamilyArg::SurfaceRch => FamilyChoice::SurfaceRch { transcription },
    })
}

fn run(cli: &Cli) -> Result<(), Error> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .map_err(|e| Error::Domain(format!("cannot start {n} worker threads: {e}")))?;
    }
    let (mut report, dir): (Report, Option<PathBuf>) = match &cli.command {
        Command::Coeffs {
            omega,
            p,
            theta,
            family,
            transcription,
        } => {
            let transcription = match transcription {
                TranscriptionArg::Consistent => Transcription::Consistent,
                TranscriptionArg::Uncorrected => Transcription::Uncorrected,
            };
            let report = experiments::coefficients(family_choice(*family, *p, *theta, transcription)?, *omega)?;
            let text = serde_json::to_string_pretty(&report.results).map_err(|e| Error::Serialization(e.to_string()))?;
            println!("{text}");
            (report, cli.out.clone())
        }
        command => {
            let config = load_config(cli.config.as_deref())?;
            let report = match command {
                Command::SimulateRch => experiments::simulate_rch(&config)?,
                Command::SimulateRgn => experiments::simulate_rgn(&config)?,
                Command::Consistency => experiments::consistency(&config)?,
                Command::Converge => experiments::convergence(&config)?,
                Command::Reconstruct => experiments::reconstruct(&config)?,
                Command::Coeffs { .. } => unreachable!("handled above"),
            };
            let dir = cli.out.clone().unwrap_or_else(|| default_dir(Some(&config)));
            (report, Some(dir))
        }
    };
    report.seed = cli.seed;
    if let Some(dir) = dir {
        let manifest = write_outputs(&report, &dir)?;
        if !matches!(cli.command, Command::Coeffs { .. }) {
            let files: Vec<&str> = manifest.files.iter().map(|f| f.path.as_str()).collect();
            println!("{}", json!({ "status": "ok", "command": report.command, "out": dir, "files": files }));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let obj = json!({
                "error": { "kind": "usage", "exit_code": 2, "message": e.to_string().trim_end() }
            });
            eprintln!("{obj}");
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_object(&e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
