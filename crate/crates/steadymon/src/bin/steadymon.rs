// Copyright 2026 Steadymon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Config-driven experiment runner for continuously monitored
//! driven-dissipative systems.
//!
//! One subcommand per experiment kind; the subcommand must match the
//! `kind` field of the TOML config (a guard against running the wrong
//! file).  Outputs go to `--output`, or `[output].directory` from the
//! config, or `./steadymon-out`.
//!
//! Exit codes: 0 success, 1 validation/usage, 2 numerical failure,
//! 3 assertion failure.

use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};

use steadymon::config::{parse_config, ExperimentConfig, ExperimentKind};
use steadymon::error::Error;
use steadymon::runner::{run_experiment, write_outputs, RunArtifacts};

#[derive(Parser)]
#[command(
    name = "steadymon",
    version,
    about = "Lindblad steady states, measurement-invariance checks, and \
             stochastic-master-equation trajectory ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether the monitored observable leaves the steady state
    /// invariant (D[c] rho_ss = 0).
    InvarianceCheck(RunArgs),
    /// Track the measured steady state's drift across measurement rates.
    GammaSweep(RunArgs),
    /// Integrate one conditioned trajectory and synthesize its
    /// measurement record.
    Trajectory(RunArgs),
    /// Run a trajectory ensemble and reduce it to summary statistics.
    Ensemble(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment config file.
    #[arg(short, long, value_name = "FILE")]
    config: PathBuf,

    /// Output directory (overrides [output].directory).
    #[arg(short, long, value_name = "DIR")]
    output: Option<PathBuf>,

    /// Increase verbosity (-v progress on stderr, -vv resolved config).
    #[arg(short, long, action = ArgAction::Count)]
    verbose: u8,

    /// Override [ensemble].n_trajectories (ensemble runs only).
    #[arg(long, value_name = "N")]
    n_trajectories: Option<usize>,

    /// Override the trajectory seed / ensemble base seed.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap uses exit code 2 for usage errors, but this tool
            // reserves 2 for numerical failures; usage problems are
            // validation failures (1).  --help/--version stay 0.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let (expected_kind, args) = match &cli.command {
        Command::InvarianceCheck(a) => (ExperimentKind::InvarianceCheck, a),
        Command::GammaSweep(a) => (ExperimentKind::GammaSweep, a),
        Command::Trajectory(a) => (ExperimentKind::Trajectory, a),
        Command::Ensemble(a) => (ExperimentKind::Ensemble, a),
    };

    let text = std::fs::read_to_string(&args.config).map_err(|e| Error::Io {
        path: args.config.display().to_string(),
        message: e.to_string(),
    })?;
    let mut config = parse_config(&text)?;

    if config.kind != expected_kind {
        return Err(Error::ConfigValidation {
            errors: vec![format!(
                "config kind = \"{}\" does not match subcommand \"{}\"",
                config.kind.as_str(),
                expected_kind.as_str()
            )],
        });
    }
    apply_overrides(&mut config, args)?;

    if args.verbose >= 2 {
        eprintln!("resolved config: {config:#?}");
    }
    if args.verbose >= 1 {
        eprintln!("{}", describe(&config));
    }

    let started = std::time::Instant::now();
    let artifacts = run_experiment(&config)?;
    if args.verbose >= 1 {
        eprintln!("run finished in {:.3} s", started.elapsed().as_secs_f64());
    }

    let dir = args
        .output
        .clone()
        .or_else(|| config.output.directory.clone())
        .unwrap_or_else(|| PathBuf::from("steadymon-out"));
    write_outputs(&artifacts, &config, &text, &dir)?;

    println!("{}", result_line(&config, &artifacts));
    println!("outputs: {}", dir.display());

    match artifacts.assertion_error() {
        None => Ok(()),
        Some(err) => Err(err),
    }
}

fn apply_overrides(config: &mut ExperimentConfig, args: &RunArgs) -> Result<(), Error> {
    if let Some(n) = args.n_trajectories {
        let Some(ens) = config.ensemble.take() else {
            return Err(Error::ConfigValidation {
                errors: vec!["--n-trajectories only applies to ensemble runs".to_owned()],
            });
        };
        config.ensemble = Some(ens.with_n_trajectories(n)?);
    }
    if let Some(seed) = args.seed {
        match config.kind {
            ExperimentKind::Trajectory => {
                config.trajectory = config.trajectory.take().map(|t| t.with_seed(seed));
            }
            ExperimentKind::Ensemble => {
                config.ensemble = config.ensemble.take().map(|e| e.with_base_seed(seed));
            }
            _ => {
                return Err(Error::ConfigValidation {
                    errors: vec![
                        "--seed only applies to trajectory or ensemble runs".to_owned(),
                    ],
                });
            }
        }
    }
    Ok(())
}

fn describe(config: &ExperimentConfig) -> String {
    let model = match &config.model.preset {
        Some(name) => format!("preset {name}"),
        None => "explicit matrices".to_owned(),
    };
    let mut line = format!(
        "{}: model = {model} (d = {}), gamma_m = {}, eta = {}",
        config.kind.as_str(),
        config.model.model.dim(),
        config.monitoring.gamma_m(),
        config.monitoring.eta()
    );
    if let Some(t) = &config.trajectory {
        line.push_str(&format!(
            ", dt = {}, t_final = {}, steps = {}",
            t.dt(),
            t.t_final(),
            t.n_steps()
        ));
    }
    if let Some(e) = &config.ensemble {
        line.push_str(&format!(
            ", n_trajectories = {}, base_seed = {}",
            e.n_trajectories(),
            e.base_seed()
        ));
    }
    line
}

fn result_line(config: &ExperimentConfig, artifacts: &RunArtifacts) -> String {
    let s = &artifacts.summary;
    let f = |v: &serde_json::Value| v.as_f64().unwrap_or(f64::NAN);
    match config.kind {
        ExperimentKind::InvarianceCheck => format!(
            "invariance-check: verdict = {} (residual {:.6e}, tolerance {:.1e})",
            s["verdict"].as_str().unwrap_or("?"),
            f(&s["residual_norm"]),
            f(&s["tolerance"]),
        ),
        ExperimentKind::GammaSweep => format!(
            "gamma-sweep: {} points, max drift {:.6e}, {} failed",
            s["n_points"], f(&s["max_drift"]), s["n_failed_points"],
        ),
        ExperimentKind::Trajectory => format!(
            "trajectory: {} steps, final expectation {:.6}, final purity {:.6}",
            s["n_steps"], f(&s["final_expectation"]), f(&s["final_purity"]),
        ),
        ExperimentKind::Ensemble => {
            let unc = &s["uncollapse"]["max"];
            let unc_text = if unc.is_null() {
                "unavailable".to_owned()
            } else {
                format!("{:.6e}", f(unc))
            };
            format!(
                "ensemble: {} trajectories ({} aborted), final mean purity {:.6}, \
                 max uncollapse {unc_text}",
                s["n_trajectories"], s["n_aborted"], f(&s["final_purity_mean"]),
            )
        }
    }
}
