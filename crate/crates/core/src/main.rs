use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use massgate::io::{emit_comparison, emit_outputs, emit_sweep, load_config, oracle_table};
use massgate::runner::{compare_quadratures, execute, sweep};
use massgate::Result;

#[derive(Parser)]
#[command(name = "massgate", version, about = "Bang-bang boundary control of 1D diffusion by total mass")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Override a configuration key, e.g. `--set N=400`
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write switches, mass, snapshots and report
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the exact switching times up to the horizon
    Oracle {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Run both quadratures on one fixed-grid configuration
    Compare {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Repeat a fixed-grid run over several step counts
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run { config, out } => {
            let run = load_config(&config.config, &config.overrides)?;
            let outcome = execute(&run)?;
            let files = emit_outputs(&outcome.trajectory, &outcome.report, &out)?;
            info!("wrote {} files to {}", files.len(), out.display());
            println!(
                "{} switches, max |T_k - t_k| = {:.10}, within bound: {}",
                outcome.report.summary.events,
                outcome.report.summary.max_abs_error,
                outcome.report.summary.all_within_bound
            );
        }
        Command::Oracle { config } => {
            let run = load_config(&config.config, &config.overrides)?;
            print!("{}", oracle_table(&run.control));
        }
        Command::Compare { config, out } => {
            let run = load_config(&config.config, &config.overrides)?;
            let (trapezoid, riemann) = compare_quadratures(&run)?;
            emit_comparison(&trapezoid, &riemann, &out)?;
            for o in [&trapezoid, &riemann] {
                println!(
                    "{}: {} switches, max |T_k - t_k| = {:.10}, within bound: {}",
                    o.run.quadrature.name(),
                    o.report.summary.events,
                    o.report.summary.max_abs_error,
                    o.report.summary.all_within_bound
                );
            }
        }
        Command::Sweep {
            config,
            n_list,
            out,
        } => {
            let run = load_config(&config.config, &config.overrides)?;
            let rows = sweep(&run, &n_list)?;
            emit_sweep(&rows, &out)?;
            println!("N,dt,events,max_abs_err,all_within_bound");
            for r in rows {
                println!(
                    "{},{},{},{:.10},{}",
                    r.steps, r.dt, r.events, r.max_abs_error, r.all_within_bound
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MASSGATE_LOG", "error"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
