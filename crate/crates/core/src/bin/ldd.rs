use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use richards_ldd::config::ConfigFile;
use richards_ldd::studies::{
    cmd_compare, cmd_run, cmd_sweep, cmd_tau_bound, exit_code, write_compare, write_sweep,
};
use richards_ldd::{Error, Result};

/// Domain-decomposed L-scheme for Richards' equation.
///
/// Exit status: 0 success, 2 configuration error, 3 divergence, 4 linear solver failure.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration; defaults apply to anything left out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Write every assembled matrix in coordinate format under `<out>/matrices`.
    #[arg(long, global = true)]
    dump_matrices: bool,

    /// Worker threads for the subdomain solves and sweep points.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// One transient run with iteration log, step summary and profile.
    Run,
    /// Contraction rates over the Cartesian product of the sweep axes.
    Sweep,
    /// Several schemes on the same case and time window.
    Compare,
    /// The sufficient time-step bound for the configured L.
    TauBound,
}

fn load(cli: &Cli) -> Result<ConfigFile> {
    let mut config = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    if let Some(out) = &cli.out {
        config.output.dir = out.clone();
    }
    config.output.dump_matrices |= cli.dump_matrices;
    Ok(config)
}

fn execute(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let config = load(cli)?;
    let out = config.output.dir.clone();
    match cli.command {
        Command::Run => {
            let report = cmd_run(&config, &out)?;
            println!(
                "{} steps, {:.2} inner iterations per step, {} GMRES iterations",
                report.steps.len(),
                report.average_inner_iterations(),
                report.total_gmres_iterations()
            );
            if let Some(e) = report.final_relative_error() {
                println!("relative error at t={}: {e:.3e}", report.final_state.time);
            }
            report.into_result()?;
        }
        Command::Sweep => {
            let report = cmd_sweep(&config)?;
            write_sweep(&report, &out)?;
            for r in &report.rows {
                let p = r.point;
                match r.rate {
                    Some((_, g)) => println!(
                        "λ={} L={} τ={} Δx={}: rate {g:.4}",
                        p.lambda, p.l, p.tau, p.dx
                    ),
                    None => println!(
                        "λ={} L={} τ={} Δx={}: {}",
                        p.lambda,
                        p.l,
                        p.tau,
                        p.dx,
                        r.divergence
                            .map_or("no rate".to_string(), |k| format!("diverged ({k})"))
                    ),
                }
            }
        }
        Command::Compare => {
            let report = cmd_compare(&config)?;
            write_compare(&report, &out)?;
            for run in &report.runs {
                let status = match run.report.failure {
                    None => "converged".to_string(),
                    Some((step, kind)) => format!("diverged at step {step} ({kind})"),
                };
                println!(
                    "{}: {status}, {:.2} inner iterations per step",
                    run.scheme,
                    run.report.average_inner_iterations()
                );
            }
        }
        Command::TauBound => {
            config.validate()?;
            let report = cmd_tau_bound(&config)?;
            println!("{report}");
            if !report.satisfied() {
                eprintln!("warning: the bound is sufficient, not necessary; runs are not blocked");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
