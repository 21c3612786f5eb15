//! Command-line front end for the `decoherence` library.
//!
//! Exit codes: 0 success, 1 invalid arguments, config or I/O failure, 2 numerical
//! instability, 3 oracle comparison outside tolerance.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use decoherence::config::RunConfig;
use decoherence::driver;
use decoherence::{Assembly, Error};

#[derive(Parser)]
#[command(name = "decoherence", version, about = "Qubit decoherence in non-Markovian baths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the master equation (with sweep) and write results.csv
    Run(Common),
    /// Compare against exact diagonalization and write compare.csv
    OracleCompare(Common),
    /// Tabulate the bath kernel and write kernel.csv
    DumpKernel(Common),
    /// Estimate the integrator's convergence order by step halving
    Convergence(Common),
}

#[derive(Args)]
struct Common {
    /// TOML (or .json) run configuration
    config: PathBuf,
    /// Output directory [default: config `output`, then $DECOHERENCE_OUT, then ./out]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps
    #[arg(long, env = "DECOHERENCE_THREADS")]
    threads: Option<usize>,
    /// Override the config's memory-matrix assembly (spin_diagonal | sojourn_blip_2x2)
    #[arg(long)]
    assembly: Option<Assembly>,
}

impl Common {
    fn load(&self) -> Result<(RunConfig, PathBuf), Error> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(a) = self.assembly {
            cfg.assembly = a;
        }
        for w in cfg.validate()? {
            eprintln!("warning: {}", w.0);
        }
        if let Some(n) = self.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        }
        let out = driver::resolve_output(self.out.as_deref(), &cfg);
        Ok((cfg, out))
    }
}

fn exec(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Run(c) => {
            let (cfg, out) = c.load()?;
            let o = driver::run(&cfg, &out)?;
            println!("wrote {} rows to {}", o.rows, o.results.display());
        }
        Command::DumpKernel(c) => {
            let (cfg, out) = c.load()?;
            println!("wrote {}", driver::dump_kernel(&cfg, &out)?.display());
        }
        Command::Convergence(c) => {
            let (cfg, out) = c.load()?;
            let r = driver::convergence(&cfg, &out)?;
            println!(
                "dt = {}: |x(dt) - x(dt/2)| = {:.3e}, |x(dt/2) - x(dt/4)| = {:.3e}, order = {:.3}",
                r.dt,
                r.coarse_error,
                r.fine_error,
                r.order()
            );
        }
        Command::OracleCompare(c) => {
            let (cfg, out) = c.load()?;
            let report = driver::oracle_compare(&cfg, &out)?;
            for d in &report.deviations {
                println!(
                    "{:<10} max |dev| = {:.3e}  rms = {:.3e}  max rel = {:.3e}",
                    d.name, d.max_abs, d.rms, d.max_rel
                );
            }
            println!("wrote {}", out.join(driver::COMPARE_FILE).display());
            if !report.passed {
                eprintln!(
                    "oracle comparison failed: p_up relative deviation {:.3e} > {}",
                    report.p_up().max_rel,
                    report.tolerance
                );
                return Ok(ExitCode::from(3));
            }
            println!("PASS (tolerance {})", report.tolerance);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonFinite { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    // argument errors share exit code 1 with config errors; 2 means instability
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match exec(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
