//! Drives a full sweep from a TOML config, as the `decoherence run` command
//! does, and writes results.csv, manifest.json and plot.gp.
//!
//!     cargo run --release --example config_sweep -- configs/band_mu_sweep.toml out/mu

use std::path::PathBuf;

use decoherence::config::RunConfig;
use decoherence::driver;

fn main() -> decoherence::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/rtn_tau_sweep.toml")));
    let cfg = RunConfig::load(&config)?;
    for w in cfg.validate()? {
        eprintln!("warning: {}", w.0);
    }
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("decoherence-config-sweep"));

    let written = driver::run(&cfg, &out)?;
    println!("{} rows -> {}", written.rows, written.results.display());
    println!("manifest -> {}", written.manifest.display());
    if let Some(plot) = written.plot {
        println!("plot script -> {} (gnuplot plot.gp)", plot.display());
    }
    Ok(())
}
