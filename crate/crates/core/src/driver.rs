//! Runs configured simulations and writes their outputs.
//!
//! Every entry point takes a validated [`RunConfig`] and an output directory:
//!
//! * [`run`] writes `results.csv`, `manifest.json` and optionally `plot.gp`
//! * [`dump_kernel`] writes `kernel.csv`
//! * [`oracle_compare`] writes `compare.csv`
//! * [`convergence`] writes `convergence.csv`
//!
//! Sweep points are integrated in parallel; rows are always written in
//! ascending sweep value, then time, so output does not depend on scheduling.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::assembly::assemble;
use crate::config::{BathConfig, RunConfig};
use crate::error::{Error, Result};
use crate::kernels::{band_kernel, multiband_kernel, rtn_kernel, KernelTable};
use crate::model::Trajectory;
use crate::oracle::{compare, compare_series, coupling_from_g, exact_evolve, CompareReport, OracleConfig};
use crate::volterra::{evolve_qubit, self_convergence, SelfConvergence};

pub const RESULTS_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const PLOT_FILE: &str = "plot.gp";
pub const KERNEL_FILE: &str = "kernel.csv";
pub const COMPARE_FILE: &str = "compare.csv";
pub const CONVERGENCE_FILE: &str = "convergence.csv";

/// Environment variable naming the default output directory.
pub const OUTPUT_ENV: &str = "DECOHERENCE_OUT";

/// Kernel table for a bath on `n_steps + 1` samples of `dt`.
pub fn build_kernel(bath: &BathConfig, dt: f64, n_steps: usize) -> Result<KernelTable> {
    match bath {
        BathConfig::Rtn(p) => rtn_kernel(p, dt, n_steps),
        BathConfig::Band(p) => band_kernel(p, dt, n_steps),
        BathConfig::Multiband(p) => multiband_kernel(p, dt, n_steps),
    }
}

/// One line of `results.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub sweep_value: Option<f64>,
    pub t: f64,
    pub s_tr_re: f64,
    pub s_tr_im: f64,
    pub s_pm_re: f64,
    pub s_pm_im: f64,
    pub s_mp_re: f64,
    pub s_mp_im: f64,
    pub s_z_re: f64,
    pub s_z_im: f64,
    pub trace: f64,
    pub p_up: f64,
    pub p_down: f64,
    pub abs_s_pm: f64,
    pub abs_s_mp: f64,
    pub entropy: f64,
    pub entropy_raw: f64,
}

fn rows_of(sweep_value: Option<f64>, traj: &Trajectory) -> Vec<ResultRow> {
    traj.times
        .iter()
        .zip(&traj.states)
        .zip(&traj.observables)
        .map(|((&t, s), o)| ResultRow {
            sweep_value,
            t,
            s_tr_re: s.s_tr.re,
            s_tr_im: s.s_tr.im,
            s_pm_re: s.s_pm.re,
            s_pm_im: s.s_pm.im,
            s_mp_re: s.s_mp.re,
            s_mp_im: s.s_mp.im,
            s_z_re: s.s_z.re,
            s_z_im: s.s_z.im,
            trace: o.trace,
            p_up: o.p_up,
            p_down: o.p_down,
            abs_s_pm: o.abs_s_pm,
            abs_s_mp: o.abs_s_mp,
            entropy: o.entropy,
            entropy_raw: o.entropy_raw,
        })
        .collect()
}

/// Trajectory of a single bath configuration.
pub fn simulate_point(cfg: &RunConfig, bath: &BathConfig) -> Result<Trajectory> {
    let n = cfg.n_steps();
    let kernel = build_kernel(bath, cfg.grid.dt, n)?;
    let sys = assemble(&cfg.physical, &kernel, cfg.assembly)?;
    evolve_qubit(&sys, &cfg.initial_state(), n)
}

/// Integrates every sweep point, returning `(sweep value, trajectory)` sorted
/// by sweep value.
pub fn simulate(cfg: &RunConfig) -> Result<Vec<(Option<f64>, Trajectory)>> {
    let points = cfg.points()?;
    let mut out = points
        .par_iter()
        .map(|(value, bath)| Ok((*value, simulate_point(cfg, bath)?)))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| match (a.0, b.0) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        _ => std::cmp::Ordering::Equal,
    });
    Ok(out)
}

pub fn result_rows(runs: &[(Option<f64>, Trajectory)]) -> Vec<ResultRow> {
    runs.iter().flat_map(|(v, traj)| rows_of(*v, traj)).collect()
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Files written by [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub results: PathBuf,
    pub manifest: PathBuf,
    pub plot: Option<PathBuf>,
    pub rows: usize,
}

/// Simulates `cfg` and writes `results.csv`, `manifest.json` and `plot.gp`
/// into `out_dir`. The manifest is `cfg` with the output directory resolved.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<RunOutput> {
    let runs = simulate(cfg)?;
    let rows = result_rows(&runs);
    create_dir(out_dir)?;

    let results = out_dir.join(RESULTS_FILE);
    write_csv(&results, &rows)?;

    let manifest = out_dir.join(MANIFEST_FILE);
    let resolved = RunConfig {
        output: Some(out_dir.to_path_buf()),
        ..cfg.clone()
    };
    fs::write(&manifest, resolved.to_json()?).map_err(|e| Error::io(&manifest, e))?;

    let plot = if cfg.plot {
        let path = out_dir.join(PLOT_FILE);
        fs::write(&path, plot_script(cfg, &runs)).map_err(|e| Error::io(&path, e))?;
        Some(path)
    } else {
        None
    };
    Ok(RunOutput {
        results,
        manifest,
        plot,
        rows: rows.len(),
    })
}

/// Gnuplot script drawing trace, populations, coherences and entropy from
/// `results.csv`, one curve per sweep value.
pub fn plot_script(cfg: &RunConfig, runs: &[(Option<f64>, Trajectory)]) -> String {
    let label = cfg
        .sweep
        .as_ref()
        .map(|s| s.parameter.to_string())
        .unwrap_or_default();
    let panels = [
        ("trace", 11, "Re s_tr"),
        ("p_up", 12, "p_up"),
        ("p_down", 13, "p_down"),
        ("abs_s_pm", 14, "|s_pm|"),
        ("abs_s_mp", 15, "|s_mp|"),
        ("entropy", 16, "von Neumann entropy"),
    ];
    let mut s = String::new();
    s.push_str("# gnuplot script generated by decoherence; run with `gnuplot plot.gp`\n");
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 1400,900\n");
    s.push_str("set output 'plot.png'\n");
    s.push_str("set multiplot layout 2,3\n");
    s.push_str("set xlabel 't'\n");
    s.push_str("set key outside right\n");
    for (_, column, title) in panels {
        s.push_str(&format!("set title '{title}'\n"));
        let curves: Vec<String> = runs
            .iter()
            .map(|(value, _)| match value {
                Some(v) => format!(
                    "'results.csv' every ::1 using ($1=={v:?} ? $2 : 1/0):{column} with lines title '{label} = {v}'"
                ),
                None => format!("'results.csv' every ::1 using 2:{column} with lines notitle"),
            })
            .collect();
        s.push_str(&format!("plot {}\n", curves.join(", \\\n     ")));
    }
    s.push_str("unset multiplot\n");
    s
}

#[derive(Debug, Clone, Serialize)]
struct KernelRow {
    n: usize,
    t: f64,
    k_r_re: f64,
    k_r_im: f64,
    k_a_re: f64,
    k_a_im: f64,
    k_k_re: f64,
    k_k_im: f64,
}

/// Writes the kernel table of the (unswept) bath to `kernel.csv`.
pub fn dump_kernel(cfg: &RunConfig, out_dir: &Path) -> Result<PathBuf> {
    let table = build_kernel(&cfg.bath, cfg.grid.dt, cfg.n_steps())?;
    let rows: Vec<KernelRow> = (0..table.len())
        .map(|n| KernelRow {
            n,
            t: table.time(n),
            k_r_re: table.k_r[n].re,
            k_r_im: table.k_r[n].im,
            k_a_re: table.k_a[n].re,
            k_a_im: table.k_a[n].im,
            k_k_re: table.k_k[n].re,
            k_k_im: table.k_k[n].im,
        })
        .collect();
    create_dir(out_dir)?;
    let path = out_dir.join(KERNEL_FILE);
    write_csv(&path, &rows)?;
    Ok(path)
}

/// Exact-diagonalization settings matching a band config.
pub fn oracle_config(cfg: &RunConfig) -> Result<OracleConfig> {
    let band = match cfg.bath {
        BathConfig::Band(p) => p,
        _ => {
            return Err(Error::Config(format!(
                "oracle comparison needs a single band bath, got {}",
                cfg.bath.kind()
            )))
        }
    };
    if band.temperature != 0.0 {
        return Err(Error::Config("oracle comparison needs temperature = 0".into()));
    }
    if band.mu >= band.lowest_energy() {
        return Err(Error::Config(format!(
            "oracle comparison needs an empty band (mu < {}), got mu = {}",
            band.lowest_energy(),
            band.mu
        )));
    }
    if band.site_separation != 0 {
        return Err(Error::Config("oracle comparison needs the on-site kernel".into()));
    }
    Ok(OracleConfig {
        n_sites: band.n_sites,
        coupling: coupling_from_g(cfg.physical.g),
        delta: cfg.physical.delta,
        mu: band.mu,
        temperature: band.temperature,
        statistics: band.statistics,
        initial_qubit: cfg.oracle.unwrap_or_default().initial_qubit,
    })
}

#[derive(Debug, Clone, Serialize)]
struct CompareRow {
    t: f64,
    p_up_oracle: f64,
    p_up_master: f64,
    p_down_oracle: f64,
    p_down_master: f64,
    coherence_oracle: f64,
    coherence_master: f64,
    dev_p_up: f64,
    dev_p_down: f64,
    dev_coherence: f64,
}

/// Runs the master equation and the exact oracle from the qubit state in the
/// `[oracle]` section, writes `compare.csv` and reports the deviations.
pub fn oracle_compare(cfg: &RunConfig, out_dir: &Path) -> Result<CompareReport> {
    let (report, rows) = oracle_compare_rows(cfg)?;
    create_dir(out_dir)?;
    write_csv(&out_dir.join(COMPARE_FILE), &rows)?;
    Ok(report)
}

/// [`oracle_compare`] without writing files.
pub fn oracle_report(cfg: &RunConfig) -> Result<CompareReport> {
    Ok(oracle_compare_rows(cfg)?.0)
}

fn oracle_compare_rows(cfg: &RunConfig) -> Result<(CompareReport, Vec<CompareRow>)> {
    let oc = oracle_config(cfg)?;
    let section = cfg.oracle.unwrap_or_default();
    let master_cfg = RunConfig {
        initial: oc.initial_qubit.sojourn_blip().into(),
        sweep: None,
        ..cfg.clone()
    };
    let master = simulate_point(&master_cfg, &master_cfg.bath)?;
    let oracle = exact_evolve(&oc, &master.times)?;
    let report = compare(&oracle, &master, section.tolerance)?;
    let s = compare_series(&oracle, &master)?;
    let rows = master
        .times
        .iter()
        .enumerate()
        .map(|(k, &t)| CompareRow {
            t,
            p_up_oracle: s.p_up.0[k],
            p_up_master: s.p_up.1[k],
            p_down_oracle: s.p_down.0[k],
            p_down_master: s.p_down.1[k],
            coherence_oracle: s.coherence.0[k],
            coherence_master: s.coherence.1[k],
            dev_p_up: s.p_up.1[k] - s.p_up.0[k],
            dev_p_down: s.p_down.1[k] - s.p_down.0[k],
            dev_coherence: s.coherence.1[k] - s.coherence.0[k],
        })
        .collect();
    Ok((report, rows))
}

/// Step-halving study of the configured (unswept) system at `grid.dt`.
pub fn convergence(cfg: &RunConfig, out_dir: &Path) -> Result<SelfConvergence> {
    let t_end = cfg.n_steps() as f64 * cfg.grid.dt;
    let result = self_convergence(
        |dt| {
            let n = (t_end / dt).round() as usize;
            assemble(&cfg.physical, &build_kernel(&cfg.bath, dt, n)?, cfg.assembly)
        },
        &cfg.initial_state().to_array(),
        cfg.grid.dt,
        t_end,
    )?;
    create_dir(out_dir)?;
    let path = out_dir.join(CONVERGENCE_FILE);
    let mut f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    writeln!(f, "dt,coarse_error,fine_error,ratio,order")
        .and_then(|_| {
            writeln!(
                f,
                "{},{},{},{},{}",
                result.dt,
                result.coarse_error,
                result.fine_error,
                result.ratio(),
                result.order()
            )
        })
        .map_err(|e| Error::io(&path, e))?;
    Ok(result)
}

/// `--out` flag, then the config's `output`, then `$DECOHERENCE_OUT`, then `out`.
pub fn resolve_output(flag: Option<&Path>, cfg: &RunConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.output.clone())
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{GridConfig, InitialConfig, SweepConfig, SweepParameter};
    use crate::kernels::{BandParams, RtnParams};
    use crate::model::{PhysicalParams, SojournBlipState};

    fn rtn_config() -> RunConfig {
        RunConfig {
            physical: PhysicalParams::new(0.01, 0.5).unwrap(),
            bath: BathConfig::Rtn(RtnParams::new(1.0, 1.0).unwrap()),
            grid: GridConfig { dt: 0.05, t_max: 2.0 },
            initial: SojournBlipState::plus().into(),
            sweep: Some(SweepConfig {
                parameter: SweepParameter::Tau0,
                values: vec![4.0, 0.5, 1.0],
            }),
            output: None,
            assembly: Default::default(),
            plot: true,
            oracle: None,
        }
    }

    #[test]
    fn rows_are_sorted_by_sweep_value() {
        let runs = simulate(&rtn_config()).unwrap();
        let values: Vec<_> = runs.iter().map(|r| r.0.unwrap()).collect();
        assert_eq!(values, vec![0.5, 1.0, 4.0]);
        let rows = result_rows(&runs);
        assert_eq!(rows.len(), 3 * 41);
        assert!(rows.windows(2).all(|w| w[0].sweep_value < w[1].sweep_value
            || (w[0].sweep_value == w[1].sweep_value && w[0].t < w[1].t)));
    }

    #[test]
    fn zero_coupling_gives_constant_columns() {
        let cfg = RunConfig {
            physical: PhysicalParams::new(0.0, 0.0).unwrap(),
            initial: InitialConfig {
                re: [1.0, 0.3, 0.3, 0.2],
                im: [0.0; 4],
            },
            ..rtn_config()
        };
        let rows = result_rows(&simulate(&cfg).unwrap());
        for r in &rows {
            assert_eq!(r.s_tr_re, 1.0);
            assert_eq!(r.s_z_re, 0.2);
            assert_eq!(r.entropy, rows[0].entropy);
        }
    }

    #[test]
    fn oracle_needs_cold_empty_band() {
        let mut cfg = rtn_config();
        assert!(oracle_config(&cfg).is_err());
        cfg.bath = BathConfig::Band(BandParams::fermion(8, 0.0, 0.0));
        assert!(oracle_config(&cfg).is_err());
        cfg.bath = BathConfig::Band(BandParams::fermion(8, -2.5, 0.1));
        assert!(oracle_config(&cfg).is_err());
        cfg.bath = BathConfig::Band(BandParams::fermion(8, -2.5, 0.0));
        let oc = oracle_config(&cfg).unwrap();
        assert_eq!(oc.coupling, 0.05);
    }

    #[test]
    fn output_resolution_order() {
        let mut cfg = rtn_config();
        assert_eq!(resolve_output(Some(Path::new("a")), &cfg), PathBuf::from("a"));
        cfg.output = Some(PathBuf::from("b"));
        assert_eq!(resolve_output(None, &cfg), PathBuf::from("b"));
    }
}
