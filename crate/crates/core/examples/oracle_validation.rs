//! Checks the master equation against exact diagonalization of qubit plus an
//! 8-site ring in the single-excitation sector, at weak and strong coupling.

use decoherence::oracle::{compare, coupling_from_g, InitialQubit};
use decoherence::{assemble_single_qubit, band_kernel, exact_evolve, volterra::evolve_qubit};
use decoherence::{BandParams, OracleConfig, PhysicalParams, Statistics};

fn main() -> decoherence::Result<()> {
    let (dt, steps) = (0.005, 2000);
    let band = BandParams::fermion(8, -2.5, 0.0);
    let kernel = band_kernel(&band, dt, steps)?;

    for g in [0.000625, 0.0025, 0.01, 0.25] {
        let sys = assemble_single_qubit(&PhysicalParams::new(g, 0.0)?, &kernel)?;
        let master = evolve_qubit(&sys, &InitialQubit::Up.sojourn_blip(), steps)?;
        let oracle = exact_evolve(
            &OracleConfig {
                n_sites: band.n_sites,
                coupling: coupling_from_g(g),
                delta: 0.0,
                mu: band.mu,
                temperature: 0.0,
                statistics: Statistics::Fermion,
                initial_qubit: InitialQubit::Up,
            },
            &master.times,
        )?;
        let report = compare(&oracle, &master, 0.05)?;
        println!(
            "g = {g:<9} p_up(10): exact {:.6}, master {:.6}; max rel dev {:.3e} -> {}",
            oracle.states[steps].population_up(),
            master.observables[steps].p_up,
            report.p_up().max_rel,
            if report.passed { "within 5%" } else { "outside 5%" }
        );
    }
    Ok(())
}
