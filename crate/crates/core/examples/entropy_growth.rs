//! Von Neumann entropy of an initially pure |+><+| qubit for several chemical
//! potentials of the bath, including the trace-normalized and raw variants.

use decoherence::{assemble_single_qubit, band_kernel, volterra::evolve_qubit};
use decoherence::{BandParams, PhysicalParams, SojournBlipState};

fn main() -> decoherence::Result<()> {
    let (dt, steps) = (0.01, 750);
    let params = PhysicalParams::new(0.01, 1.0)?;

    println!("{:>5} {:>10} {:>10} {:>10}", "mu", "S(7.5)", "S_raw", "trace");
    for mu in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let kernel = band_kernel(&BandParams::fermion(32, mu, 0.0), dt, steps)?;
        let traj = evolve_qubit(&assemble_single_qubit(&params, &kernel)?, &SojournBlipState::plus(), steps)?;
        let o = traj.observables[steps];
        println!("{mu:>5} {:>10.6} {:>10.6} {:>10.6}", o.entropy, o.entropy_raw, o.trace);
    }
    Ok(())
}
