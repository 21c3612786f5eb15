//! Coherences of a qubit in a half-filled fermion band: |s_pm| decays slowly
//! while s_mp precesses at the level splitting.

use decoherence::{assemble_single_qubit, band_kernel, volterra::evolve_qubit};
use decoherence::{BandParams, PhysicalParams, SojournBlipState};

fn main() -> decoherence::Result<()> {
    let bath = BandParams::fermion(32, 0.0, 0.0);
    // keep t below the ring horizon N/4, after which the finite bath echoes
    let (dt, steps) = (0.01, 750);
    let kernel = band_kernel(&bath, dt, steps)?;
    let sys = assemble_single_qubit(&PhysicalParams::new(0.01, 1.0)?, &kernel)?;

    let pm = evolve_qubit(&sys, &SojournBlipState::from_real([0.0, 1.0, 0.0, 0.0]), steps)?;
    let mp = evolve_qubit(&sys, &SojournBlipState::from_real([0.0, 0.0, 1.0, 0.0]), steps)?;

    println!("{:>5} {:>10} {:>10} {:>10}", "t", "|s_pm|", "Re s_mp", "Im s_mp");
    for n in (0..=steps).step_by(50) {
        let z = mp.states[n].s_mp;
        println!("{:>5.2} {:>10.6} {:>10.6} {:>10.6}", pm.times[n], pm.observables[n].abs_s_pm, z.re, z.im);
    }
    Ok(())
}
