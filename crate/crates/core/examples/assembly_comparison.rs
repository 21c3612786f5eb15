//! The two memory-matrix assemblies side by side: the spin-diagonal channel
//! form and the coupled population/coherence (2×2 sojourn–blip) form.

use decoherence::assembly::compare_assemblies;
use decoherence::{band_kernel, rtn_kernel, BandParams, PhysicalParams, RtnParams, SojournBlipState};

fn main() -> decoherence::Result<()> {
    let (dt, steps) = (0.01, 500);
    let params = PhysicalParams::new(0.01, 1.0)?;
    let baths = [
        ("rtn tau0=1", rtn_kernel(&RtnParams::new(1.0, 1.0)?, dt, steps)?),
        ("band mu=0", band_kernel(&BandParams::fermion(32, 0.0, 0.0), dt, steps)?),
        ("band mu=-1 T=0.5", band_kernel(&BandParams::fermion(32, -1.0, 0.5), dt, steps)?),
    ];
    println!("max |spin_diagonal - sojourn_blip_2x2| over t <= 5, initial |+><+|");
    println!("{:<18} {:>10} {:>10} {:>10} {:>10}", "bath", "s_tr", "s_pm", "s_mp", "s_z");
    for (name, kernel) in &baths {
        let c = compare_assemblies(&params, kernel, &SojournBlipState::plus(), steps)?;
        let d = c.max_deviation;
        println!("{name:<18} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e}", d[0], d[1], d[2], d[3]);
    }
    Ok(())
}
