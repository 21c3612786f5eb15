//! Trace of the qubit density matrix under random telegraph noise, for a range
//! of correlation times. Slower noise (larger tau0) mixes the state more.
//!
//!     cargo run --release --example rtn_trace_sweep

use decoherence::{assemble_single_qubit, rtn_kernel, volterra::evolve_qubit};
use decoherence::{PhysicalParams, RtnParams, SojournBlipState};

fn main() -> decoherence::Result<()> {
    let params = PhysicalParams::new(0.01, 1.0)?;
    let (dt, steps) = (0.01, 2000);

    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "tau0", "t=5", "t=10", "t=15", "t=20");
    for tau0 in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let kernel = rtn_kernel(&RtnParams::new(1.0, tau0)?, dt, steps)?;
        let sys = assemble_single_qubit(&params, &kernel)?;
        let traj = evolve_qubit(&sys, &SojournBlipState::from_real([1.0, 0.0, 0.0, 0.0]), steps)?;
        let tr: Vec<f64> = [500, 1000, 1500, 2000].iter().map(|&n| traj.observables[n].trace).collect();
        println!("{tau0:>6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}", tr[0], tr[1], tr[2], tr[3]);
    }
    Ok(())
}
