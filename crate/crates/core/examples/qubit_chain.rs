//! Three qubits on a shared band. Pair blocks (i, j) of the chain state are
//! coupled through the bath kernel at each inter-site separation.

use decoherence::assembly::{assemble_chain, chain_index, chain_initial_state, ChainConfig};
use decoherence::{band_kernel, evolve, BandParams, PhysicalParams, SojournBlipState};

fn main() -> decoherence::Result<()> {
    let n_qubits = 3;
    let (dt, steps) = (0.02, 300);
    let kernels = (0..n_qubits as i64)
        .map(|d| band_kernel(&BandParams { site_separation: d, ..BandParams::fermion(48, 0.0, 0.0) }, dt, steps))
        .collect::<decoherence::Result<Vec<_>>>()?;
    let chain = ChainConfig { splittings: vec![1.0, 1.1, 0.9], kernels };
    let sys = assemble_chain(&PhysicalParams::new(0.02, 1.0)?, &chain)?;

    // only the first site starts excited
    let x0 = chain_initial_state(n_qubits, |i, j| {
        if i == 0 && j == 0 {
            SojournBlipState::up()
        } else {
            SojournBlipState::plus()
        }
    });
    let sol = evolve(&sys, &x0, steps)?;

    // the bath carries site 0's excitation into the pair blocks (1, 0) and (2, 0)
    println!("{:>5} {:>12} {:>12} {:>12}", "t", "s_z(0,0)", "s_z(1,0)", "s_z(2,0)");
    for n in (0..=steps).step_by(50) {
        let z: Vec<f64> = (0..n_qubits).map(|i| sol.states[n][chain_index(n_qubits, i, 0, 3)].re).collect();
        println!("{:>5.2} {:>12.6} {:>12.6} {:>12.6}", sol.times[n], z[0], z[1], z[2]);
    }
    Ok(())
}
