//! Bath kernels: a single band, two spin species, and two bands split by
//! delta_b. With delta_b = 0 the multiband kernel is an exact multiple of the
//! single band; a splitting beats the bands against each other.

use decoherence::{band_kernel, multiband_kernel, BandParams, Statistics};

fn main() -> decoherence::Result<()> {
    let (dt, steps) = (0.05, 120);
    let single = BandParams::fermion(64, 0.0, 0.2);
    let degenerate = BandParams { n_bands: 2, n_spins: 2, ..single };
    let split = BandParams { delta_b: 0.8, ..degenerate };
    let bosons = BandParams { statistics: Statistics::Boson, mu: -2.2, ..single };

    let k1 = band_kernel(&single, dt, steps)?;
    let k4 = multiband_kernel(&degenerate, dt, steps)?;
    let ks = multiband_kernel(&split, dt, steps)?;
    let kb = band_kernel(&bosons, dt, steps)?;

    let worst = (0..k1.len())
        .map(|n| (k4.k_k[n] - k1.k_k[n] * 4.0).norm())
        .fold(0.0, f64::max);
    println!("degenerate 2 bands x 2 spins vs 4 x single band: max |diff| = {worst:.1e}\n");

    println!("{:>5} {:>22} {:>22} {:>22}", "t", "K^K single", "K^K split", "K^K bosons");
    for n in (0..=steps).step_by(10) {
        let f = |z: decoherence::Complex64| format!("{:+.4}{:+.4}i", z.re, z.im);
        println!("{:>5.2} {:>22} {:>22} {:>22}", k1.time(n), f(k1.k_k[n]), f(ks.k_k[n]), f(kb.k_k[n]));
    }
    Ok(())
}
