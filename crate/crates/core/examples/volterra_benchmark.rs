//! The integrator on its own: x' = -∫₀ᵗ x has the solution cos t. Prints the
//! error for a sequence of step sizes and the observed order.

use decoherence::{evolve, Complex64, VolterraSystem};
use nalgebra::DMatrix;

fn cosine(dt: f64, t_end: f64) -> decoherence::Result<(VolterraSystem, usize)> {
    let n = (t_end / dt).round() as usize;
    let scalar = |v: f64| DMatrix::from_element(1, 1, Complex64::new(v, 0.0));
    Ok((VolterraSystem::new(scalar(0.0), vec![scalar(-1.0); n + 1], dt)?, n))
}

fn main() -> decoherence::Result<()> {
    let mut prev: Option<f64> = None;
    println!("{:>8} {:>12} {:>7}", "dt", "max error", "order");
    for dt in [0.1, 0.05, 0.025, 0.0125, 0.00625] {
        let (sys, n) = cosine(dt, 5.0)?;
        let sol = evolve(&sys, &[Complex64::new(1.0, 0.0)], n)?;
        let err = sol.times.iter().zip(&sol.states).map(|(t, x)| (x[0] - t.cos()).norm()).fold(0.0, f64::max);
        let order = prev.map(|p| format!("{:.3}", (p / err).log2())).unwrap_or_default();
        println!("{dt:>8} {err:>12.3e} {order:>7}");
        prev = Some(err);
    }
    let order = decoherence::convergence_order(|dt| Ok(cosine(dt, 5.0)?.0), &[Complex64::new(1.0, 0.0)], 0.01, 5.0)?;
    println!("self-convergence order at dt = 0.01: {order:.4}");
    Ok(())
}
