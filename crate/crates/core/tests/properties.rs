//! Cross-module properties of the master equation and the exact oracle.

use decoherence::assembly::{assemble_single_qubit, assemble_sojourn_blip};
use decoherence::oracle::{coupling_from_g, InitialQubit};
use decoherence::volterra::evolve;
use decoherence::{
    band_kernel, exact_evolve, rtn_kernel, BandParams, Complex64, OracleConfig, PhysicalParams,
    RtnParams, Statistics, VolterraSystem,
};
use proptest::prelude::*;

fn band_system(g: f64, delta: f64, mu: f64, temp: f64) -> VolterraSystem {
    let k = band_kernel(&BandParams::fermion(16, mu, temp), 0.02, 150).unwrap();
    assemble_single_qubit(&PhysicalParams::new(g, delta).unwrap(), &k).unwrap()
}

fn state() -> impl Strategy<Value = [Complex64; 4]> {
    prop::array::uniform4((-1.0..1.0f64, -1.0..1.0f64)).prop_map(|v| v.map(|(re, im)| Complex64::new(re, im)))
}

fn max_dev(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn evolution_is_linear(
        x in state(), y in state(), a in -2.0..2.0f64, g in 0.0..0.2f64,
        delta in -2.0..2.0f64, mu in -1.5..1.5f64, temp in 0.0..1.0f64,
    ) {
        let sys = band_system(g, delta, mu, temp);
        let combo: Vec<Complex64> = x.iter().zip(&y).map(|(p, q)| p * a + q).collect();
        let lhs = evolve(&sys, &combo, 150).unwrap().states;
        let sx = evolve(&sys, &x, 150).unwrap().states;
        let sy = evolve(&sys, &y, 150).unwrap().states;
        let rhs: Vec<Vec<Complex64>> = sx
            .iter()
            .zip(&sy)
            .map(|(p, q)| p.iter().zip(q).map(|(u, v)| u * a + v).collect())
            .collect();
        prop_assert!(max_dev(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn uncoupled_qubit_only_precesses(x in state(), delta in -3.0..3.0f64, tau0 in 0.1..10.0f64) {
        let k = rtn_kernel(&RtnParams::new(1.0, tau0).unwrap(), 0.01, 300).unwrap();
        let sys = assemble_single_qubit(&PhysicalParams::new(0.0, delta).unwrap(), &k).unwrap();
        let sol = evolve(&sys, &x, 300).unwrap();
        for s in &sol.states {
            prop_assert_eq!(s[0], x[0]);
            prop_assert_eq!(s[3], x[3]);
            // Heun amplifies a pure rotation by ≈ (Δ dt)⁴/8 per step
            prop_assert!((s[1].norm() - x[1].norm()).abs() < 1e-4);
            prop_assert!((s[2].norm() - x[2].norm()).abs() < 1e-4);
        }
    }

    #[test]
    fn coupled_assembly_freezes_populations_under_rtn(x in state(), g in 0.0..0.2f64, delta in -2.0..2.0f64) {
        // K^R = K^A = 0: the 2×2 memory only reaches the coherences
        let k = rtn_kernel(&RtnParams::new(1.0, 2.0).unwrap(), 0.02, 100).unwrap();
        let p = PhysicalParams::new(g, delta).unwrap();
        let sol = evolve(&assemble_sojourn_blip(&p, &k).unwrap(), &x, 100).unwrap();
        for s in &sol.states {
            prop_assert!((s[0] - x[0]).norm() < 1e-12);
            prop_assert!((s[3] - x[3]).norm() < 1e-12);
        }
    }
}

/// The master equation does not conserve the trace, the exact dynamics does;
/// the master-equation defect grows with g and vanishes as g → 0.
#[test]
fn trace_defect_grows_with_coupling() {
    let (dt, n) = (0.01, 200);
    let band = BandParams::fermion(8, 0.0, 0.0);
    let k = band_kernel(&band, dt, n).unwrap();
    let mut defects = Vec::new();
    for g in [0.0, 0.001, 0.01, 0.1] {
        let sys = assemble_single_qubit(&PhysicalParams::new(g, 1.0).unwrap(), &k).unwrap();
        let x0 = [1.0, 0.5, 0.5, 0.0].map(|v| Complex64::new(v, 0.0));
        let sol = evolve(&sys, &x0, n).unwrap();
        defects.push(sol.states.iter().map(|s| (s[0] - 1.0).norm()).fold(0.0, f64::max));
    }
    assert_eq!(defects[0], 0.0);
    assert!(defects.windows(2).all(|w| w[1] > w[0]), "{defects:?}");

    let oc = OracleConfig {
        n_sites: 8,
        coupling: coupling_from_g(0.1),
        delta: 1.0,
        mu: -2.5,
        temperature: 0.0,
        statistics: Statistics::Fermion,
        initial_qubit: InitialQubit::Plus,
    };
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
    let exact = exact_evolve(&oc, &times).unwrap();
    for m in &exact.states {
        assert!((m.trace() - 1.0).norm() < 1e-12);
    }
}
