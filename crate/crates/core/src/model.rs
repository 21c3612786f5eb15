//! Qubit states in sojourn/blip coordinates and their observables.
//!
//! The four-component state `(s_tr, s_pm, s_mp, s_z)` holds the amplitudes of
//! `|↑⟩⟨↑| + |↓⟩⟨↓|`, `|↑⟩⟨↓|`, `|↓⟩⟨↑|` and `|↑⟩⟨↑| - |↓⟩⟨↓|`. The map to the
//! 2×2 density matrix is a linear bijection. Neither Hermiticity nor unit
//! trace survives the memory-kernel dynamics, so observables are defined for
//! arbitrary finite matrices.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// ħ is fixed to one; every rate in the crate is in units of the bath hopping.
pub const HBAR: f64 = 1.0;

/// Eigenvalue floor used by the entropy when no other value is given.
pub const DEFAULT_EIGEN_FLOOR: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Qubit parameters.
///
/// `g` is the dimensionless squared coupling `(γ_N ħ A_⊥)²` and `delta` the
/// level splitting Δ, both in units where ħ = 1 and the bath hopping is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    pub g: f64,
    #[serde(default)]
    pub delta: f64,
}

impl PhysicalParams {
    pub fn new(g: f64, delta: f64) -> Result<Self> {
        let p = Self { g, delta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(Error::invalid(format!("g must be finite and >= 0, got {}", self.g)));
        }
        if !self.delta.is_finite() {
            return Err(Error::invalid("delta must be finite"));
        }
        Ok(())
    }

    pub fn hbar(&self) -> f64 {
        HBAR
    }
}

/// Spin-diagonal density vector `ρ_s`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SojournBlipState {
    /// Trace channel, `|↑⟩⟨↑| + |↓⟩⟨↓|`.
    pub s_tr: Complex64,
    /// `|↑⟩⟨↓|`.
    pub s_pm: Complex64,
    /// `|↓⟩⟨↑|`.
    pub s_mp: Complex64,
    /// Population difference, `|↑⟩⟨↑| - |↓⟩⟨↓|`.
    pub s_z: Complex64,
}

impl SojournBlipState {
    pub const DIM: usize = 4;

    pub fn new(s_tr: Complex64, s_pm: Complex64, s_mp: Complex64, s_z: Complex64) -> Self {
        Self { s_tr, s_pm, s_mp, s_z }
    }

    pub fn from_real(v: [f64; 4]) -> Self {
        Self::from_array(v.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn from_array(v: [Complex64; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn from_slice(v: &[Complex64]) -> Result<Self> {
        match v {
            &[a, b, c, d] => Ok(Self::new(a, b, c, d)),
            _ => Err(Error::DimensionMismatch(format!(
                "a qubit state has 4 components, got {}",
                v.len()
            ))),
        }
    }

    pub fn to_array(&self) -> [Complex64; 4] {
        [self.s_tr, self.s_pm, self.s_mp, self.s_z]
    }

    /// `|↑⟩⟨↑|`
    pub fn up() -> Self {
        Self::from_real([1.0, 0.0, 0.0, 1.0])
    }

    /// `|↓⟩⟨↓|`
    pub fn down() -> Self {
        Self::from_real([1.0, 0.0, 0.0, -1.0])
    }

    /// `|+⟩⟨+|` with `|+⟩ = (|↑⟩ + |↓⟩)/√2`.
    pub fn plus() -> Self {
        Self::from_real([1.0, 0.5, 0.5, 0.0])
    }

    pub fn maximally_mixed() -> Self {
        Self::from_real([1.0, 0.0, 0.0, 0.0])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// A 2×2 complex matrix in the `{|↑⟩, |↓⟩}` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitMatrix {
    pub rho: Matrix2<Complex64>,
}

impl QubitMatrix {
    pub fn new(rho: Matrix2<Complex64>) -> Self {
        Self { rho }
    }

    pub fn from_rows(rows: [[Complex64; 2]; 2]) -> Self {
        Self::new(Matrix2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1]))
    }

    pub fn from_real_rows(rows: [[f64; 2]; 2]) -> Self {
        Self::from_rows(rows.map(|r| r.map(|x| Complex64::new(x, 0.0))))
    }

    pub fn trace(&self) -> Complex64 {
        self.rho[(0, 0)] + self.rho[(1, 1)]
    }

    pub fn population_up(&self) -> f64 {
        self.rho[(0, 0)].re
    }

    pub fn population_down(&self) -> f64 {
        self.rho[(1, 1)].re
    }

    pub fn is_finite(&self) -> bool {
        self.rho.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `(ρ + ρ†)/2`
    pub fn hermitian_part(&self) -> Self {
        Self::new((self.rho + self.rho.adjoint()).scale(0.5))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let h = self.hermitian_part().rho;
        let a = h[(0, 0)].re;
        let d = h[(1, 1)].re;
        let mean = 0.5 * (a + d);
        let radius = (0.5 * (a - d)).hypot(h[(0, 1)].norm());
        [mean - radius, mean + radius]
    }
}

/// `ρ₀₀ = (s_tr + s_z)/2`, `ρ₁₁ = (s_tr − s_z)/2`, `ρ₀₁ = s_pm`, `ρ₁₀ = s_mp`.
pub fn reconstruct(state: &SojournBlipState) -> QubitMatrix {
    QubitMatrix::new(Matrix2::new(
        (state.s_tr + state.s_z) * 0.5,
        state.s_pm,
        state.s_mp,
        (state.s_tr - state.s_z) * 0.5,
    ))
}

/// Inverse of [`reconstruct`].
pub fn decompose(m: &QubitMatrix) -> SojournBlipState {
    let r = &m.rho;
    SojournBlipState::new(
        r[(0, 0)] + r[(1, 1)],
        r[(0, 1)],
        r[(1, 0)],
        r[(0, 0)] - r[(1, 1)],
    )
}

fn clamped_spectrum(m: &QubitMatrix, eps: f64) -> Result<Vec<f64>> {
    if !m.is_finite() {
        return Err(Error::NonFiniteInput("qubit matrix"));
    }
    if !(eps > 0.0) {
        return Err(Error::invalid("eigenvalue floor must be > 0"));
    }
    Ok(m.hermitian_eigenvalues()
        .into_iter()
        .filter(|&l| l >= 0.0)
        .map(|l| l.max(eps))
        .collect())
}

/// Von Neumann entropy `−Σ λ ln λ` of the Hermitian part of `m`.
///
/// Eigenvalues below `eps` are raised to `eps`, negative ones are dropped,
/// and the remaining spectrum is renormalized to unit sum, so the result lies
/// in `[0, ln 2]` even when the trace has drifted away from one.
pub fn entropy(m: &QubitMatrix, eps: f64) -> Result<f64> {
    let spectrum = clamped_spectrum(m, eps)?;
    let total: f64 = spectrum.iter().sum();
    if spectrum.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = spectrum
        .iter()
        .map(|&l| {
            let p = l / total;
            p * p.ln()
        })
        .sum();
    // `0.0 - x` rather than `-x`: a pure state gives +0, not -0
    Ok(0.0 - sum)
}

/// Same clamping as [`entropy`] but without renormalization.
pub fn raw_entropy(m: &QubitMatrix, eps: f64) -> Result<f64> {
    let spectrum = clamped_spectrum(m, eps)?;
    Ok(-spectrum.iter().map(|&l| l * l.ln()).sum::<f64>())
}

/// Generator of the free qubit evolution `−i[H_qb, ρ]` acting on
/// `(s_tr, s_pm, s_mp, s_z)`.
pub fn unitary_generator(params: &PhysicalParams) -> Matrix4<Complex64> {
    let mut a = Matrix4::from_element(ZERO);
    a[(1, 1)] = -I * params.delta;
    a[(2, 2)] = I * params.delta;
    a
}

/// Per-point derived quantities recorded along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    /// `Re s_tr`
    pub trace: f64,
    pub p_up: f64,
    pub p_down: f64,
    pub abs_s_pm: f64,
    pub abs_s_mp: f64,
    /// Renormalized von Neumann entropy.
    pub entropy: f64,
    pub entropy_raw: f64,
}

impl Observables {
    pub fn of(state: &SojournBlipState) -> Result<Self> {
        let m = reconstruct(state);
        Ok(Self {
            trace: state.s_tr.re,
            p_up: m.population_up(),
            p_down: m.population_down(),
            abs_s_pm: state.s_pm.norm(),
            abs_s_mp: state.s_mp.norm(),
            entropy: entropy(&m, DEFAULT_EIGEN_FLOOR)?,
            entropy_raw: raw_entropy(&m, DEFAULT_EIGEN_FLOOR)?,
        })
    }
}

/// Time series of qubit states on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SojournBlipState>,
    pub observables: Vec<Observables>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<SojournBlipState>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} times but {} states",
                times.len(),
                states.len()
            )));
        }
        check_uniform_grid(&times)?;
        let observables = states.iter().map(Observables::of).collect::<Result<_>>()?;
        Ok(Self {
            times,
            states,
            observables,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dt(&self) -> Option<f64> {
        (self.times.len() >= 2).then(|| self.times[1] - self.times[0])
    }

    pub fn last(&self) -> Option<&SojournBlipState> {
        self.states.last()
    }

    pub fn s_tr(&self) -> Vec<Complex64> {
        self.states.iter().map(|s| s.s_tr).collect()
    }

    pub fn s_pm(&self) -> Vec<Complex64> {
        self.states.iter().map(|s| s.s_pm).collect()
    }

    pub fn s_mp(&self) -> Vec<Complex64> {
        self.states.iter().map(|s| s.s_mp).collect()
    }

    pub fn s_z(&self) -> Vec<Complex64> {
        self.states.iter().map(|s| s.s_z).collect()
    }

    pub fn matrices(&self) -> Vec<QubitMatrix> {
        self.states.iter().map(reconstruct).collect()
    }
}

pub(crate) fn check_uniform_grid(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFiniteInput("time grid"));
    }
    if times.len() < 2 {
        return Ok(());
    }
    let dt = times[1] - times[0];
    if !(dt > 0.0) {
        return Err(Error::invalid("time grid must be strictly increasing"));
    }
    let scale = times.last().unwrap().abs().max(1.0);
    for (n, w) in times.windows(2).enumerate() {
        let step = w[1] - w[0];
        if !(step > 0.0) || (step - dt).abs() > 1e-9 * scale {
            return Err(Error::invalid(format!(
                "time grid is not uniform at index {}",
                n + 1
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_matrix_eq(a: &QubitMatrix, b: &QubitMatrix, tol: f64) {
        for (x, y) in a.rho.iter().zip(b.rho.iter()) {
            assert!((x - y).norm() <= tol, "{a:?} != {b:?}");
        }
    }

    #[test]
    fn reconstruct_examples() {
        let up = reconstruct(&SojournBlipState::from_real([1.0, 0.0, 0.0, 1.0]));
        assert_matrix_eq(&up, &QubitMatrix::from_real_rows([[1.0, 0.0], [0.0, 0.0]]), 0.0);

        let fig = reconstruct(&SojournBlipState::from_real([1.0, 1.0, 1.0, 0.0]));
        assert_matrix_eq(&fig, &QubitMatrix::from_real_rows([[0.5, 1.0], [1.0, 0.5]]), 0.0);

        let mixed = reconstruct(&SojournBlipState::maximally_mixed());
        assert_matrix_eq(&mixed, &QubitMatrix::from_real_rows([[0.5, 0.0], [0.0, 0.5]]), 0.0);
    }

    #[test]
    fn entropy_examples() {
        let pure = QubitMatrix::from_real_rows([[1.0, 0.0], [0.0, 0.0]]);
        assert!(entropy(&pure, DEFAULT_EIGEN_FLOOR).unwrap() < 1e-9);

        let mixed = QubitMatrix::from_real_rows([[0.5, 0.0], [0.0, 0.5]]);
        assert_abs_diff_eq!(
            entropy(&mixed, DEFAULT_EIGEN_FLOOR).unwrap(),
            std::f64::consts::LN_2,
            epsilon = 1e-12
        );

        // -(3/4 ln 3/4 + 1/4 ln 1/4)
        let expected = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        assert_abs_diff_eq!(expected, 0.562335, epsilon = 1e-6);
        let m = QubitMatrix::from_real_rows([[0.75, 0.0], [0.0, 0.25]]);
        assert_abs_diff_eq!(entropy(&m, DEFAULT_EIGEN_FLOOR).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn entropy_rejects_non_finite() {
        let m = QubitMatrix::from_real_rows([[f64::NAN, 0.0], [0.0, 1.0]]);
        assert!(matches!(entropy(&m, 1e-12), Err(Error::NonFiniteInput(_))));
        let ok = QubitMatrix::from_real_rows([[1.0, 0.0], [0.0, 0.0]]);
        assert!(entropy(&ok, 0.0).is_err());
    }

    #[test]
    fn entropy_renormalizes_shrunken_trace() {
        let m = QubitMatrix::from_real_rows([[0.25, 0.0], [0.0, 0.25]]);
        assert_abs_diff_eq!(entropy(&m, 1e-12).unwrap(), std::f64::consts::LN_2, epsilon = 1e-12);
        let raw = raw_entropy(&m, 1e-12).unwrap();
        assert_abs_diff_eq!(raw, -0.5 * 0.25f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn negative_eigenvalues_are_dropped() {
        // Hermitian part [[1,1],[1,0]] has eigenvalues (1 ± √5)/2.
        let m = reconstruct(&SojournBlipState::from_real([1.0, 1.0, 1.0, 1.0]));
        let [lo, hi] = m.hermitian_eigenvalues();
        assert_abs_diff_eq!(lo, (1.0 - 5f64.sqrt()) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(hi, (1.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-14);
        assert_eq!(entropy(&m, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn unitary_generator_examples() {
        let zero = unitary_generator(&PhysicalParams::new(0.1, 0.0).unwrap());
        assert!(zero.iter().all(|z| *z == ZERO));

        let a = unitary_generator(&PhysicalParams::new(0.0, 1.0).unwrap());
        let x = nalgebra::Vector4::new(ZERO, c(1.0, 0.0), ZERO, ZERO);
        let dx = a * x;
        assert_eq!(dx, nalgebra::Vector4::new(ZERO, c(0.0, -1.0), ZERO, ZERO));
    }

    #[test]
    fn generator_exponential_rotates_coherence() {
        // exp(A t) is diagonal: s_pm picks up exp(-iΔt). Δ=2, t=π/2 gives -1.
        let delta = 2.0;
        let t = std::f64::consts::FRAC_PI_2;
        let a = unitary_generator(&PhysicalParams::new(0.0, delta).unwrap());
        // independent series evaluation of exp(A t) on the s_pm entry
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..60 {
            term = term * a[(1, 1)] * t / k as f64;
            sum += term;
        }
        assert!((sum - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((Complex64::new(0.0, -delta * t).exp() - sum).norm() < 1e-12);
    }

    #[test]
    fn trajectory_rejects_bad_grids() {
        let s = SojournBlipState::up();
        assert!(Trajectory::new(vec![0.0, 1.0], vec![s]).is_err());
        assert!(Trajectory::new(vec![0.0, 1.0, 1.5], vec![s; 3]).is_err());
        assert!(Trajectory::new(vec![0.0, -1.0], vec![s; 2]).is_err());
        let t = Trajectory::new(vec![0.0, 0.5, 1.0], vec![s; 3]).unwrap();
        assert_eq!(t.observables.len(), 3);
        assert_eq!(t.observables[0].p_up, 1.0);
    }

    fn arb_complex() -> impl Strategy<Value = Complex64> {
        (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(a, b)| Complex64::new(a, b))
    }

    fn random_unitary(theta: f64, phi: f64, lambda: f64, global: f64) -> Matrix2<Complex64> {
        let (s, co) = (theta / 2.0).sin_cos();
        let e = |x: f64| Complex64::from_polar(1.0, x);
        Matrix2::new(
            e(global) * co,
            -e(global + lambda) * s,
            e(global + phi) * s,
            e(global + phi + lambda) * co,
        )
    }

    proptest! {
        #[test]
        fn decompose_reconstruct_roundtrip(a in arb_complex(), b in arb_complex(), cc in arb_complex(), d in arb_complex()) {
            let s = SojournBlipState::new(a, b, cc, d);
            let back = decompose(&reconstruct(&s));
            for (x, y) in s.to_array().iter().zip(back.to_array().iter()) {
                prop_assert!((x - y).norm() <= 1e-14 * (1.0 + x.norm()));
            }
            let m = QubitMatrix::from_rows([[a, b], [cc, d]]);
            let m2 = reconstruct(&decompose(&m));
            for (x, y) in m.rho.iter().zip(m2.rho.iter()) {
                prop_assert!((x - y).norm() <= 1e-14 * (1.0 + x.norm()));
            }
        }

        #[test]
        fn entropy_is_unitarily_invariant(
            p in 0.0..1.0f64, re in -0.5..0.5f64, im in -0.5..0.5f64,
            theta in 0.0..6.3f64, phi in 0.0..6.3f64, lambda in 0.0..6.3f64, global in 0.0..6.3f64,
        ) {
            let m = QubitMatrix::from_rows([
                [Complex64::new(p, 0.0), Complex64::new(re, im)],
                [Complex64::new(re, -im), Complex64::new(1.0 - p, 0.0)],
            ]);
            let u = random_unitary(theta, phi, lambda, global);
            let rotated = QubitMatrix::new(u * m.rho * u.adjoint());
            let s1 = entropy(&m, DEFAULT_EIGEN_FLOOR).unwrap();
            let s2 = entropy(&rotated, DEFAULT_EIGEN_FLOOR).unwrap();
            prop_assert!((s1 - s2).abs() < 1e-10);
        }

        #[test]
        fn entropy_is_bounded(a in arb_complex(), b in arb_complex(), cc in arb_complex(), d in arb_complex()) {
            let s = entropy(&QubitMatrix::from_rows([[a, b], [cc, d]]), DEFAULT_EIGEN_FLOOR).unwrap();
            prop_assert!((0.0..=std::f64::consts::LN_2 + 1e-9).contains(&s));
        }

        #[test]
        fn rank_one_projectors_are_pure(theta in 0.0..3.2f64, phi in 0.0..6.3f64) {
            let v = [Complex64::new((theta / 2.0).cos(), 0.0), Complex64::from_polar((theta / 2.0).sin(), phi)];
            let m = QubitMatrix::from_rows([
                [v[0] * v[0].conj(), v[0] * v[1].conj()],
                [v[1] * v[0].conj(), v[1] * v[1].conj()],
            ]);
            prop_assert!(entropy(&m, DEFAULT_EIGEN_FLOOR).unwrap() < 1e-9);
        }

        #[test]
        fn generator_leaves_trace_and_population_rows_zero(delta in -100.0..100.0f64) {
            let a = unitary_generator(&PhysicalParams { g: 0.0, delta });
            for col in 0..4 {
                prop_assert_eq!(a[(0, col)], ZERO);
                prop_assert_eq!(a[(3, col)], ZERO);
            }
        }
    }
}
