//! Time-domain memory kernels of the bath.
//!
//! A [`KernelTable`] samples the retarded, advanced and Keldysh kernels on a
//! uniform grid of time differences `τ = n·dt ≥ 0`. Free tight-binding baths
//! are synthesized by a discrete inverse transform over `N` equally spaced
//! momenta with dispersion `ω(k) = −2 cos k`:
//!
//! ```text
//! K^R(τ) = −i/N Σ_k e^{ikd} e^{−i(ω(k)−μ)τ}
//! K^K(τ) = −i/N Σ_k (1 ∓ 2 n_k) e^{ikd} e^{−i(ω(k)−μ)τ}
//! ```
//!
//! The advanced kernel only touches the memory window at `τ = 0`, so it is a
//! single endpoint sample.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Maximum group velocity of the cosine band.
pub const BAND_VELOCITY: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Fermion,
    Boson,
}

impl Statistics {
    /// `+1` in the Fermi denominator, `−1` in the Bose one.
    fn sign(self) -> f64 {
        match self {
            Statistics::Fermion => 1.0,
            Statistics::Boson => -1.0,
        }
    }
}

/// Random telegraph noise: `K^K(τ) = i J_C e^{−τ/τ₀}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RtnParams {
    pub j_c: f64,
    pub tau0: f64,
}

impl RtnParams {
    pub fn new(j_c: f64, tau0: f64) -> Result<Self> {
        let p = Self { j_c, tau0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau0.is_finite() && self.tau0 > 0.0) {
            return Err(Error::invalid(format!("tau0 must be > 0, got {}", self.tau0)));
        }
        if !(self.j_c.is_finite() && self.j_c >= 0.0) {
            return Err(Error::invalid(format!("j_c must be >= 0, got {}", self.j_c)));
        }
        Ok(())
    }
}

/// Free one-dimensional tight-binding bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BandParams {
    pub statistics: Statistics,
    /// Number of lattice sites, i.e. of momenta in the discrete transform.
    pub n_sites: usize,
    pub mu: f64,
    pub temperature: f64,
    /// Band offset Δ_B; band 1 sits at `ω − Δ_B`, band 2 at `ω + Δ_B`.
    pub delta_b: f64,
    pub n_bands: usize,
    pub n_spins: usize,
    /// Site separation `d = i − j`; zero for on-site kernels.
    pub site_separation: i64,
}

impl Default for BandParams {
    fn default() -> Self {
        Self {
            statistics: Statistics::Fermion,
            n_sites: 32,
            mu: 0.0,
            temperature: 0.0,
            delta_b: 0.0,
            n_bands: 1,
            n_spins: 1,
            site_separation: 0,
        }
    }
}

impl BandParams {
    pub fn fermion(n_sites: usize, mu: f64, temperature: f64) -> Self {
        Self {
            n_sites,
            mu,
            temperature,
            ..Self::default()
        }
    }

    pub fn boson(n_sites: usize, mu: f64, temperature: f64) -> Self {
        Self {
            statistics: Statistics::Boson,
            ..Self::fermion(n_sites, mu, temperature)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::invalid(format!("n_sites must be >= 2, got {}", self.n_sites)));
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(Error::invalid("temperature must be finite and >= 0"));
        }
        if !self.mu.is_finite() || !self.delta_b.is_finite() {
            return Err(Error::invalid("mu and delta_b must be finite"));
        }
        if !matches!(self.n_bands, 1 | 2) {
            return Err(Error::invalid(format!("n_bands must be 1 or 2, got {}", self.n_bands)));
        }
        if !matches!(self.n_spins, 1 | 2) {
            return Err(Error::invalid(format!("n_spins must be 1 or 2, got {}", self.n_spins)));
        }
        if self.statistics == Statistics::Boson && self.mu >= self.lowest_energy() {
            return Err(Error::invalid(format!(
                "boson bath needs mu below the band bottom {}, got {}",
                self.lowest_energy(),
                self.mu
            )));
        }
        Ok(())
    }

    /// Energy shifts of the bands that enter [`multiband_kernel`].
    pub fn band_shifts(&self) -> Vec<f64> {
        match self.n_bands {
            1 => vec![0.0],
            _ => vec![-self.delta_b, self.delta_b],
        }
    }

    /// Bottom of the lowest included band.
    pub fn lowest_energy(&self) -> f64 {
        self.band_shifts()
            .into_iter()
            .map(|s| -2.0 + s)
            .fold(f64::INFINITY, f64::min)
    }

    /// Latest time before waves travelling around the periodic lattice return.
    pub fn horizon(&self) -> f64 {
        self.n_sites as f64 / (2.0 * BAND_VELOCITY)
    }

    pub fn momenta(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_sites).map(move |j| 2.0 * PI * j as f64 / self.n_sites as f64)
    }
}

/// `ω(k) = −2 cos k` with unit hopping.
pub fn dispersion(k: f64) -> f64 {
    -2.0 * k.cos()
}

/// Fermi or Bose occupation of a mode at energy `omega`.
pub fn occupation(omega: f64, params: &BandParams) -> Result<f64> {
    let x = omega - params.mu;
    let t = params.temperature;
    if params.statistics == Statistics::Boson && x <= 0.0 {
        return Err(Error::BosePole {
            omega,
            mu: params.mu,
        });
    }
    if t == 0.0 {
        return Ok(match params.statistics {
            Statistics::Fermion if x < 0.0 => 1.0,
            Statistics::Fermion if x == 0.0 => 0.5,
            _ => 0.0,
        });
    }
    Ok(1.0 / ((x / t).exp() + params.statistics.sign()))
}

/// Uniformly sampled kernels `K^R`, `K^A`, `K^K` at `τ = n·dt`, `n = 0..=n_steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub dt: f64,
    pub k_r: Vec<Complex64>,
    pub k_a: Vec<Complex64>,
    pub k_k: Vec<Complex64>,
}

impl KernelTable {
    pub fn zeros(dt: f64, n_steps: usize) -> Self {
        Self {
            dt,
            k_r: vec![ZERO; n_steps + 1],
            k_a: vec![ZERO; n_steps + 1],
            k_k: vec![ZERO; n_steps + 1],
        }
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.k_k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_k.is_empty()
    }

    pub fn n_steps(&self) -> usize {
        self.len().saturating_sub(1)
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let f = |v: &[Complex64]| v.iter().map(|z| z * factor).collect();
        Self {
            dt: self.dt,
            k_r: f(&self.k_r),
            k_a: f(&self.k_a),
            k_k: f(&self.k_k),
        }
    }

    /// Elementwise sum; both tables must share grid and length.
    pub fn add_assign(&mut self, other: &KernelTable) -> Result<()> {
        self.check_compatible(other)?;
        for (dst, src) in [
            (&mut self.k_r, &other.k_r),
            (&mut self.k_a, &other.k_a),
            (&mut self.k_k, &other.k_k),
        ] {
            dst.iter_mut().zip(src).for_each(|(a, b)| *a += b);
        }
        Ok(())
    }

    pub fn check_compatible(&self, other: &KernelTable) -> Result<()> {
        if self.dt != other.dt || self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "kernel tables differ: dt {} vs {}, length {} vs {}",
                self.dt,
                other.dt,
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    /// Checks equal lengths, finiteness and that `K^A` vanishes past the endpoint.
    pub fn validate(&self) -> Result<()> {
        if self.k_r.len() != self.len() || self.k_a.len() != self.len() || self.is_empty() {
            return Err(Error::DimensionMismatch("kernel columns differ in length".into()));
        }
        let finite = |v: &[Complex64]| v.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !(finite(&self.k_r) && finite(&self.k_a) && finite(&self.k_k)) {
            return Err(Error::NonFiniteInput("kernel samples"));
        }
        if self.k_a.iter().skip(1).any(|z| *z != ZERO) {
            return Err(Error::invalid("advanced kernel must vanish for n >= 1"));
        }
        Ok(())
    }
}

fn check_grid(dt: f64, n_steps: usize) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid(format!("dt must be > 0, got {dt}")));
    }
    if n_steps < 1 {
        return Err(Error::invalid("n_steps must be >= 1"));
    }
    Ok(())
}

/// `K^K[n] = i J_C e^{−n dt/τ₀}`; the response kernels are zero.
pub fn rtn_kernel(p: &RtnParams, dt: f64, n_steps: usize) -> Result<KernelTable> {
    check_grid(dt, n_steps)?;
    p.validate()?;
    let mut table = KernelTable::zeros(dt, n_steps);
    let decay = -dt / p.tau0;
    for (n, k) in table.k_k.iter_mut().enumerate() {
        *k = I * (p.j_c * (decay * n as f64).exp());
    }
    Ok(table)
}

fn band_kernel_shifted(p: &BandParams, shift: f64, dt: f64, n_steps: usize) -> Result<KernelTable> {
    let n_sites = p.n_sites as f64;
    let d = p.site_separation as f64;
    let modes = p
        .momenta()
        .map(|k| {
            let energy = dispersion(k) + shift;
            let weight = match p.statistics {
                Statistics::Fermion => 1.0 - 2.0 * occupation(energy, p)?,
                Statistics::Boson => 1.0 + 2.0 * occupation(energy, p)?,
            };
            Ok((k * d, energy - p.mu, weight))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = KernelTable::zeros(dt, n_steps);
    let prefactor = -I / n_sites;
    for n in 0..=n_steps {
        let tau = n as f64 * dt;
        let (mut response, mut keldysh) = (ZERO, ZERO);
        for &(kd, energy, weight) in &modes {
            let phase = Complex64::from_polar(1.0, kd - energy * tau);
            response += phase;
            keldysh += phase * weight;
        }
        table.k_r[n] = prefactor * response;
        table.k_k[n] = prefactor * keldysh;
    }
    let endpoint: Complex64 = modes.iter().map(|&(kd, _, _)| Complex64::from_polar(1.0, kd)).sum();
    table.k_a[0] = I * endpoint / n_sites;
    Ok(table)
}

/// Kernels of a single free band; ignores `n_bands`, `n_spins` and `delta_b`.
pub fn band_kernel(p: &BandParams, dt: f64, n_steps: usize) -> Result<KernelTable> {
    check_grid(dt, n_steps)?;
    BandParams {
        n_bands: 1,
        n_spins: 1,
        ..*p
    }
    .validate()?;
    band_kernel_shifted(p, 0.0, dt, n_steps)
}

/// Sum of band-diagonal kernels over spins and bands.
pub fn multiband_kernel(p: &BandParams, dt: f64, n_steps: usize) -> Result<KernelTable> {
    check_grid(dt, n_steps)?;
    p.validate()?;
    let mut total = KernelTable::zeros(dt, n_steps);
    for shift in p.band_shifts() {
        let band = band_kernel_shifted(p, shift, dt, n_steps)?;
        for _ in 0..p.n_spins {
            total.add_assign(&band)?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Direct mode-by-mode evaluation used as an oracle.
    fn brute_force(
        modes: &[(f64, f64)],
        mu: f64,
        n_sites: usize,
        tau: f64,
    ) -> (Complex64, Complex64) {
        // modes: (energy, 1 ∓ 2n)
        let mut r = Complex64::new(0.0, 0.0);
        let mut k = Complex64::new(0.0, 0.0);
        for &(e, w) in modes {
            let z = Complex64::new(((e - mu) * tau).cos(), -((e - mu) * tau).sin());
            r += z;
            k += z * w;
        }
        let pre = Complex64::new(0.0, -1.0 / n_sites as f64);
        (pre * r, pre * k)
    }

    #[test]
    fn occupation_examples() {
        let p = BandParams::fermion(8, 0.3, 1.0);
        assert_eq!(occupation(0.3, &p).unwrap(), 0.5);
        let cold = BandParams::fermion(8, 0.3, 0.0);
        assert_eq!(occupation(-1.0, &cold).unwrap(), 1.0);
        assert_eq!(occupation(0.3, &cold).unwrap(), 0.5);
        assert_eq!(occupation(1.0, &cold).unwrap(), 0.0);

        let b = BandParams::boson(8, -3.0, 1.0);
        let expected = 1.0 / (1f64.exp() - 1.0);
        assert_abs_diff_eq!(expected, 0.581977, epsilon = 1e-6);
        assert_abs_diff_eq!(occupation(-2.0, &b).unwrap(), expected, epsilon = 1e-15);
        assert_eq!(occupation(-1.0, &BandParams::boson(8, -3.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn bose_pole_is_an_error() {
        let b = BandParams::boson(8, -3.0, 1.0);
        assert!(matches!(occupation(-3.0, &b), Err(Error::BosePole { .. })));
        assert!(matches!(occupation(-4.0, &b), Err(Error::BosePole { .. })));
        let b0 = BandParams::boson(8, -3.0, 0.0);
        assert!(matches!(occupation(-3.5, &b0), Err(Error::BosePole { .. })));
        assert!(matches!(occupation(-3.0, &b0), Err(Error::BosePole { .. })));
    }

    #[test]
    fn boson_band_needs_mu_below_band() {
        let p = BandParams::boson(8, -2.0, 0.5);
        assert!(band_kernel(&p, 0.1, 4).is_err());
        assert!(band_kernel(&BandParams::boson(8, -2.1, 0.5), 0.1, 4).is_ok());
    }

    #[test]
    fn rtn_examples() {
        let p = RtnParams::new(1.0, 1.0).unwrap();
        let t = rtn_kernel(&p, 1.0, 3).unwrap();
        assert_eq!(t.k_k[0], I);
        assert_abs_diff_eq!(t.k_k[1].im, (-1f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(t.k_k[1].im, 0.367879, epsilon = 1e-6);
        assert_eq!(t.k_k[1].re, 0.0);
        assert!(t.k_r.iter().chain(&t.k_a).all(|z| *z == ZERO));

        let quiet = rtn_kernel(&RtnParams::new(0.0, 2.0).unwrap(), 0.1, 10).unwrap();
        assert!(quiet.k_k.iter().all(|z| *z == ZERO));
    }

    #[test]
    fn rtn_rejects_bad_parameters() {
        assert!(RtnParams::new(1.0, 0.0).is_err());
        assert!(RtnParams::new(-1.0, 1.0).is_err());
        let p = RtnParams { j_c: 1.0, tau0: 1.0 };
        assert!(rtn_kernel(&p, 0.0, 3).is_err());
        assert!(rtn_kernel(&p, 0.1, 0).is_err());
    }

    #[test]
    fn band_retarded_starts_at_minus_i() {
        for n in [2, 3, 8, 33] {
            let t = band_kernel(&BandParams::fermion(n, 0.7, 0.3), 0.05, 2).unwrap();
            assert_eq!(t.k_r[0], Complex64::new(0.0, -1.0));
            assert_eq!(t.k_a[0], I);
            t.validate().unwrap();
        }
    }

    #[test]
    fn two_mode_band_matches_brute_force() {
        // N = 2: k ∈ {0, π}, ω ∈ {−2, 2}; T = 0, μ = 0 fills the lower mode.
        let p = BandParams::fermion(2, 0.0, 0.0);
        let dt = 0.13;
        let t = band_kernel(&p, dt, 20).unwrap();
        let modes = [(-2.0, 1.0 - 2.0), (2.0, 1.0)];
        for n in 0..=20 {
            let tau = n as f64 * dt;
            let (r, k) = brute_force(&modes, 0.0, 2, tau);
            assert!((t.k_r[n] - r).norm() < 1e-14);
            assert!((t.k_k[n] - k).norm() < 1e-14);
            // hand expansion: −i/2 (−e^{2iτ} + e^{−2iτ}) = −sin 2τ
            assert_abs_diff_eq!(t.k_k[n].re, -(2.0 * tau).sin(), epsilon = 1e-14);
            assert_abs_diff_eq!(t.k_k[n].im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn extreme_mu_limits() {
        let dt = 0.1;
        let low = band_kernel(&BandParams::fermion(16, -50.0, 0.5), dt, 30).unwrap();
        let high = band_kernel(&BandParams::fermion(16, 50.0, 0.5), dt, 30).unwrap();
        for n in 0..=30 {
            assert!((low.k_k[n] - low.k_r[n]).norm() < 1e-12);
            assert!((high.k_k[n] + high.k_r[n]).norm() < 1e-12);
        }
    }

    #[test]
    fn half_filled_keldysh_is_real() {
        let t = band_kernel(&BandParams::fermion(32, 0.0, 0.0), 0.05, 200).unwrap();
        for z in &t.k_k {
            assert!(z.im.abs() < 1e-12, "{z}");
        }
    }

    #[test]
    fn multiband_reductions() {
        let p = BandParams::fermion(12, 0.4, 0.2);
        let single = band_kernel(&p, 0.05, 40).unwrap();
        assert_eq!(multiband_kernel(&p, 0.05, 40).unwrap(), single);

        let degenerate = BandParams {
            n_bands: 2,
            n_spins: 2,
            delta_b: 0.0,
            ..p
        };
        let four = multiband_kernel(&degenerate, 0.05, 40).unwrap();
        for n in 0..single.len() {
            assert!((four.k_r[n] - single.k_r[n] * 4.0).norm() < 1e-14);
            assert!((four.k_k[n] - single.k_k[n] * 4.0).norm() < 1e-14);
            assert!((four.k_a[n] - single.k_a[n] * 4.0).norm() < 1e-14);
        }
    }

    #[test]
    fn multiband_matches_mode_enumeration() {
        // N = 2, T = 0, μ = 0, Δ_B = 1, two spins: 8 (σ, m, k) modes.
        let p = BandParams {
            n_sites: 2,
            n_bands: 2,
            n_spins: 2,
            delta_b: 1.0,
            ..BandParams::fermion(2, 0.0, 0.0)
        };
        let dt = 0.07;
        let t = multiband_kernel(&p, dt, 25).unwrap();
        let mut modes = Vec::new();
        for _spin in 0..2 {
            for shift in [-1.0, 1.0] {
                for omega in [-2.0, 2.0] {
                    let e: f64 = omega + shift;
                    let n = if e < 0.0 { 1.0 } else { 0.0 };
                    modes.push((e, 1.0 - 2.0 * n));
                }
            }
        }
        assert_eq!(modes.len(), 8);
        for n in 0..=25 {
            let (r, k) = brute_force(&modes, 0.0, 2, n as f64 * dt);
            assert!((t.k_r[n] - r).norm() < 1e-14);
            assert!((t.k_k[n] - k).norm() < 1e-14);
        }
    }

    #[test]
    fn off_site_kernel_vanishes_at_zero_time() {
        let p = BandParams {
            site_separation: 1,
            ..BandParams::fermion(16, 0.0, 0.0)
        };
        let t = band_kernel(&p, 0.1, 10).unwrap();
        assert!(t.k_r[0].norm() < 1e-15);
        assert!(t.k_a[0].norm() < 1e-15);
        assert!(t.k_r[5].norm() > 1e-3);
    }

    #[test]
    fn finite_size_convergence() {
        // fixed window t ≤ 2 lies inside the horizon of every size
        let dt = 0.05;
        let steps = 40;
        let kernel = |n| band_kernel(&BandParams::fermion(n, 0.0, 0.0), dt, steps).unwrap();
        let tables: Vec<_> = [8, 16, 32, 64, 128].into_iter().map(kernel).collect();
        let diffs: Vec<f64> = tables
            .windows(2)
            .map(|w| {
                (0..=steps)
                    .map(|n| (w[0].k_r[n] - w[1].k_r[n]).norm())
                    .fold(0.0, f64::max)
            })
            .collect();
        // differences shrink until they reach round-off
        for w in diffs.windows(2) {
            assert!(w[1] < w[0] || w[1] < 1e-14, "{diffs:?}");
        }
        assert!(diffs[3] < 1e-14, "{diffs:?}");
    }

    proptest! {
        #[test]
        fn band_kernel_is_bounded(n in 2usize..40, mu in -3.0..3.0f64, temp in 0.0..3.0f64, steps in 1usize..60) {
            let t = band_kernel(&BandParams::fermion(n, mu, temp), 0.1, steps).unwrap();
            for n in 0..t.len() {
                prop_assert!(t.k_r[n].norm() <= 1.0 + 1e-12);
                prop_assert!(t.k_k[n].norm() <= 1.0 + 1e-12);
            }
        }

        #[test]
        fn multiband_bound_scales(n in 2usize..20, db in -2.0..2.0f64, spins in 1usize..3) {
            let p = BandParams { n_bands: 2, n_spins: spins, delta_b: db, ..BandParams::fermion(n, 0.1, 0.5) };
            let t = multiband_kernel(&p, 0.1, 30).unwrap();
            let bound = (2 * spins) as f64 + 1e-12;
            prop_assert!(t.k_r.iter().chain(&t.k_k).all(|z| z.norm() <= bound));
        }

        #[test]
        fn rtn_decays_geometrically(tau0 in 0.1..10.0f64, dt in 0.001..0.5f64, j in 0.01..5.0f64) {
            let t = rtn_kernel(&RtnParams::new(j, tau0).unwrap(), dt, 20).unwrap();
            let ratio = (-dt / tau0).exp();
            for w in t.k_k.windows(2) {
                prop_assert!((w[1].norm() / w[0].norm() - ratio).abs() < 1e-12);
            }
        }

        #[test]
        fn fermi_function_decreases(mu in -3.0..3.0f64, temp in 0.01..5.0f64, a in -5.0..5.0f64, b in -5.0..5.0f64) {
            let p = BandParams::fermion(4, mu, temp);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(occupation(lo, &p).unwrap() >= occupation(hi, &p).unwrap());
        }
    }
}
