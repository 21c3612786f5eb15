//! Exact qubit + free-bath dynamics in the single-excitation sector.
//!
//! The contact coupling `λ(σ⁺c₀ + σ⁻c₀†)` conserves the number of excitations
//! shared by qubit and bath. Starting from an empty band, the states
//! `|↑, vac⟩` and `|↓, site i⟩` span an `(N + 1)`-dimensional invariant
//! subspace, and `|↓, vac⟩` is an isolated zero-excitation state. Both are
//! evolved exactly and the bath is traced out.
//!
//! Bath energies are measured from the chemical potential, matching the
//! `e^{−i(ω−μ)τ}` phases of the master-equation kernels. With that convention
//! the qubit coherence obeys exactly the same Volterra equation as the `s_pm`
//! channel once `λ² = g/4`; see [`coupling_from_g`].

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{dispersion, Statistics};
use crate::model::{check_uniform_grid, QubitMatrix, SojournBlipState, Trajectory};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialQubit {
    #[default]
    Up,
    Down,
    Plus,
}

impl InitialQubit {
    /// The same state in sojourn/blip coordinates.
    pub fn sojourn_blip(self) -> SojournBlipState {
        match self {
            InitialQubit::Up => SojournBlipState::up(),
            InitialQubit::Down => SojournBlipState::down(),
            InitialQubit::Plus => SojournBlipState::plus(),
        }
    }

    /// Amplitudes of `|↑, vac⟩` and `|↓, vac⟩`.
    fn amplitudes(self) -> (f64, f64) {
        match self {
            InitialQubit::Up => (1.0, 0.0),
            InitialQubit::Down => (0.0, 1.0),
            InitialQubit::Plus => (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
        }
    }
}

/// Linear contact coupling `λ` whose square matches the `g/4` prefactor of
/// the master-equation memory term.
pub fn coupling_from_g(g: f64) -> f64 {
    g.sqrt() / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Bath sites on the periodic ring.
    pub n_sites: usize,
    /// Linear contact coupling λ.
    pub coupling: f64,
    pub delta: f64,
    pub mu: f64,
    /// Must be zero: the sector decomposition needs an empty initial band.
    pub temperature: f64,
    pub statistics: Statistics,
    pub initial_qubit: InitialQubit,
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 {
            return Err(Error::invalid("oracle needs at least one bath site"));
        }
        if !(self.coupling.is_finite() && self.delta.is_finite() && self.mu.is_finite()) {
            return Err(Error::NonFiniteInput("oracle parameters"));
        }
        if self.temperature != 0.0 {
            return Err(Error::invalid(
                "the exact oracle only covers a zero-temperature empty band",
            ));
        }
        Ok(())
    }

    pub fn sector_dim(&self) -> usize {
        self.n_sites + 1
    }
}

/// Single-particle hopping matrix of the periodic ring, `h_ij = (1/N) Σ_k ω(k) e^{ik(i−j)}`.
///
/// A single site has no bonds and gets a zero matrix.
pub fn bath_hopping_matrix(n_sites: usize) -> DMatrix<f64> {
    if n_sites == 1 {
        return DMatrix::zeros(1, 1);
    }
    let n = n_sites as f64;
    DMatrix::from_fn(n_sites, n_sites, |i, j| {
        let d = i as f64 - j as f64;
        (0..n_sites)
            .map(|m| {
                let k = 2.0 * std::f64::consts::PI * m as f64 / n;
                dispersion(k) * (k * d).cos()
            })
            .sum::<f64>()
            / n
    })
}

/// Sector Hamiltonian in the basis `{|↑, vac⟩, |↓, 0⟩, …, |↓, N−1⟩}`.
pub fn build_sector_hamiltonian(c: &OracleConfig) -> DMatrix<f64> {
    let n = c.n_sites;
    let mut h = DMatrix::zeros(n + 1, n + 1);
    h[(0, 0)] = 0.5 * c.delta;
    let hop = bath_hopping_matrix(n);
    for i in 0..n {
        for j in 0..n {
            h[(i + 1, j + 1)] = hop[(i, j)];
        }
        h[(i + 1, i + 1)] += -0.5 * c.delta - c.mu;
    }
    h[(0, 1)] = c.coupling;
    h[(1, 0)] = c.coupling;
    h
}

/// Spectral propagator of the sector plus the decoupled `|↓, vac⟩` phase.
#[derive(Debug, Clone)]
pub struct SectorPropagator {
    hamiltonian: DMatrix<f64>,
    eigen: SymmetricEigen<f64, nalgebra::Dyn>,
    vacuum_energy: f64,
    sector_initial: DVector<f64>,
    vacuum_initial: f64,
}

impl SectorPropagator {
    pub fn new(c: &OracleConfig) -> Result<Self> {
        c.validate()?;
        let hamiltonian = build_sector_hamiltonian(c);
        let eigen = hamiltonian.clone().symmetric_eigen();
        let (up, down) = c.initial_qubit.amplitudes();
        let mut sector_initial = DVector::zeros(c.sector_dim());
        sector_initial[0] = up;
        Ok(Self {
            hamiltonian,
            eigen,
            vacuum_energy: -0.5 * c.delta,
            sector_initial,
            vacuum_initial: down,
        })
    }

    pub fn hamiltonian(&self) -> &DMatrix<f64> {
        &self.hamiltonian
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigen.eigenvalues
    }

    /// Sector amplitudes `e^{−iHt}|ψ_sector(0)⟩` and the `|↓, vac⟩` amplitude.
    pub fn state_at(&self, t: f64) -> (DVector<Complex64>, Complex64) {
        let v = &self.eigen.eigenvectors;
        let overlaps = v.transpose() * &self.sector_initial;
        let dim = overlaps.len();
        let mut psi = DVector::from_element(dim, ZERO);
        for (m, (&e, &o)) in self.eigen.eigenvalues.iter().zip(overlaps.iter()).enumerate() {
            let phase = Complex64::from_polar(o, -e * t);
            for i in 0..dim {
                psi[i] += phase * v[(i, m)];
            }
        }
        let vacuum = Complex64::from_polar(self.vacuum_initial, -self.vacuum_energy * t);
        (psi, vacuum)
    }

    /// Qubit density matrix after tracing out the bath.
    pub fn reduced_at(&self, t: f64) -> QubitMatrix {
        let (psi, vacuum) = self.state_at(t);
        let a = psi[0];
        let bath: f64 = psi.iter().skip(1).map(|z| z.norm_sqr()).sum();
        let coherence = a * vacuum.conj();
        QubitMatrix::new(Matrix2::new(
            Complex64::new(a.norm_sqr(), 0.0),
            coherence,
            coherence.conj(),
            Complex64::new(bath + vacuum.norm_sqr(), 0.0),
        ))
    }
}

/// Reduced qubit density matrices of the exact dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<QubitMatrix>,
}

pub fn exact_evolve(c: &OracleConfig, times: &[f64]) -> Result<OracleTrajectory> {
    check_uniform_grid(times)?;
    let propagator = SectorPropagator::new(c)?;
    Ok(OracleTrajectory {
        times: times.to_vec(),
        states: times.iter().map(|&t| propagator.reduced_at(t)).collect(),
    })
}

/// Deviation statistics for one observable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableDeviation {
    pub name: &'static str,
    pub max_abs: f64,
    pub rms: f64,
    /// `max |Δ| / |oracle|`, falling back to `|Δ|` where the oracle value vanishes.
    pub max_rel: f64,
}

impl ObservableDeviation {
    fn from_series(name: &'static str, oracle: &[f64], master: &[f64]) -> Self {
        let mut max_abs: f64 = 0.0;
        let mut max_rel: f64 = 0.0;
        let mut sum_sq = 0.0;
        for (o, m) in oracle.iter().zip(master) {
            let d = (m - o).abs();
            max_abs = max_abs.max(d);
            max_rel = max_rel.max(if o.abs() > 1e-12 { d / o.abs() } else { d });
            sum_sq += d * d;
        }
        let n = oracle.len().max(1) as f64;
        Self {
            name,
            max_abs,
            rms: (sum_sq / n).sqrt(),
            max_rel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub tolerance: f64,
    /// `p_up`, `p_down`, `|coherence|` in that order.
    pub deviations: Vec<ObservableDeviation>,
    /// Max relative deviation of `p_up` within `tolerance`.
    pub passed: bool,
}

impl CompareReport {
    pub fn get(&self, name: &str) -> Option<&ObservableDeviation> {
        self.deviations.iter().find(|d| d.name == name)
    }

    pub fn p_up(&self) -> &ObservableDeviation {
        &self.deviations[0]
    }
}

/// Per-observable series used by [`compare`], as `(oracle, master)`.
pub struct CompareSeries {
    pub p_up: (Vec<f64>, Vec<f64>),
    pub p_down: (Vec<f64>, Vec<f64>),
    pub coherence: (Vec<f64>, Vec<f64>),
}

pub fn compare_series(oracle: &OracleTrajectory, master: &Trajectory) -> Result<CompareSeries> {
    if oracle.times.len() != master.times.len()
        || oracle
            .times
            .iter()
            .zip(&master.times)
            .any(|(a, b)| (a - b).abs() > 1e-9 * a.abs().max(1.0))
    {
        return Err(Error::GridMismatch(format!(
            "oracle has {} points, master equation has {}",
            oracle.times.len(),
            master.times.len()
        )));
    }
    let matrices = master.matrices();
    let split = |f: &dyn Fn(&QubitMatrix) -> f64| -> (Vec<f64>, Vec<f64>) {
        (oracle.states.iter().map(f).collect(), matrices.iter().map(f).collect())
    };
    Ok(CompareSeries {
        p_up: split(&|m| m.population_up()),
        p_down: split(&|m| m.population_down()),
        coherence: split(&|m| m.rho[(0, 1)].norm()),
    })
}

pub fn compare(oracle: &OracleTrajectory, master: &Trajectory, tolerance: f64) -> Result<CompareReport> {
    let s = compare_series(oracle, master)?;
    let deviations = vec![
        ObservableDeviation::from_series("p_up", &s.p_up.0, &s.p_up.1),
        ObservableDeviation::from_series("p_down", &s.p_down.0, &s.p_down.1),
        ObservableDeviation::from_series("coherence", &s.coherence.0, &s.coherence.1),
    ];
    let passed = deviations[0].max_rel <= tolerance;
    Ok(CompareReport {
        tolerance,
        deviations,
        passed,
    })
}

/// Oracle trajectory viewed as a master-equation [`Trajectory`].
pub fn as_trajectory(oracle: &OracleTrajectory) -> Result<Trajectory> {
    Trajectory::new(
        oracle.times.clone(),
        oracle.states.iter().map(crate::model::decompose).collect(),
    )
}
