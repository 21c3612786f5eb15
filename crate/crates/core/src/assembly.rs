//! Builds [`VolterraSystem`]s for qubits from bath kernel tables.
//!
//! The memory prefactor `−(i/4)·g` is folded into the kernel matrices here, so
//! the integrator never sees physical parameters.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelTable;
use crate::model::{unitary_generator, PhysicalParams, SojournBlipState};
use crate::volterra::{evolve, VolterraSystem};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which form of the memory term to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assembly {
    /// Each `ρ_s` channel convolved with its own kernel entry.
    #[default]
    SpinDiagonal,
    /// Populations and coherences coupled through `[[0, 2K^R], [2K^A, −2K^K]]`.
    #[serde(rename = "sojourn_blip_2x2")]
    SojournBlip2x2,
}

impl std::str::FromStr for Assembly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spin_diagonal" => Ok(Assembly::SpinDiagonal),
            "sojourn_blip_2x2" => Ok(Assembly::SojournBlip2x2),
            other => Err(Error::invalid(format!("unknown assembly {other:?}"))),
        }
    }
}

impl std::fmt::Display for Assembly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Assembly::SpinDiagonal => "spin_diagonal",
            Assembly::SojournBlip2x2 => "sojourn_blip_2x2",
        })
    }
}

fn prefactor(g: f64) -> Complex64 {
    -I * (g / 4.0)
}

/// Diagonal memory weights `−(i/4)g·(−K^K, K^R + K^A, −i(K^A − K^R), K^K)` at sample `n`.
pub fn channel_kernels(g: f64, table: &KernelTable, n: usize) -> [Complex64; 4] {
    let (r, a, k) = (table.k_r[n], table.k_a[n], table.k_k[n]);
    let pre = prefactor(g);
    [-k * pre, (r + a) * pre, -I * (a - r) * pre, k * pre]
}

fn to_dmatrix(m: &Matrix4<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_iterator(4, 4, m.iter().copied())
}

/// Spin-diagonal single-qubit system.
pub fn assemble_single_qubit(p: &PhysicalParams, k: &KernelTable) -> Result<VolterraSystem> {
    p.validate()?;
    k.validate()?;
    let m_kernel = (0..k.len())
        .map(|n| DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&channel_kernels(p.g, k, n))))
        .collect();
    VolterraSystem::new(to_dmatrix(&unitary_generator(p)), m_kernel, k.dt)
}

/// Maps `(ρ↑↑, ρ↓↓, ρ↑↓, ρ↓↑)` to `(s_tr, s_pm, s_mp, s_z)`.
fn elements_to_channels() -> Matrix4<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    Matrix4::new(
        one, one, ZERO, ZERO, //
        ZERO, ZERO, one, ZERO, //
        ZERO, ZERO, ZERO, one, //
        one, -one, ZERO, ZERO,
    )
}

fn channels_to_elements() -> Matrix4<Complex64> {
    let h = Complex64::new(0.5, 0.0);
    let one = Complex64::new(1.0, 0.0);
    Matrix4::new(
        h, ZERO, ZERO, h, //
        h, ZERO, ZERO, -h, //
        ZERO, one, ZERO, ZERO, //
        ZERO, ZERO, one, ZERO,
    )
}

/// The coupled population/coherence form, expressed in `ρ_s` coordinates so
/// its trajectories are directly comparable with [`assemble_single_qubit`].
///
/// With `ρ_b = [[ρ↑↑, ρ↓↓], [ρ↑↓, ρ↓↑]]` the memory term is
/// `−(i/4)g ∫ [[0, 2K^R], [2K^A, −2K^K]] · ρ_b(t₁)`.
pub fn assemble_sojourn_blip(p: &PhysicalParams, k: &KernelTable) -> Result<VolterraSystem> {
    p.validate()?;
    k.validate()?;
    let to_s = elements_to_channels();
    let from_s = channels_to_elements();
    let pre = prefactor(p.g);
    let m_kernel = (0..k.len())
        .map(|n| {
            let (r, a, kk) = (k.k_r[n] * 2.0, k.k_a[n] * 2.0, k.k_k[n] * 2.0);
            let mut m = Matrix4::from_element(ZERO);
            m[(0, 2)] = r;
            m[(1, 3)] = r;
            m[(2, 0)] = a;
            m[(2, 2)] = -kk;
            m[(3, 1)] = a;
            m[(3, 3)] = -kk;
            to_dmatrix(&(to_s * m.map(|x| x * pre) * from_s))
        })
        .collect();
    VolterraSystem::new(to_dmatrix(&unitary_generator(p)), m_kernel, k.dt)
}

pub fn assemble(p: &PhysicalParams, k: &KernelTable, assembly: Assembly) -> Result<VolterraSystem> {
    match assembly {
        Assembly::SpinDiagonal => assemble_single_qubit(p, k),
        Assembly::SojournBlip2x2 => assemble_sojourn_blip(p, k),
    }
}

/// Largest per-channel deviation between the two assemblies over a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyComparison {
    /// Max `|Δ|` for `s_tr`, `s_pm`, `s_mp`, `s_z`.
    pub max_deviation: [f64; 4],
}

impl AssemblyComparison {
    pub fn max(&self) -> f64 {
        self.max_deviation.iter().copied().fold(0.0, f64::max)
    }
}

pub fn compare_assemblies(
    p: &PhysicalParams,
    k: &KernelTable,
    x0: &SojournBlipState,
    n_steps: usize,
) -> Result<AssemblyComparison> {
    let diag = evolve(&assemble_single_qubit(p, k)?, &x0.to_array(), n_steps)?;
    let coupled = evolve(&assemble_sojourn_blip(p, k)?, &x0.to_array(), n_steps)?;
    let mut max_deviation = [0.0; 4];
    for (a, b) in diag.states.iter().zip(&coupled.states) {
        for c in 0..4 {
            max_deviation[c] = f64::max(max_deviation[c], (a[c] - b[c]).norm());
        }
    }
    Ok(AssemblyComparison { max_deviation })
}

/// A chain of `L` qubits sharing one bath.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    /// Level splitting Δᵢ of each site.
    pub splittings: Vec<f64>,
    /// `kernels[d]` couples sites at separation `d`, for `d = 0..L`.
    pub kernels: Vec<KernelTable>,
}

impl ChainConfig {
    pub fn n_qubits(&self) -> usize {
        self.splittings.len()
    }

    /// Uniform chain: every site has splitting `delta`.
    pub fn uniform(delta: f64, kernels: Vec<KernelTable>) -> Self {
        Self {
            splittings: vec![delta; kernels.len()],
            kernels,
        }
    }
}

/// Position of channel `c` of `ρ_s(i, j)` in the chain state vector.
pub fn chain_index(n_qubits: usize, i: usize, j: usize, channel: usize) -> usize {
    (i * n_qubits + j) * SojournBlipState::DIM + channel
}

/// Chain system of dimension `4L²`: `ρ_s(i, j)` is driven by `ρ_s(k, j)` for
/// every site `k` through the kernel at separation `|i − k|`. The free part
/// rotates the coherences of `ρ_s(i, j)` with the splitting of site `i`;
/// `p.delta` is not used.
pub fn assemble_chain(p: &PhysicalParams, c: &ChainConfig) -> Result<VolterraSystem> {
    p.validate()?;
    let l = c.n_qubits();
    if l == 0 {
        return Err(Error::invalid("chain needs at least one qubit"));
    }
    if c.kernels.len() != l {
        return Err(Error::DimensionMismatch(format!(
            "{l} qubits need {l} kernel tables (separations 0..{l}), got {}",
            c.kernels.len()
        )));
    }
    for k in &c.kernels {
        k.validate()?;
        c.kernels[0].check_compatible(k)?;
    }
    if c.splittings.iter().any(|d| !d.is_finite()) {
        return Err(Error::NonFiniteInput("chain splittings"));
    }

    let dim = SojournBlipState::DIM * l * l;
    let mut a_local = DMatrix::from_element(dim, dim, ZERO);
    for i in 0..l {
        for j in 0..l {
            a_local[(chain_index(l, i, j, 1), chain_index(l, i, j, 1))] = -I * c.splittings[i];
            a_local[(chain_index(l, i, j, 2), chain_index(l, i, j, 2))] = I * c.splittings[i];
        }
    }

    let len = c.kernels[0].len();
    let mut m_kernel = Vec::with_capacity(len);
    for n in 0..len {
        let weights: Vec<[Complex64; 4]> =
            c.kernels.iter().map(|k| channel_kernels(p.g, k, n)).collect();
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        for i in 0..l {
            for k in 0..l {
                let w = &weights[i.abs_diff(k)];
                for j in 0..l {
                    for ch in 0..SojournBlipState::DIM {
                        m[(chain_index(l, i, j, ch), chain_index(l, k, j, ch))] = w[ch];
                    }
                }
            }
        }
        m_kernel.push(m);
    }
    VolterraSystem::new(a_local, m_kernel, c.kernels[0].dt)
}

/// Chain initial state with every site pair `(i, j)` set to `state`.
pub fn chain_initial_state(n_qubits: usize, pairs: impl Fn(usize, usize) -> SojournBlipState) -> Vec<Complex64> {
    let mut x = vec![ZERO; SojournBlipState::DIM * n_qubits * n_qubits];
    for i in 0..n_qubits {
        for j in 0..n_qubits {
            for (ch, z) in pairs(i, j).to_array().into_iter().enumerate() {
                x[chain_index(n_qubits, i, j, ch)] = z;
            }
        }
    }
    x
}
