//! Fixed-step integrator for complex linear Volterra integro-differential
//! systems
//!
//! ```text
//! dx/dt = A x(t) + ∫₀ᵗ M(t − t₁) x(t₁) dt₁
//! ```
//!
//! The memory integral uses trapezoidal weights on the sampled kernel and the
//! step is a Heun predictor–corrector, which is globally second order for
//! smooth kernels. Only the history sum that does not involve the new state is
//! evaluated per step, so each step costs `O(nnz(M) · n)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{SojournBlipState, Trajectory};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// States whose magnitude exceeds this are reported as an instability.
pub const OVERFLOW_GUARD: f64 = 1e12;

/// `dx/dt = a_local·x + dt Σ'' m_kernel[n − m]·x_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolterraSystem {
    pub dim: usize,
    pub a_local: DMatrix<Complex64>,
    /// `m_kernel[n] = M(n·dt)`.
    pub m_kernel: Vec<DMatrix<Complex64>>,
    pub dt: f64,
}

fn all_finite(m: &DMatrix<Complex64>) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

impl VolterraSystem {
    pub fn new(
        a_local: DMatrix<Complex64>,
        m_kernel: Vec<DMatrix<Complex64>>,
        dt: f64,
    ) -> Result<Self> {
        let sys = Self {
            dim: a_local.nrows(),
            a_local,
            m_kernel,
            dt,
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::invalid("system dimension must be >= 1"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.m_kernel.is_empty() {
            return Err(Error::invalid("memory kernel needs at least one sample"));
        }
        let square = |m: &DMatrix<Complex64>| m.nrows() == self.dim && m.ncols() == self.dim;
        if !square(&self.a_local) || !self.m_kernel.iter().all(square) {
            return Err(Error::DimensionMismatch(format!(
                "all matrices must be {0}×{0}",
                self.dim
            )));
        }
        if !all_finite(&self.a_local) || !self.m_kernel.iter().all(all_finite) {
            return Err(Error::NonFiniteInput("system matrices"));
        }
        Ok(())
    }

    /// Longest run the kernel samples support.
    pub fn max_steps(&self) -> usize {
        self.m_kernel.len() - 1
    }
}

/// Raw integrator output.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub dim: usize,
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
}

impl Solution {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn component(&self, index: usize) -> Vec<Complex64> {
        self.states.iter().map(|x| x[index]).collect()
    }

    /// Interprets a four-dimensional solution as a qubit trajectory.
    pub fn qubit_trajectory(&self) -> Result<Trajectory> {
        self.block_trajectory(0)
    }

    /// The four consecutive components starting at `offset` as a trajectory.
    pub fn block_trajectory(&self, offset: usize) -> Result<Trajectory> {
        if offset + SojournBlipState::DIM > self.dim {
            return Err(Error::DimensionMismatch(format!(
                "components {offset}..{} out of range for dimension {}",
                offset + SojournBlipState::DIM,
                self.dim
            )));
        }
        let states = self
            .states
            .iter()
            .map(|x| SojournBlipState::from_slice(&x[offset..offset + SojournBlipState::DIM]))
            .collect::<Result<_>>()?;
        Trajectory::new(self.times.clone(), states)
    }

    /// `max_k ‖self_k − other_{k·stride}‖_∞` over the grid of `self`.
    pub fn max_deviation(&self, finer: &Solution, stride: usize) -> f64 {
        self.states
            .iter()
            .enumerate()
            .map(|(k, x)| {
                x.iter()
                    .zip(&finer.states[k * stride])
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// Sparse view of the memory kernel: one sample column per nonzero entry.
struct MemoryEntries {
    entries: Vec<(usize, usize, Vec<Complex64>)>,
}

impl MemoryEntries {
    fn new(kernel: &[DMatrix<Complex64>], dim: usize, len: usize) -> Self {
        let mut entries = Vec::new();
        for col in 0..dim {
            for row in 0..dim {
                let samples: Vec<Complex64> = kernel[..len].iter().map(|m| m[(row, col)]).collect();
                if samples.iter().any(|z| *z != ZERO) {
                    entries.push((row, col, samples));
                }
            }
        }
        Self { entries }
    }

    /// `Σ_{m=1}^{k−1} M[k−m] x_m + ½ M[k] x_0`, i.e. the trapezoid sum for
    /// `I(t_k)` without the `½ M[0] x_k` endpoint.
    fn history(&self, k: usize, columns: &[Vec<Complex64>], out: &mut [Complex64]) {
        out.iter_mut().for_each(|z| *z = ZERO);
        for (row, col, samples) in &self.entries {
            let past = &columns[*col];
            let mut acc = samples[k] * past[0] * 0.5;
            for m in 1..k {
                acc += samples[k - m] * past[m];
            }
            out[*row] += acc;
        }
    }

    fn endpoint(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (row, col, samples) in &self.entries {
            out[*row] += samples[0] * x[*col] * 0.5;
        }
    }
}

fn mat_vec(a: &DMatrix<Complex64>, x: &[Complex64], out: &mut [Complex64]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..x.len()).map(|j| a[(i, j)] * x[j]).sum();
    }
}

/// Integrates `sys` from `x0` for `n_steps` steps of `sys.dt`.
pub fn evolve(sys: &VolterraSystem, x0: &[Complex64], n_steps: usize) -> Result<Solution> {
    sys.validate()?;
    let dim = sys.dim;
    if x0.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "initial state has {} components, system has {dim}",
            x0.len()
        )));
    }
    if x0.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFiniteInput("initial state"));
    }
    if n_steps > sys.max_steps() {
        return Err(Error::DimensionMismatch(format!(
            "{n_steps} steps need {} kernel samples, system has {}",
            n_steps + 1,
            sys.m_kernel.len()
        )));
    }

    let dt = sys.dt;
    let memory = MemoryEntries::new(&sys.m_kernel, dim, n_steps + 1);
    let mut columns: Vec<Vec<Complex64>> = x0
        .iter()
        .map(|&z| {
            let mut c = Vec::with_capacity(n_steps + 1);
            c.push(z);
            c
        })
        .collect();
    let mut states = Vec::with_capacity(n_steps + 1);
    states.push(x0.to_vec());

    let mut x = x0.to_vec();
    // f_0 = A x_0; the memory integral is empty at t = 0.
    let mut f = vec![ZERO; dim];
    mat_vec(&sys.a_local, &x, &mut f);

    let mut history = vec![ZERO; dim];
    let mut predicted = vec![ZERO; dim];
    let mut f_pred = vec![ZERO; dim];
    let mut scratch = vec![ZERO; dim];

    for k in 0..n_steps {
        memory.history(k + 1, &columns, &mut history);

        for i in 0..dim {
            predicted[i] = x[i] + f[i] * dt;
        }
        rhs(sys, &memory, &predicted, &history, &mut scratch, &mut f_pred);

        for i in 0..dim {
            x[i] += (f[i] + f_pred[i]) * (0.5 * dt);
        }
        if x.iter().any(|z| !(z.norm() <= OVERFLOW_GUARD)) {
            return Err(Error::NonFinite {
                step: k + 1,
                time: (k + 1) as f64 * dt,
            });
        }
        rhs(sys, &memory, &x, &history, &mut scratch, &mut f);

        for (c, z) in columns.iter_mut().zip(&x) {
            c.push(*z);
        }
        states.push(x.clone());
    }

    Ok(Solution {
        dim,
        dt,
        times: (0..=n_steps).map(|n| n as f64 * dt).collect(),
        states,
    })
}

/// `A x + dt (½ M[0] x + history)`
fn rhs(
    sys: &VolterraSystem,
    memory: &MemoryEntries,
    x: &[Complex64],
    history: &[Complex64],
    scratch: &mut [Complex64],
    out: &mut [Complex64],
) {
    mat_vec(&sys.a_local, x, out);
    scratch.copy_from_slice(history);
    memory.endpoint(x, scratch);
    for (o, s) in out.iter_mut().zip(scratch.iter()) {
        *o += s * sys.dt;
    }
}

/// Integrates a four-dimensional qubit system and attaches observables.
pub fn evolve_qubit(
    sys: &VolterraSystem,
    x0: &SojournBlipState,
    n_steps: usize,
) -> Result<Trajectory> {
    evolve(sys, &x0.to_array(), n_steps)?.qubit_trajectory()
}

/// Max-norm deviations between successive step halvings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfConvergence {
    pub dt: f64,
    /// `‖x_dt − x_{dt/2}‖` on the coarse grid.
    pub coarse_error: f64,
    /// `‖x_{dt/2} − x_{dt/4}‖` on the coarse grid.
    pub fine_error: f64,
}

impl SelfConvergence {
    pub fn ratio(&self) -> f64 {
        self.coarse_error / self.fine_error
    }

    pub fn order(&self) -> f64 {
        self.ratio().log2()
    }
}

/// Runs `build(dt)`, `build(dt/2)` and `build(dt/4)` to `t_end` and compares
/// the three solutions on the coarse grid.
pub fn self_convergence<F>(build: F, x0: &[Complex64], dt: f64, t_end: f64) -> Result<SelfConvergence>
where
    F: Fn(f64) -> Result<VolterraSystem>,
{
    let steps = (t_end / dt).round() as usize;
    if steps == 0 {
        return Err(Error::invalid("t_end must span at least one step"));
    }
    let run = |level: u32| {
        let h = dt / f64::from(1 << level);
        evolve(&build(h)?, x0, steps << level)
    };
    let (coarse, mid, fine) = (run(0)?, run(1)?, run(2)?);
    Ok(SelfConvergence {
        dt,
        coarse_error: coarse.max_deviation(&mid, 2),
        fine_error: coarse_grid_deviation(&mid, &fine, steps),
    })
}

fn coarse_grid_deviation(mid: &Solution, fine: &Solution, coarse_steps: usize) -> f64 {
    (0..=coarse_steps)
        .map(|k| {
            mid.states[2 * k]
                .iter()
                .zip(&fine.states[4 * k])
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Observed convergence order `log₂(‖x_dt − x_{dt/2}‖ / ‖x_{dt/2} − x_{dt/4}‖)`.
pub fn convergence_order<F>(build: F, x0: &[Complex64], dt: f64, t_end: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<VolterraSystem>,
{
    Ok(self_convergence(build, x0, dt, t_end)?.order())
}
