//! Non-Markovian decoherence of qubits coupled to one-dimensional baths.
//!
//! The qubit density matrix is carried in sojourn/blip coordinates
//! `(s_tr, s_pm, s_mp, s_z)` and evolved by a linear Volterra
//! integro-differential equation whose memory kernel is built from the
//! retarded, advanced and Keldysh Green's functions of the bath:
//!
//! ```text
//! dx/dt = A x(t) + ∫₀ᵗ M(t - t₁) x(t₁) dt₁
//! ```
//!
//! * [`model`] holds the qubit state types, the map to and from the 2×2
//!   density matrix, and observables such as the von Neumann entropy.
//! * [`kernels`] synthesizes time-domain kernel tables for random telegraph
//!   noise and for free fermion/boson tight-binding baths (single or
//!   multi-band, with spin).
//! * [`volterra`] is a physics-agnostic second-order integrator, and
//!   [`assembly`] turns kernel tables into single-qubit or qubit-chain
//!   systems.
//! * [`oracle`] solves qubit plus bath exactly in the single-excitation
//!   sector and compares that against the master equation.
//! * [`config`] and [`driver`] back the `decoherence` command-line tool:
//!   parameter sweeps, CSV output and kernel dumps.
//!
//! Units: ħ = 1 and the bath hopping amplitude is 1.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod config;
pub mod driver;
pub mod error;
pub mod kernels;
pub mod model;
pub mod oracle;
pub mod volterra;

pub use num_complex::Complex64;

pub use assembly::{
    assemble, assemble_chain, assemble_single_qubit, assemble_sojourn_blip, Assembly, ChainConfig,
};
pub use error::{Error, Result};
pub use kernels::{
    band_kernel, multiband_kernel, occupation, rtn_kernel, BandParams, KernelTable, RtnParams,
    Statistics,
};
pub use model::{
    decompose, entropy, reconstruct, unitary_generator, Observables, PhysicalParams, QubitMatrix,
    SojournBlipState, Trajectory,
};
pub use oracle::{exact_evolve, OracleConfig, OracleTrajectory};
pub use volterra::{convergence_order, evolve, Solution, VolterraSystem};
