//! Numerical simulator for purifying two depolarized qubits by projecting
//! them onto their symmetric subspace, together with the photonic
//! realization of the protocol: Pockels-cell depolarizers, two-photon
//! interference at a beam splitter, and Stokes tomography of the output.
//!
//! Module map:
//!
//! - [`qmath`]: dense complex Hermitian algebra and density matrices.
//! - [`qubit`]: polarization states, Paulis, singlet, symmetric projector.
//! - [`channel`]: Pauli channels and the dual Pockels-cell duty-cycle model.
//! - [`purify`]: ideal projection, success probability, gain, entropy.
//! - [`optics`]: second-quantized beam-splitter model with post-selection.
//! - [`tomo`]: finite-count Stokes tomography.
//! - [`experiment`]: seeded sweeps and CSV/JSON output.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod experiment;
pub mod optics;
pub mod purify;
pub mod qmath;
pub mod qubit;
pub mod streams;
pub mod tomo;

pub use error::{Error, Result};
pub use qmath::{ComplexMatrix, DensityMatrix};
pub use qubit::{NamedState, PauliLabel, PureQubit};
