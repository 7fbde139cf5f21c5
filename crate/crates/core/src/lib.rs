//! Hybrid sparse-dense FFT.
//!
//! Recovers k-sparse on-grid spectra from three decimated residue views:
//! two views reconstruct candidate frequencies through two-residue Garner CRT,
//! the third gates them, and Goertzel evaluation validates the survivors.
//! Deterministic certificates detect collision structure and fall back to a
//! dense FFT, so the worst case stays at `O(N log N)`.
//!
//! The [`adversary`] module builds the inputs that make the sparse path
//! degrade to `k²` gating survivors under non-pairwise-coprime moduli.

pub mod adversary;
pub mod certificates;
pub mod crt;
pub mod dft;
pub mod error;
pub mod ops;
pub mod pipeline;
pub mod signal;
pub mod verify;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use ops::OpCounter;
pub use signal::{Signal, SparseSpec, Spectrum, Tone};
