//! Closed-form and brute-force evaluation of the universal symmetric N→M qubit
//! cloning machine, viewed as a duplicator of classical bits stored redundantly
//! in N particles.
//!
//! - [`numerics`]: exact big-rational and log-domain backends behind one [`numerics::Weight`] trait.
//! - [`cloner`]: cloner spectrum, reduced block diagonals, fidelity and information fidelity.
//! - [`ensemble`]: ensemble density matrices, dephased corruption and the expectation-shift bound.
//! - [`oracle`]: full Hilbert-space construction and partial trace used to certify [`cloner`].
//! - [`sweep`]: figure-data sweeps and large-N limit studies emitted as CSV/SVG.
//! - [`cli`]: the `qclone` command-line front end.

pub mod cli;
pub mod cloner;
pub mod ensemble;
mod error;
pub mod format;
pub mod numerics;
pub mod oracle;
pub mod sweep;

pub use cloner::{CloneParams, CloneSpectrum, SymDiagonal};
pub use error::{Error, Result};
pub use numerics::{Backend, ExactScalar, LogScalar, Value, Weight};
