//! Reduced density matrices and entanglement quantities of fermionic
//! N-particle states.
//!
//! States live in the antisymmetric Fock sector spanned by N-subsets of M
//! modes ([`fockbasis`]). [`statekit`] builds Slater determinants, pairing
//! states and random states, [`rdmcore`] reduces them to k-particle density
//! matrices, and [`entmeasures`] evaluates entropies, entanglement of
//! formation and the entropy inequalities on top of the dense Hermitian
//! routines in [`hermlin`].

pub mod config;
pub mod corpus;
pub mod entmeasures;
pub mod error;
pub mod fockbasis;
pub mod hermlin;
pub mod rdmcore;
pub mod statekit;

pub use config::{Limits, Tolerances};
pub use error::{Error, Result};
pub use fockbasis::{ModeSet, RankedBasis};
pub use hermlin::{CMatrix, HermitianMatrix, Spectrum, C64};
pub use rdmcore::{Normalization, ReducedDM, Reducible, TensorDM, TensorState};
pub use statekit::{MixedStateN, PureStateN, YangParams};

/// Crate version, embedded in every file the tools write.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
