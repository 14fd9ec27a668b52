//! Numerical tolerances and capacity limits used throughout the crate.
//!
//! Acceptance checks pin these values, so they live in one place.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Max |A - A^dagger| accepted when building a Hermitian matrix.
    pub hermiticity: f64,
    /// Jacobi stops once off-diagonal Frobenius mass < this * ||A||_F.
    pub jacobi_convergence: f64,
    pub jacobi_max_sweeps: usize,
    /// Eigenvalues below this are treated as exact zeros (log on support).
    pub support_cutoff: f64,
    /// Negative eigenvalues above -psd_clamp are silently clamped to zero.
    pub psd_clamp: f64,
    /// Negative eigenvalues below -psd_hard are an error.
    pub psd_hard: f64,
    /// Trace / normalization checks on density matrices.
    pub trace: f64,
    /// Unit-trace check performed before taking an entropy.
    pub entropy_trace: f64,
    /// Slack below which a bound counts as violated (and |slack| below which it is tight).
    pub bound: f64,
    /// Allowed deviation between supplied and recomputed marginals.
    pub marginal: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermiticity: 1e-12,
        jacobi_convergence: 1e-14,
        jacobi_max_sweeps: 100,
        support_cutoff: 1e-12,
        psd_clamp: 1e-10,
        psd_hard: 1e-6,
        trace: 1e-10,
        entropy_trace: 1e-8,
        bound: 1e-9,
        marginal: 1e-8,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Capacity guards. Exceeding one is a hard error, never a truncation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Limits {
    /// Largest antisymmetric basis dimension binomial(M, N) for a state.
    pub max_state_dim: usize,
    /// Largest dense tensor-product dimension (Kronecker products, tensor states).
    pub max_tensor_dim: usize,
    /// Largest M^N admitted by the brute-force tensor reduction.
    pub max_bruteforce: usize,
    /// Largest number of subset products summed by the direct elementary symmetric function.
    pub max_elem_sym_terms: u128,
}

impl Limits {
    pub const DEFAULT: Limits = Limits {
        max_state_dim: 200_000,
        max_tensor_dim: 4096,
        max_bruteforce: 100_000,
        max_elem_sym_terms: 1_000_000,
    };
}

impl Default for Limits {
    fn default() -> Self {
        Self::DEFAULT
    }
}
