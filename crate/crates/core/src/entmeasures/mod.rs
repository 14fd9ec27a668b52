//! Entropy functionals, entanglement measures and the inequality checks
//! built on them. All entropies are in nats.

mod bounds;
mod formation;
mod report;
mod search;
mod squashed;
mod yang;

pub use bounds::{
    elem_sym, elem_sym_determinant, elem_sym_direct, elem_sym_direct_with_limit, mutual_info_bounds,
    nbody_elem_bound, pair_grouped_remainder, power_sums, subadd_remainder, subadd_remainder_n,
    subadd_remainder_n_pure,
};
pub use formation::{ef_fermionic_excess, ef_optimize, EfOptions, EfResult, EnsembleDecomposition};
pub use report::{BoundReport, Direction};
pub use search::{min_s2_search, SearchOptions, SearchResult};
pub use squashed::{
    embed_rdm_to_tensor, extension_from_tripartite, slater_extension, slater_extension_tensor,
    slater_extension_value_exact, slater_squashed_bound, slater_squashed_k, squashed_extension_value,
    ExtensionSpec,
};
pub use yang::{yang_analytics, YangAnalytics};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::hermlin::{eigvals_herm, trace_product, HermitianMatrix, Spectrum};
use crate::rdmcore::{ReducedDM, TensorDM};

/// -sum lambda ln lambda over eigenvalues above the support cutoff.
pub fn spectrum_entropy(values: &[f64]) -> f64 {
    let cut = Tolerances::DEFAULT.support_cutoff;
    values
        .iter()
        .filter(|&&x| x > cut)
        .map(|&x| -x * x.ln())
        .sum::<f64>()
        .max(0.0)
}

/// Von Neumann entropy of a unit-trace density matrix.
pub fn vn_entropy(rho: &HermitianMatrix) -> Result<f64> {
    let tol = Tolerances::DEFAULT;
    let tr = rho.trace();
    if (tr - 1.0).abs() > tol.entropy_trace {
        return Err(Error::Normalization(format!(
            "entropy needs unit trace, got {tr}"
        )));
    }
    let mut s = eigvals_herm(rho);
    s.clamp_psd(&tol)?;
    Ok(spectrum_entropy(&s.values))
}

/// Anything with a density-matrix spectrum.
pub trait Entropy {
    fn entropy(&self) -> Result<f64>;
}

impl Entropy for HermitianMatrix {
    fn entropy(&self) -> Result<f64> {
        vn_entropy(self)
    }
}

impl Entropy for ReducedDM {
    fn entropy(&self) -> Result<f64> {
        vn_entropy(&self.matrix)
    }
}

impl Entropy for TensorDM {
    fn entropy(&self) -> Result<f64> {
        vn_entropy(&self.matrix)
    }
}

impl Entropy for Spectrum {
    fn entropy(&self) -> Result<f64> {
        let sum = self.sum();
        if (sum - 1.0).abs() > Tolerances::DEFAULT.entropy_trace {
            return Err(Error::Normalization(format!(
                "entropy needs unit trace, got {sum}"
            )));
        }
        Ok(spectrum_entropy(&self.values))
    }
}

/// Tr rho^2.
pub fn purity(rho: &HermitianMatrix) -> f64 {
    trace_product(rho, rho).expect("square matrix")
}
