//! Conditional-mutual-information values of explicit extensions. Each value
//! is an upper bound on the squashed entanglement of the two-party marginal.

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::fockbasis::{binomial, rank_unchecked, ModeSet, RankedBasis};
use crate::hermlin::{CMatrix, HermitianMatrix};
use crate::rdmcore::{reduce_pure, ReducedDM, TensorDM};
use crate::statekit::slater_state;

use super::{vn_entropy, Entropy};

/// Entropies of an extension rho_123 of rho_12.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtensionSpec {
    pub s123: f64,
    pub s3: f64,
    pub s13: f64,
    pub s23: f64,
}

impl ExtensionSpec {
    pub fn new(s123: f64, s3: f64, s13: f64, s23: f64) -> Result<Self> {
        for (name, v) in [("S123", s123), ("S3", s3), ("S13", s13), ("S23", s23)] {
            if !(v >= -1e-12) {
                return Err(Error::InvalidParameter(format!("{name} = {v} is negative")));
            }
        }
        Ok(ExtensionSpec { s123, s3, s13, s23 })
    }
}

/// (S13 + S23 - S123 - S3) / 2.
pub fn squashed_extension_value(e: &ExtensionSpec) -> f64 {
    0.5 * (-e.s123 - e.s3 + e.s13 + e.s23)
}

/// Entropies of a genuine three-party density matrix.
pub fn extension_from_tripartite(rho: &TensorDM) -> Result<ExtensionSpec> {
    if rho.parties() != 3 {
        return Err(Error::Shape(format!(
            "extension needs 3 parties, got {}",
            rho.parties()
        )));
    }
    ExtensionSpec::new(
        rho.entropy()?,
        vn_entropy(&rho.marginal(&[2])?)?,
        vn_entropy(&rho.marginal(&[0, 2])?)?,
        vn_entropy(&rho.marginal(&[1, 2])?)?,
    )
}

/// Sign of the permutation that sorts `seq`.
fn sort_sign(seq: &[usize]) -> f64 {
    let mut inv = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Embeds a k-RDM (k >= 2) into H (x) H (x) wedge^(k-2) H: the first two
/// particles become distinguishable factors, the remaining k-2 stay in the
/// antisymmetric basis.
pub fn embed_rdm_to_tensor(r: &ReducedDM) -> Result<TensorDM> {
    let k = r.k;
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "extension embedding needs k >= 2, got {k}"
        )));
    }
    let m = r.modes();
    let d3 = binomial(m, k - 2) as usize;
    let total = m * m * d3;
    let limit = Limits::DEFAULT.max_tensor_dim;
    if total > limit {
        return Err(Error::Capacity {
            what: "extension tensor dimension",
            requested: total as u128,
            limit: limit as u128,
        });
    }
    let coeff = 1.0 / ((k * (k - 1)) as f64).sqrt();
    // (tensor index, coefficient) for every basis k-set
    let columns: Vec<Vec<(usize, f64)>> = r
        .basis
        .iter()
        .map(|set| {
            let modes: Vec<usize> = set.modes().collect();
            let mut col = Vec::with_capacity(k * (k - 1));
            for &a in &modes {
                for &b in &modes {
                    if a == b {
                        continue;
                    }
                    let rest = set.difference(ModeSet::from_bits(1 << a | 1 << b));
                    let mut seq = vec![a, b];
                    seq.extend(rest.modes());
                    let idx = (a * m + b) * d3 + rank_unchecked(rest);
                    col.push((idx, coeff * sort_sign(&seq)));
                }
            }
            col
        })
        .collect();
    let mut mat = CMatrix::zeros(total, total);
    for (i, ci) in columns.iter().enumerate() {
        for (j, cj) in columns.iter().enumerate() {
            let v = r.matrix[(i, j)];
            if v.norm_sqr() == 0.0 {
                continue;
            }
            for &(x, ex) in ci {
                for &(y, ey) in cj {
                    mat[(x, y)] += v * (ex * ey);
                }
            }
        }
    }
    TensorDM::new(vec![m, m, d3], HermitianMatrix::new(mat)?)
}

fn check_slater_k(n: usize, k: usize) -> Result<()> {
    if k < 2 || k > n {
        return Err(Error::InvalidParameter(format!(
            "extension order k={k} outside 2..={n}"
        )));
    }
    Ok(())
}

/// Extension of a full-shell N-particle Slater 2-RDM by its k-RDM, with
/// entropies read off the reduced k-, (k-1)- and (k-2)-RDMs.
pub fn slater_extension(n: usize, k: usize) -> Result<ExtensionSpec> {
    check_slater_k(n, k)?;
    let basis = RankedBasis::new(n, n)?;
    let s = slater_state(&basis, ModeSet::first(n))?;
    let ent = |order: usize| -> Result<f64> {
        if order == 0 {
            Ok(0.0)
        } else {
            reduce_pure(&s, order)?.entropy()
        }
    };
    let s13 = ent(k - 1)?;
    ExtensionSpec::new(ent(k)?, ent(k - 2)?, s13, s13)
}

/// Same extension built as an actual three-party density matrix; all four
/// entropies come from its marginals.
pub fn slater_extension_tensor(n: usize, k: usize) -> Result<ExtensionSpec> {
    check_slater_k(n, k)?;
    let basis = RankedBasis::new(n, n)?;
    let s = slater_state(&basis, ModeSet::first(n))?;
    extension_from_tripartite(&embed_rdm_to_tensor(&reduce_pure(&s, k)?)?)
}

/// Closed form of the Slater k-RDM extension value:
/// (1/2) ln[k (N-k+2) / ((N-k+1)(k-1))].
pub fn slater_extension_value_exact(n: usize, k: usize) -> Result<f64> {
    check_slater_k(n, k)?;
    let (n, k) = (n as f64, k as f64);
    Ok(0.5 * (k * (n - k + 2.0) / ((n - k + 1.0) * (k - 1.0))).ln())
}

/// Extension order used by the closed-form squashed bound: N/2 for even N,
/// (N+1)/2 for odd N.
pub fn slater_squashed_k(n: usize) -> Result<usize> {
    match n {
        _ if n % 2 == 0 && n >= 4 => Ok(n / 2),
        _ if n % 2 == 1 && n >= 3 => Ok((n + 1) / 2),
        _ => Err(Error::InvalidParameter(format!(
            "squashed bound needs N >= 3 (and N != 2), got {n}"
        ))),
    }
}

/// (1/2) ln((N+2)/(N-2)) for even N, (1/2) ln((N+3)/(N-1)) for odd N.
pub fn slater_squashed_bound(n: usize) -> Result<f64> {
    slater_squashed_k(n)?;
    let x = n as f64;
    Ok(if n % 2 == 0 {
        0.5 * ((x + 2.0) / (x - 2.0)).ln()
    } else {
        0.5 * ((x + 3.0) / (x - 1.0)).ln()
    })
}
