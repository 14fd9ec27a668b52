//! Mutual-information, quantitative-subadditivity and elementary-symmetric
//! bounds.

use crate::config::{Limits, Tolerances};
use crate::error::{Error, Result};
use crate::fockbasis::{binomial, SubsetIter};
use crate::hermlin::{kron_with_limit, sqrt_psd, trace_product, HermitianMatrix};
use crate::rdmcore::{expand_to_tensor, Reducible, TensorDM, TensorState};
use crate::statekit::PureStateN;

use super::report::{BoundReport, Direction};
use super::{purity, spectrum_entropy, vn_entropy, Entropy};

/// Two-particle mutual information against its purity and entropy bounds:
///
/// 2 S1 - S12 >= ln(2 / (1 - Tr rho1^2)) >= ln(2 / (1 - exp(-S1))).
///
/// The first report compares the left side with the purity bound, the second
/// compares the two bounds.
pub fn mutual_info_bounds<S: Reducible + ?Sized>(state: &S, tol: f64) -> Result<(BoundReport, BoundReport)> {
    let n = state.basis().particles();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "mutual information needs N >= 2, got {n}"
        )));
    }
    let r1 = state.reduce(1)?;
    let r2 = state.reduce(2)?;
    let s1 = r1.entropy()?;
    let s12 = r2.entropy()?;
    let p2 = purity(&r1.matrix);
    let lhs = 2.0 * s1 - s12;
    let rhs1 = (2.0 / (1.0 - p2)).ln();
    let rhs2 = (2.0 / (1.0 - (-s1).exp())).ln();
    let desc = state.describe();
    let first = BoundReport::new("mutual_info_purity", lhs, rhs1, Direction::LhsGeRhs, tol)
        .with("state", &desc)
        .with("S1", s1)
        .with("S12", s12)
        .with("purity", p2);
    let first = {
        let tight = first.is_tight(tol);
        first.with("equality", tight)
    };
    let second = BoundReport::new("mutual_info_entropy", rhs1, rhs2, Direction::LhsGeRhs, tol)
        .with("state", &desc)
        .with("S1", s1);
    let second = {
        let tight = second.is_tight(tol);
        second.with("equality", tight)
    };
    Ok((first, second))
}

/// S12 - S1 - S2 <= 2 ln Tr[sqrt(rho12) sqrt(rho1 (x) rho2)].
///
/// The right side equals 2 ln(1 - Tr[sqrt(rho12) - sqrt(rho1 (x) rho2)]^2 / 2);
/// both forms are evaluated and the second is recorded in the context.
pub fn subadd_remainder(
    rho12: &TensorDM,
    rho1: &HermitianMatrix,
    rho2: &HermitianMatrix,
    tol: f64,
) -> Result<BoundReport> {
    if rho12.parties() != 2 {
        return Err(Error::Shape(format!(
            "bipartite remainder needs 2 parties, got {}",
            rho12.parties()
        )));
    }
    let marg_tol = Tolerances::DEFAULT.marginal;
    let m1 = rho12.marginal(&[0])?;
    let m2 = rho12.marginal(&[1])?;
    if m1.dim() != rho1.dim() || m2.dim() != rho2.dim() {
        return Err(Error::Shape("marginal dimensions do not match".into()));
    }
    let dev = m1.max_abs_diff(rho1).max(m2.max_abs_diff(rho2));
    if dev > marg_tol {
        return Err(Error::MarginalMismatch { deviation: dev });
    }
    let s12 = rho12.entropy()?;
    let s1 = vn_entropy(rho1)?;
    let s2 = vn_entropy(rho2)?;
    let a = sqrt_psd(&rho12.matrix)?;
    let b = kron_with_limit(&sqrt_psd(rho1)?, &sqrt_psd(rho2)?, Limits::DEFAULT.max_tensor_dim)?;
    let overlap = trace_product(&a, &b)?;
    let diff = a.as_matrix().sub(b.as_matrix());
    let via_difference = 1.0 - 0.5 * diff.frobenius().powi(2);
    let lhs = s12 - s1 - s2;
    let rhs = 2.0 * overlap.ln();
    Ok(BoundReport::new("subadd_remainder", lhs, rhs, Direction::LhsLeRhs, tol)
        .with("S12", s12)
        .with("S1", s1)
        .with("S2", s2)
        .with("overlap", overlap)
        .with("overlap_via_difference", via_difference))
}

fn check_blocks(parties: usize, blocks: &[usize]) -> Result<()> {
    if blocks.is_empty() || blocks.contains(&0) || blocks.iter().sum::<usize>() != parties {
        return Err(Error::InvalidParameter(format!(
            "grouping {blocks:?} does not partition {parties} parties"
        )));
    }
    Ok(())
}

/// Contiguous party ranges of a grouping.
fn block_ranges(blocks: &[usize]) -> Vec<(usize, usize)> {
    let mut start = 0;
    blocks
        .iter()
        .map(|&b| {
            let r = (start, start + b);
            start += b;
            r
        })
        .collect()
}

/// N-party remainder S(rho) - sum_b S(rho_b) <= 2 ln Tr[sqrt(rho) (x)_b sqrt(rho_b)]
/// with parties grouped into contiguous blocks of the given sizes.
pub fn subadd_remainder_n(rho: &TensorDM, blocks: &[usize], tol: f64) -> Result<BoundReport> {
    check_blocks(rho.parties(), blocks)?;
    let limit = Limits::DEFAULT.max_tensor_dim;
    if rho.matrix.dim() > limit {
        return Err(Error::Capacity {
            what: "tensor density dimension",
            requested: rho.matrix.dim() as u128,
            limit: limit as u128,
        });
    }
    let s_full = rho.entropy()?;
    let mut s_sum = 0.0;
    let mut roots: Option<HermitianMatrix> = None;
    for (start, end) in block_ranges(blocks) {
        let keep: Vec<usize> = (start..end).collect();
        let marg = rho.marginal(&keep)?;
        s_sum += vn_entropy(&marg)?;
        let root = sqrt_psd(&marg)?;
        roots = Some(match roots {
            None => root,
            Some(acc) => kron_with_limit(&acc, &root, limit)?,
        });
    }
    let roots = roots.expect("at least one block");
    let overlap = trace_product(&sqrt_psd(&rho.matrix)?, &roots)?;
    let lhs = s_full - s_sum;
    Ok(
        BoundReport::new("subadd_remainder_n", lhs, 2.0 * overlap.ln(), Direction::LhsLeRhs, tol)
            .with("blocks", format!("{blocks:?}"))
            .with("S_full", s_full)
            .with("overlap", overlap),
    )
}

/// Same bound for a pure joint state; sqrt(rho) = rho, so the overlap is
/// <psi| (x)_b sqrt(rho_b) |psi> and no joint density matrix is formed.
pub fn subadd_remainder_n_pure(psi: &TensorState, blocks: &[usize], tol: f64) -> Result<BoundReport> {
    check_blocks(psi.dims.len(), blocks)?;
    let norm: f64 = psi.amplitudes.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > Tolerances::DEFAULT.trace {
        return Err(Error::Normalization(format!("joint state has norm^2 {norm}")));
    }
    let mut s_sum = 0.0;
    let mut image = psi.clone();
    let mut block_entropies = Vec::new();
    for (start, end) in block_ranges(blocks) {
        let marg = psi.block_marginal(start, end);
        let s = vn_entropy(&marg)?;
        s_sum += s;
        block_entropies.push(s);
        let root = sqrt_psd(&marg)?;
        image.apply_block(start, end, root.as_matrix());
    }
    let overlap: f64 = psi
        .amplitudes
        .iter()
        .zip(&image.amplitudes)
        .map(|(a, b)| (a.conj() * b).re)
        .sum();
    let lhs = -s_sum;
    Ok(
        BoundReport::new("subadd_remainder_n", lhs, 2.0 * overlap.ln(), Direction::LhsLeRhs, tol)
            .with("blocks", format!("{blocks:?}"))
            .with("S_full", 0.0)
            .with("block_entropies", format!("{block_entropies:?}"))
            .with("overlap", overlap),
    )
}

/// Pair-grouped remainder of an even-N pure fermionic state: the M^N tensor
/// expansion split into N/2 blocks of two particles. Every block marginal is
/// the embedded 2-RDM, so the left side is -(N/2) S(rho_12).
pub fn pair_grouped_remainder(state: &PureStateN, tol: f64) -> Result<BoundReport> {
    let n = state.particles();
    if n % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "pair grouping needs even N, got {n}"
        )));
    }
    let psi = expand_to_tensor(state, Limits::DEFAULT.max_bruteforce)?;
    let blocks = vec![2; n / 2];
    Ok(subadd_remainder_n_pure(&psi, &blocks, tol)?.with("state", format!(
        "pure M={} N={n}",
        state.modes()
    )))
}

/// p_j = sum_i lambda_i^j for j = 1..=order.
pub fn power_sums(values: &[f64], order: usize) -> Vec<f64> {
    (1..=order)
        .map(|j| values.iter().map(|x| x.powi(j as i32)).sum())
        .collect()
}

/// e_n from power sums p_2..p_n (p_1 = 1) by Newton's identities
/// k e_k = sum_{i=1..k} (-1)^(i-1) e_{k-i} p_i.
pub fn elem_sym(n: usize, p_from_2: &[f64]) -> Result<f64> {
    if n < 1 || p_from_2.len() + 1 < n {
        return Err(Error::InvalidParameter(format!(
            "e_{n} needs power sums p_2..p_{n}, got {}",
            p_from_2.len()
        )));
    }
    let p = |i: usize| if i == 1 { 1.0 } else { p_from_2[i - 2] };
    let mut e = vec![1.0; n + 1];
    for k in 1..=n {
        let mut acc = 0.0;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[k - i] * p(i);
        }
        e[k] = acc / k as f64;
    }
    Ok(e[n])
}

/// e_n as det(T)/n! where T has p_{i-j+1} on and below the diagonal (p_1 = 1)
/// and i on the i-th superdiagonal entry.
pub fn elem_sym_determinant(n: usize, p_from_2: &[f64]) -> Result<f64> {
    if n < 1 || p_from_2.len() + 1 < n {
        return Err(Error::InvalidParameter(format!(
            "e_{n} needs power sums p_2..p_{n}, got {}",
            p_from_2.len()
        )));
    }
    let p = |i: usize| if i == 1 { 1.0 } else { p_from_2[i - 2] };
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            a[i * n + j] = p(i - j + 1);
        }
        if i + 1 < n {
            a[i * n + i + 1] = (i + 1) as f64;
        }
    }
    let fact: f64 = (1..=n).map(|x| x as f64).product();
    Ok(det_real(n, &mut a) / fact)
}

fn det_real(n: usize, a: &mut [f64]) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if a[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let pv = a[col * n + col];
        det *= pv;
        for r in col + 1..n {
            let f = a[r * n + col] / pv;
            for k in col..n {
                a[r * n + k] -= f * a[col * n + k];
            }
        }
    }
    det
}

/// Direct sum over all n-subsets of the spectrum.
pub fn elem_sym_direct(values: &[f64], n: usize) -> Result<f64> {
    elem_sym_direct_with_limit(values, n, Limits::DEFAULT.max_elem_sym_terms)
}

pub fn elem_sym_direct_with_limit(values: &[f64], n: usize, limit: u128) -> Result<f64> {
    if values.len() > 64 {
        return Err(Error::Capacity {
            what: "spectrum length",
            requested: values.len() as u128,
            limit: 64,
        });
    }
    let terms = binomial(values.len(), n) as u128;
    if terms > limit {
        return Err(Error::Capacity {
            what: "elementary symmetric terms",
            requested: terms,
            limit,
        });
    }
    Ok(SubsetIter::new(values.len(), n)
        .map(|s| s.modes().map(|i| values[i]).product::<f64>())
        .sum())
}

/// N S1 - S_{1..N} >= -ln e_N(rho1).
pub fn nbody_elem_bound<S: Reducible + ?Sized>(state: &S, tol: f64) -> Result<BoundReport> {
    let n = state.basis().particles();
    let r1 = state.reduce(1)?;
    let spec = r1.spectrum()?;
    let s1 = spectrum_entropy(&spec.values);
    let s_full = state.full_entropy()?;
    let p = power_sums(&spec.values, n);
    let e_n = elem_sym(n, &p[1..])?;
    let lhs = n as f64 * s1 - s_full;
    if e_n <= 1e-15 {
        return Ok(BoundReport::vacuous("nbody_elem", lhs, Direction::LhsGeRhs)
            .with("state", state.describe())
            .with("e_N", e_n));
    }
    Ok(
        BoundReport::new("nbody_elem", lhs, -e_n.ln(), Direction::LhsGeRhs, tol)
            .with("state", state.describe())
            .with("e_N", e_n)
            .with("S1", s1)
            .with("S_full", s_full),
    )
}
