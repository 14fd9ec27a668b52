//! Closed forms for the two-particle RDM of the pairing state.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::statekit::YangParams;

/// Analytic spectrum, entropy and entanglement values of the pairing-state
/// 2-RDM. `ef_closed_form` uses ln m for the marginal entropy of the pair vector,
/// `ef_variant` uses ln(2m), the entropy of the unit-normalized vector's marginal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct YangAnalytics {
    pub m: usize,
    pub n: usize,
    /// (eigenvalue, multiplicity), largest first.
    pub spectrum: Vec<(f64, usize)>,
    pub entropy: f64,
    /// Weight of the pair projector in the mixture with the antisymmetric state.
    pub frac: f64,
    pub ef_closed_form: f64,
    pub ef_variant: f64,
    /// frac ln m + (1 - frac) (1/2) ln((m+1)/(m-1)); direction of the
    /// inequality is ambiguous, treated as an upper-bound candidate.
    pub esq_bound_closed_form: Option<f64>,
    /// Same with ln(2m) for the pair-vector term.
    pub esq_bound_variant: Option<f64>,
}

impl YangAnalytics {
    /// All eigenvalues (including zeros), descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.spectrum
            .iter()
            .flat_map(|&(v, mult)| std::iter::repeat_n(v, mult))
            .collect()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.spectrum[0].0
    }
}

pub fn yang_analytics(p: YangParams) -> Result<YangAnalytics> {
    let (m, n) = (p.m(), p.n());
    let ln2 = 2f64.ln();
    if m == 1 {
        // a single pair: the 2-RDM is one pure Slater projector
        return Ok(YangAnalytics {
            m,
            n,
            spectrum: vec![(1.0, 1)],
            entropy: 0.0,
            frac: 0.0,
            ef_closed_form: ln2,
            ef_variant: ln2,
            esq_bound_closed_form: None,
            esq_bound_variant: None,
        });
    }
    let (mf, nf) = (m as f64, n as f64);
    let denom = (2.0 * nf - 1.0) * mf * (mf - 1.0);
    let top = mf * mf - mf * nf + nf - 1.0;
    let rest = 2 * m * m - m - 1;
    let l1 = top / denom;
    let l2 = (nf - 1.0) / denom;
    let total = l1 + rest as f64 * l2;
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Normalization(format!(
            "pairing spectrum sums to {total}"
        )));
    }
    let xlnx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
    let entropy = denom.ln() - top / denom * top.ln() - rest as f64 * (nf - 1.0) / denom * {
        if n > 1 {
            (nf - 1.0).ln()
        } else {
            0.0
        }
    };
    debug_assert!((entropy + xlnx(l1) + rest as f64 * xlnx(l2)).abs() < 1e-9);
    let frac = (mf - nf) / ((2.0 * nf - 1.0) * (mf - 1.0));
    let slater_part = 0.5 * ((mf + 1.0) / (mf - 1.0)).ln();
    Ok(YangAnalytics {
        m,
        n,
        spectrum: vec![(l1, 1), (l2, rest)],
        entropy,
        frac,
        ef_closed_form: ln2 + frac * (mf.ln() - ln2),
        ef_variant: ln2 + frac * mf.ln(),
        esq_bound_closed_form: Some(frac * mf.ln() + (1.0 - frac) * slater_part),
        esq_bound_variant: Some(frac * (2.0 * mf).ln() + (1.0 - frac) * slater_part),
    })
}
