//! Dense complex linear algebra for density matrices.
//!
//! Everything here operates on small row-major matrices (dimension up to a
//! few hundred, Kronecker products up to 4096). The eigensolver is a cyclic
//! complex Jacobi method with a fixed sweep order, so results are bit-for-bit
//! reproducible for a given input.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::config::{Limits, Tolerances};
use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// General dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Outer product |u><v|.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale(&self, s: f64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// max |A - A^dagger| for a square matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Square complex matrix equal to its adjoint.
///
/// Every constructor checks the Hermiticity defect against
/// [`Tolerances::hermiticity`] (scaled by `max(1, max|A|)`) and then
/// symmetrizes, so stored entries are exactly Hermitian with a real diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::Shape(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows, m.cols
            )));
        }
        if m.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Shape("non-finite matrix entry".into()));
        }
        let defect = m.hermiticity_defect();
        let scale = m.max_abs().max(1.0);
        if defect > Tolerances::DEFAULT.hermiticity * scale {
            return Err(Error::Shape(format!(
                "matrix is not Hermitian (defect {defect:e})"
            )));
        }
        Ok(Self::symmetrized(m))
    }

    /// Averages A and A^dagger without checking the defect.
    pub(crate) fn symmetrized(mut m: CMatrix) -> Self {
        let n = m.rows;
        for i in 0..n {
            m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
            for j in i + 1..n {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        HermitianMatrix(m)
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix(CMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(CMatrix::identity(n))
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        HermitianMatrix(m)
    }

    /// Rank-one projector |v><v| (v is used as given, not normalized).
    pub fn projector(v: &[C64]) -> Self {
        HermitianMatrix::symmetrized(CMatrix::outer(v, v))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.rows
    }

    #[inline]
    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix(self.0.scale(s))
    }

    pub fn add_scaled(&mut self, other: &HermitianMatrix, s: f64) {
        assert_eq!(self.dim(), other.dim());
        for (a, b) in self.0.data.iter_mut().zip(&other.0.data) {
            *a += b * s;
        }
    }

    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.0
            .data
            .iter()
            .zip(&other.0.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

/// Eigenvalues in descending order with an optional unitary of eigenvectors
/// (column j belongs to eigenvalue j).
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Option<CMatrix>,
}

impl Spectrum {
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Spectrum {
            values,
            vectors: None,
        }
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Groups eigenvalues that agree within `tol` into (value, multiplicity) pairs.
    pub fn multiplicities(&self, tol: f64) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &v in &self.values {
            match out.last_mut() {
                Some((head, count)) if (*head - v).abs() <= tol => *count += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }

    /// Clamps roundoff negatives to zero; errors below `-tol.psd_hard`.
    pub fn clamp_psd(&mut self, tol: &Tolerances) -> Result<()> {
        let min = self.min();
        if min < -tol.psd_hard {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        if min < -tol.psd_clamp {
            log::warn!("clamping eigenvalue {min:e} (beyond roundoff tolerance) to zero");
        } else if min < 0.0 {
            log::debug!("clamping eigenvalue {min:e} to zero");
        }
        for v in &mut self.values {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(())
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn eig_herm(a: &HermitianMatrix) -> Spectrum {
    jacobi(a, true)
}

/// Eigenvalues only (skips accumulating the eigenvector matrix).
pub fn eigvals_herm(a: &HermitianMatrix) -> Spectrum {
    jacobi(a, false)
}

fn off_diagonal_sq(m: &CMatrix) -> f64 {
    let n = m.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += m[(i, j)].norm_sqr();
        }
    }
    2.0 * s
}

fn jacobi(a: &HermitianMatrix, want_vectors: bool) -> Spectrum {
    let tol = Tolerances::DEFAULT;
    let n = a.dim();
    let mut m = a.0.clone();
    let mut v = if want_vectors {
        Some(CMatrix::identity(n))
    } else {
        None
    };
    let norm_sq = m.frobenius().powi(2);
    let threshold_sq = (tol.jacobi_convergence * tol.jacobi_convergence) * norm_sq;

    for _sweep in 0..tol.jacobi_max_sweeps {
        if off_diagonal_sq(&m) <= threshold_sq {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 || mag * mag <= threshold_sq * 1e-8 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let phase = apq / mag;
                let zeta = (aqq - app) / (2.0 * mag);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on (p, q); A <- J^dagger A J.
                let sp = phase * s;
                let spc = sp.conj();
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = akp * c - akq * spc;
                    m[(k, q)] = akp * sp + akq * c;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = apk * c - aqk * sp;
                    m[(q, k)] = apk * spc + aqk * c;
                }
                m[(p, p)] = C64::new(app - t * mag, 0.0);
                m[(q, q)] = C64::new(aqq + t * mag, 0.0);
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c - vkq * spc;
                        v[(k, q)] = vkp * sp + vkq * c;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    // stable sort keeps the fixed index order among ties
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = v.map(|v| CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]));
    Spectrum { values, vectors }
}

/// Eigenvalues of the n x n Hermitian matrix stored row-major in `a`,
/// overwriting `a`; written into `out` unsorted. Same rotations as
/// [`eigvals_herm`] with a caller-chosen relative off-diagonal tolerance and
/// no allocation. For small inner loops.
/// Eigenvalues (unsorted) of the n x n Hermitian matrix stored row-major in
/// `a`, which is overwritten. Householder reduction to a real tridiagonal
/// matrix followed by implicit QL; no allocation beyond `out` and `work`
/// (both length >= n). Meant for the many small matrices of inner loops,
/// where it is several times faster than the Jacobi sweeps.
pub(crate) fn eigvals_small(a: &mut [C64], n: usize, out: &mut [f64], work: &mut [f64]) {
    let d = &mut out[..n];
    let e = &mut work[..n];
    for k in 0..n.saturating_sub(1) {
        let m = n - k - 1;
        let alpha = (k + 1..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        d[k] = a[k * n + k].re;
        e[k] = alpha;
        if alpha == 0.0 || m == 1 {
            continue;
        }
        // v = x + phase * alpha * e_1 stored in place of column k
        let x0 = a[(k + 1) * n + k];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        a[(k + 1) * n + k] = x0 + phase * alpha;
        let vnorm_sq: f64 = (k + 1..n).map(|i| a[i * n + k].norm_sqr()).sum();
        let tau = 2.0 / vnorm_sq;
        // p = tau * A v over the trailing block; kept in row k (unused from now on)
        let mut vp = 0.0;
        for i in k + 1..n {
            let mut acc = ZERO;
            for j in k + 1..n {
                acc += a[i * n + j] * a[j * n + k];
            }
            let pi = acc * tau;
            a[k * n + i] = pi;
            vp += (a[i * n + k].conj() * pi).re;
        }
        let kk = 0.5 * tau * vp;
        for i in k + 1..n {
            let q = a[k * n + i] - a[i * n + k] * kk;
            a[k * n + i] = q;
        }
        for i in k + 1..n {
            let vi = a[i * n + k];
            let qi = a[k * n + i];
            for j in k + 1..n {
                let vj = a[j * n + k];
                let qj = a[k * n + j];
                a[i * n + j] -= vi * qj.conj() + qi * vj.conj();
            }
        }
    }
    if n > 0 {
        d[n - 1] = a[(n - 1) * n + n - 1].re;
        e[n - 1] = 0.0;
    }
    tridiagonal_ql(d, e);
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix with
/// diagonal `d` and off-diagonal `e[i]` coupling i and i+1. Eigenvalues end
/// up in `d`; `e` is destroyed.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Rebuilds U f(diag) U^dagger from a spectrum carrying eigenvectors.
pub fn spectral_apply(spec: &Spectrum, f: impl Fn(f64) -> f64) -> HermitianMatrix {
    let u = spec
        .vectors
        .as_ref()
        .expect("spectral_apply needs eigenvectors");
    let n = u.rows();
    let fv: Vec<f64> = spec.values.iter().map(|&x| f(x)).collect();
    let mut out = CMatrix::zeros(n, n);
    for (k, &w) in fv.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for i in 0..n {
            let uik = u[(i, k)] * w;
            if uik == ZERO {
                continue;
            }
            for j in 0..n {
                out[(i, j)] += uik * u[(j, k)].conj();
            }
        }
    }
    HermitianMatrix::symmetrized(out)
}

/// Principal square root of a positive semidefinite matrix. Eigenvalues at
/// the roundoff level of the largest one are treated as exact zeros, since
/// the square root would amplify them to ~1e-8.
pub fn sqrt_psd(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let mut spec = eig_herm(a);
    spec.clamp_psd(&Tolerances::DEFAULT)?;
    let floor = SQRT_NOISE_FLOOR * spec.max().max(0.0) * a.dim() as f64;
    Ok(spectral_apply(&spec, |x| if x <= floor { 0.0 } else { x.sqrt() }))
}

const SQRT_NOISE_FLOOR: f64 = 4.0 * f64::EPSILON;

/// Natural logarithm restricted to the support: eigenvalues at or below the
/// support cutoff map to zero.
pub fn log_on_support(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let mut spec = eig_herm(a);
    spec.clamp_psd(&Tolerances::DEFAULT)?;
    let cut = Tolerances::DEFAULT.support_cutoff;
    Ok(spectral_apply(&spec, |x| if x > cut { x.ln() } else { 0.0 }))
}

pub fn kron(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    kron_with_limit(a, b, Limits::DEFAULT.max_tensor_dim)
}

pub fn kron_with_limit(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    limit: usize,
) -> Result<HermitianMatrix> {
    let (da, db) = (a.dim(), b.dim());
    let dim = da * db;
    if dim > limit {
        return Err(Error::Capacity {
            what: "Kronecker product dimension",
            requested: dim as u128,
            limit: limit as u128,
        });
    }
    let m = CMatrix::from_fn(dim, dim, |r, c| {
        a[(r / db, c / db)] * b[(r % db, c % db)]
    });
    Ok(HermitianMatrix(m))
}

/// Re Tr(AB) for Hermitian A and B.
pub fn trace_product(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!(
            "trace_product dims {} != {}",
            a.dim(),
            b.dim()
        )));
    }
    let n = a.dim();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    let scale = a.0.frobenius() * b.0.frobenius();
    if acc.im.abs() > 1e-10 * scale.max(1.0) {
        log::warn!("trace_product imaginary residue {:e}", acc.im);
    }
    Ok(acc.re)
}

/// Partial trace of a matrix on a tensor product with local dimensions `dims`,
/// keeping the factors listed (ascending) in `keep`.
pub fn partial_trace(a: &HermitianMatrix, dims: &[usize], keep: &[usize]) -> Result<HermitianMatrix> {
    let total: usize = dims.iter().product();
    if total != a.dim() {
        return Err(Error::Shape(format!(
            "dims {dims:?} do not multiply to {}",
            a.dim()
        )));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Shape(format!("invalid kept factors {keep:?}")));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let kdims: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
    let tdims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let kdim: usize = kdims.iter().product();
    let tdim: usize = tdims.iter().product();

    // strides of each factor in the full row-major index
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let offsets = |sub: &[usize], sub_dims: &[usize], idx: usize| -> usize {
        let mut rest = idx;
        let mut off = 0;
        for (pos, &f) in sub.iter().enumerate().rev() {
            let d = sub_dims[pos];
            off += (rest % d) * strides[f];
            rest /= d;
        }
        off
    };
    let koff: Vec<usize> = (0..kdim).map(|i| offsets(keep, &kdims, i)).collect();
    let toff: Vec<usize> = (0..tdim).map(|i| offsets(&traced, &tdims, i)).collect();

    let mut out = CMatrix::zeros(kdim, kdim);
    for i in 0..kdim {
        for j in 0..kdim {
            let mut acc = ZERO;
            for &t in &toff {
                acc += a[(koff[i] + t, koff[j] + t)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(HermitianMatrix::symmetrized(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
        let g = CMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        HermitianMatrix::symmetrized(CMatrix::from_fn(n, n, |i, j| g[(i, j)] + g[(j, i)].conj()))
    }

    fn random_psd(n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
        let g = CMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        HermitianMatrix::new(g.matmul(&g.adjoint()).unwrap()).unwrap()
    }

    fn reconstruct(spec: &Spectrum) -> HermitianMatrix {
        spectral_apply(spec, |x| x)
    }

    #[test]
    fn eig_examples() {
        let s = eig_herm(&HermitianMatrix::identity(3).scale(1.0 / 3.0));
        for v in &s.values {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        let s = eig_herm(&HermitianMatrix::diag(&[0.3, 0.7]));
        assert_eq!(s.values, vec![0.7, 0.3]);
        let half = C64::new(0.5, 0.0);
        let p = HermitianMatrix::new(CMatrix::from_vec(2, 2, vec![half, half, half, half]).unwrap()).unwrap();
        let s = eig_herm(&p);
        assert!((s.values[0] - 1.0).abs() < 1e-15);
        assert!(s.values[1].abs() < 1e-15);
    }

    #[test]
    fn eig_complex_phase() {
        // [[1, i], [-i, 1]] has eigenvalues 2 and 0
        let m = CMatrix::from_vec(
            2,
            2,
            vec![ONE, C64::new(0.0, 1.0), C64::new(0.0, -1.0), ONE],
        )
        .unwrap();
        let s = eig_herm(&HermitianMatrix::new(m).unwrap());
        assert!((s.values[0] - 2.0).abs() < 1e-14);
        assert!(s.values[1].abs() < 1e-14);
    }

    #[test]
    fn eig_reconstruction_and_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..100 {
            let n = 2 + trial % 15;
            let a = random_hermitian(n, &mut rng);
            let spec = eig_herm(&a);
            assert!(spec.values.windows(2).all(|w| w[0] >= w[1]));
            let r = reconstruct(&spec);
            let err = r.as_matrix().sub(a.as_matrix()).frobenius();
            assert!(err <= 1e-8 * a.as_matrix().frobenius().max(1.0), "n={n} err={err:e}");
            let u = spec.vectors.as_ref().unwrap();
            let utu = u.adjoint().matmul(u).unwrap();
            assert!(utu.sub(&CMatrix::identity(n)).max_abs() < 1e-9);
            // A U = U diag(lambda)
            let au = a.as_matrix().matmul(u).unwrap();
            let ud = CMatrix::from_fn(n, n, |i, j| u[(i, j)] * spec.values[j]);
            assert!(au.sub(&ud).max_abs() <= 1e-9 * a.as_matrix().max_abs());
        }
    }

    #[test]
    fn eig_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_hermitian(9, &mut rng);
        assert_eq!(eig_herm(&a), eig_herm(&a));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_vec(2, 2, vec![ONE, ONE, ZERO, ONE]).unwrap();
        assert!(matches!(HermitianMatrix::new(m), Err(Error::Shape(_))));
        let m = CMatrix::zeros(2, 3);
        assert!(HermitianMatrix::new(m).is_err());
    }

    #[test]
    fn small_kernel_matches_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut cases: Vec<HermitianMatrix> = Vec::new();
        for n in 1..9 {
            for _ in 0..20 {
                cases.push(random_psd(n, &mut rng));
            }
        }
        // degenerate and rank-deficient inputs
        let v = [C64::new(0.6, 0.0), C64::new(0.0, 0.8), ZERO, ZERO];
        cases.push(HermitianMatrix::projector(&v));
        cases.push(HermitianMatrix::identity(5));
        cases.push(HermitianMatrix::diag(&[3.0, 1.0, 3.0, 0.0]));
        cases.push(HermitianMatrix::zeros(3));
        for a in cases {
            let n = a.dim();
            let mut buf = a.as_matrix().as_slice().to_vec();
            let mut vals = vec![0.0; n];
            let mut work = vec![0.0; n];
            eigvals_small(&mut buf, n, &mut vals, &mut work);
            vals.sort_by(|x, y| y.total_cmp(x));
            let reference = eigvals_herm(&a);
            for (x, y) in vals.iter().zip(&reference.values) {
                assert!((x - y).abs() < 1e-12 * (1.0 + reference.max().abs()), "{vals:?} vs {:?}", reference.values);
            }
        }
    }

    #[test]
    fn sqrt_examples() {
        let r = sqrt_psd(&HermitianMatrix::diag(&[4.0, 9.0])).unwrap();
        assert!(r.max_abs_diff(&HermitianMatrix::diag(&[2.0, 3.0])) < 1e-15);
        let v = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let p = HermitianMatrix::projector(&v);
        assert!(sqrt_psd(&p).unwrap().max_abs_diff(&p) < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = random_psd(4, &mut rng);
            let r = sqrt_psd(&a).unwrap();
            let sq = r.as_matrix().matmul(r.as_matrix()).unwrap();
            assert!(sq.sub(a.as_matrix()).frobenius() <= 1e-8);
            assert!(eig_herm(&r).min() >= -1e-12);
        }
    }

    #[test]
    fn sqrt_diagonal_is_entrywise() {
        let d = [0.1, 0.0, 2.5, 1e-3];
        let r = sqrt_psd(&HermitianMatrix::diag(&d)).unwrap();
        for (i, x) in d.iter().enumerate() {
            assert_eq!(r[(i, i)].re, x.sqrt());
        }
    }

    #[test]
    fn sqrt_rejects_negative() {
        let e = sqrt_psd(&HermitianMatrix::diag(&[1.0, -1e-3])).unwrap_err();
        assert!(matches!(e, Error::NotPsd { .. }));
        // roundoff negatives are clamped
        assert!(sqrt_psd(&HermitianMatrix::diag(&[1.0, -1e-11])).is_ok());
    }

    #[test]
    fn kron_examples() {
        let h = HermitianMatrix::identity(2).scale(0.5);
        let k = kron(&h, &h).unwrap();
        assert!(k.max_abs_diff(&HermitianMatrix::identity(4).scale(0.25)) == 0.0);
        let k = kron(&HermitianMatrix::diag(&[1.0, 0.0]), &HermitianMatrix::diag(&[0.0, 1.0])).unwrap();
        assert_eq!(k, HermitianMatrix::diag(&[0.0, 1.0, 0.0, 0.0]));
        let big = HermitianMatrix::identity(65);
        assert!(matches!(kron(&big, &big), Err(Error::Capacity { .. })));
    }

    #[test]
    fn kron_commutes_with_sqrt() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let a = random_psd(3, &mut rng);
            let b = random_psd(2, &mut rng);
            let lhs = sqrt_psd(&kron(&a, &b).unwrap()).unwrap();
            let rhs = kron(&sqrt_psd(&a).unwrap(), &sqrt_psd(&b).unwrap()).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-9);
            let tr = kron(&a, &b).unwrap().trace();
            assert!((tr - a.trace() * b.trace()).abs() < 1e-12 * tr.abs().max(1.0));
        }
    }

    #[test]
    fn trace_product_examples() {
        for n in 1..6 {
            let m = HermitianMatrix::identity(n).scale(1.0 / n as f64);
            assert!((trace_product(&m, &m).unwrap() - 1.0 / n as f64).abs() < 1e-15);
        }
        let p = HermitianMatrix::diag(&[1.0, 0.0, 1.0]);
        let q = HermitianMatrix::diag(&[0.0, 1.0, 0.0]);
        assert_eq!(trace_product(&p, &q).unwrap(), 0.0);
        assert!(trace_product(&p, &HermitianMatrix::identity(2)).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_hermitian(5, &mut rng);
        let b = random_hermitian(5, &mut rng);
        let mut oracle = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                oracle += (a[(i, j)] * b[(j, i)]).re;
            }
        }
        assert!((trace_product(&a, &b).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_psd(2, &mut rng);
        let b = random_psd(3, &mut rng);
        let c = random_psd(2, &mut rng);
        let abc = kron(&kron(&a, &b).unwrap(), &c).unwrap();
        let pa = partial_trace(&abc, &[2, 3, 2], &[0]).unwrap();
        assert!(pa.max_abs_diff(&a.scale(b.trace() * c.trace())) < 1e-12);
        let pac = partial_trace(&abc, &[2, 3, 2], &[0, 2]).unwrap();
        let ac = kron(&a, &c).unwrap().scale(b.trace());
        assert!(pac.max_abs_diff(&ac) < 1e-12);
        assert!(partial_trace(&abc, &[2, 3], &[0]).is_err());
    }

    #[test]
    fn log_on_support_skips_zeros() {
        let l = log_on_support(&HermitianMatrix::diag(&[0.5, 0.0])).unwrap();
        assert!((l[(0, 0)].re - 0.5f64.ln()).abs() < 1e-15);
        assert_eq!(l[(1, 1)].re, 0.0);
    }
}
