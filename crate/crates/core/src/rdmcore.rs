//! Reduced density matrices of N-fermion states.
//!
//! k-particle RDMs live on the compact antisymmetric basis of k-subsets. The
//! fast reduction sums over the complement sets K directly; an independent
//! brute-force path expands the state into the full M^N tensor product and
//! traces out factors densely. The tensor embedding and the antisymmetrizer
//! are provided for quantities defined on H (x) H.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};

use crate::config::{Limits, Tolerances};
use crate::error::{Error, Result};
use crate::fockbasis::{binomial, merge_sign_unchecked, rank_unchecked, ModeSet, RankedBasis, SubsetIter};
use crate::hermlin::{eigvals_herm, partial_trace, CMatrix, HermitianMatrix, Spectrum, C64, ZERO};
use crate::statekit::{parse_num, MixedStateN, PureStateN};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// Trace one.
    UnitTrace,
    /// Trace binomial(N, k).
    Physics,
}

impl Normalization {
    pub fn target_trace(self, particles: usize, k: usize) -> f64 {
        match self {
            Normalization::UnitTrace => 1.0,
            Normalization::Physics => binomial(particles, k) as f64,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Normalization::UnitTrace => "unit",
            Normalization::Physics => "physics",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s {
            "unit" => Some(Normalization::UnitTrace),
            "physics" => Some(Normalization::Physics),
            _ => None,
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// k-particle reduced density matrix on the antisymmetric basis of k-subsets.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedDM {
    pub k: usize,
    /// Particle number N of the state it was reduced from.
    pub particles: usize,
    pub basis: RankedBasis,
    pub matrix: HermitianMatrix,
    pub normalization: Normalization,
    pub source: String,
}

impl ReducedDM {
    pub fn modes(&self) -> usize {
        self.basis.modes()
    }

    /// Eigenvalues, descending, with roundoff negatives clamped.
    pub fn spectrum(&self) -> Result<Spectrum> {
        let mut s = eigvals_herm(&self.matrix);
        s.clamp_psd(&Tolerances::DEFAULT)?;
        Ok(s)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }
}

/// Density matrix on a tensor product of `dims.len()` parties.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorDM {
    pub dims: Vec<usize>,
    pub matrix: HermitianMatrix,
}

impl TensorDM {
    pub fn new(dims: Vec<usize>, matrix: HermitianMatrix) -> Result<Self> {
        let total: usize = dims.iter().product();
        if total != matrix.dim() || dims.is_empty() {
            return Err(Error::Shape(format!(
                "dims {dims:?} do not match matrix dimension {}",
                matrix.dim()
            )));
        }
        Ok(TensorDM { dims, matrix })
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    /// Reduced state of the listed parties (ascending).
    pub fn marginal(&self, keep: &[usize]) -> Result<HermitianMatrix> {
        partial_trace(&self.matrix, &self.dims, keep)
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        let mut s = eigvals_herm(&self.matrix);
        s.clamp_psd(&Tolerances::DEFAULT)?;
        Ok(s)
    }
}

/// Pure vector on a tensor product, row-major over the factors.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorState {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<C64>,
}

impl TensorState {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if total != amplitudes.len() {
            return Err(Error::Shape(format!(
                "dims {dims:?} do not match {} amplitudes",
                amplitudes.len()
            )));
        }
        Ok(TensorState { dims, amplitudes })
    }

    /// Reduced density matrix of the contiguous parties `start..end`.
    pub fn block_marginal(&self, start: usize, end: usize) -> HermitianMatrix {
        let before: usize = self.dims[..start].iter().product();
        let mid: usize = self.dims[start..end].iter().product();
        let after: usize = self.dims[end..].iter().product();
        let mut out = CMatrix::zeros(mid, mid);
        for a in 0..before {
            for i in 0..mid {
                let bi = (a * mid + i) * after;
                let row_i = &self.amplitudes[bi..bi + after];
                if row_i.iter().all(|z| *z == ZERO) {
                    continue;
                }
                for j in 0..=i {
                    let bj = (a * mid + j) * after;
                    let row_j = &self.amplitudes[bj..bj + after];
                    let acc: C64 = row_i.iter().zip(row_j).map(|(x, y)| x * y.conj()).sum();
                    out[(i, j)] += acc;
                }
            }
        }
        for i in 0..mid {
            for j in 0..i {
                out[(j, i)] = out[(i, j)].conj();
            }
        }
        HermitianMatrix::symmetrized(out)
    }

    /// Applies `op` to the contiguous parties `start..end` in place.
    pub fn apply_block(&mut self, start: usize, end: usize, op: &CMatrix) {
        let before: usize = self.dims[..start].iter().product();
        let mid: usize = self.dims[start..end].iter().product();
        let after: usize = self.dims[end..].iter().product();
        assert_eq!(op.rows(), mid);
        let mut buf = vec![ZERO; mid];
        for a in 0..before {
            for c in 0..after {
                for (i, slot) in buf.iter_mut().enumerate() {
                    *slot = self.amplitudes[(a * mid + i) * after + c];
                }
                for i in 0..mid {
                    let v: C64 = op.row(i).iter().zip(&buf).map(|(x, y)| x * y).sum();
                    self.amplitudes[(a * mid + i) * after + c] = v;
                }
            }
        }
    }

    pub fn to_density(&self, limits: &Limits) -> Result<TensorDM> {
        if self.amplitudes.len() > limits.max_tensor_dim {
            return Err(Error::Capacity {
                what: "tensor density dimension",
                requested: self.amplitudes.len() as u128,
                limit: limits.max_tensor_dim as u128,
            });
        }
        TensorDM::new(self.dims.clone(), HermitianMatrix::projector(&self.amplitudes))
    }
}

/// States that can be reduced to k-particle density matrices.
pub trait Reducible {
    fn basis(&self) -> &RankedBasis;
    fn reduce(&self, k: usize) -> Result<ReducedDM>;
    /// Entropy of the full N-particle density matrix.
    fn full_entropy(&self) -> Result<f64>;
    fn describe(&self) -> String;
}

impl Reducible for PureStateN {
    fn basis(&self) -> &RankedBasis {
        PureStateN::basis(self)
    }

    fn reduce(&self, k: usize) -> Result<ReducedDM> {
        reduce_pure(self, k)
    }

    fn full_entropy(&self) -> Result<f64> {
        Ok(0.0)
    }

    fn describe(&self) -> String {
        format!("pure M={} N={}", self.modes(), self.particles())
    }
}

impl Reducible for MixedStateN {
    fn basis(&self) -> &RankedBasis {
        MixedStateN::basis(self)
    }

    fn reduce(&self, k: usize) -> Result<ReducedDM> {
        reduce_mixed(self, k)
    }

    /// Via the Gram matrix sqrt(w_i w_j) <psi_i|psi_j>, which shares the
    /// nonzero spectrum of sum_i w_i |psi_i><psi_i|.
    fn full_entropy(&self) -> Result<f64> {
        let t = self.terms();
        let gram = CMatrix::from_fn(t.len(), t.len(), |i, j| {
            t[i].1.inner(&t[j].1) * (t[i].0 * t[j].0).sqrt()
        });
        let mut s = eigvals_herm(&HermitianMatrix::symmetrized(gram));
        s.clamp_psd(&Tolerances::DEFAULT)?;
        Ok(crate::entmeasures::spectrum_entropy(&s.values))
    }

    fn describe(&self) -> String {
        format!(
            "mixture of {} M={} N={}",
            self.terms().len(),
            self.basis().modes(),
            self.basis().particles()
        )
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 1 || k > n {
        return Err(Error::InvalidParameter(format!(
            "reduction order k={k} outside 1..={n}"
        )));
    }
    Ok(())
}

/// Unit-trace k-RDM:
/// entry (I, J) = binomial(N,k)^-1 * sum_K sgn(I,K) sgn(J,K) psi[I u K] conj(psi[J u K]).
pub fn reduce_pure(state: &PureStateN, k: usize) -> Result<ReducedDM> {
    let (m, n) = (state.modes(), state.particles());
    check_k(n, k)?;
    let kb = RankedBasis::new(m, k)?;
    let mut groups: BTreeMap<u64, Vec<(usize, C64)>> = BTreeMap::new();
    for (s, amp) in state.support() {
        // every (N-k)-subset K of the occupied set, I = S \ K
        let occ: Vec<usize> = s.modes().collect();
        for pos in SubsetIter::new(n, n - k) {
            let kset = ModeSet::from_bits(pos.modes().fold(0u64, |acc, p| acc | 1 << occ[p]));
            let iset = s.difference(kset);
            let sign = merge_sign_unchecked(iset, kset) as f64;
            groups
                .entry(kset.bits())
                .or_default()
                .push((rank_unchecked(iset), amp * sign));
        }
    }
    let dim = kb.dim();
    let mut mat = CMatrix::zeros(dim, dim);
    for entries in groups.values() {
        for &(i, a) in entries {
            for &(j, b) in entries {
                mat[(i, j)] += a * b.conj();
            }
        }
    }
    let c = 1.0 / binomial(n, k) as f64;
    Ok(ReducedDM {
        k,
        particles: n,
        basis: kb,
        matrix: HermitianMatrix::symmetrized(mat).scale(c),
        normalization: Normalization::UnitTrace,
        source: format!("reduce_pure k={k} of M={m} N={n}"),
    })
}

pub fn reduce_mixed(state: &MixedStateN, k: usize) -> Result<ReducedDM> {
    let mut acc: Option<ReducedDM> = None;
    for (w, psi) in state.terms() {
        let r = reduce_pure(psi, k)?;
        match acc.as_mut() {
            None => {
                let mut r = r;
                r.matrix = r.matrix.scale(*w);
                acc = Some(r);
            }
            Some(a) => a.matrix.add_scaled(&r.matrix, *w),
        }
    }
    let mut r = acc.ok_or_else(|| Error::Shape("empty mixture".into()))?;
    r.source = format!(
        "reduce_mixed k={k} of {} terms",
        state.terms().len()
    );
    Ok(r)
}

/// Partial trace of a unit-trace k-RDM down to k' particles.
pub fn trace_down(r: &ReducedDM, k_to: usize) -> Result<ReducedDM> {
    if k_to < 1 || k_to > r.k {
        return Err(Error::InvalidParameter(format!(
            "cannot trace a {}-RDM down to {k_to}",
            r.k
        )));
    }
    let m = r.modes();
    let tb = RankedBasis::new(m, k_to)?;
    let dim = tb.dim();
    let mut mat = CMatrix::zeros(dim, dim);
    for kset in SubsetIter::new(m, r.k - k_to) {
        let rows: Vec<(usize, usize, f64)> = tb
            .iter()
            .enumerate()
            .filter(|(_, i)| i.is_disjoint(kset))
            .map(|(idx, i)| {
                (
                    idx,
                    rank_unchecked(i.union(kset)),
                    merge_sign_unchecked(i, kset) as f64,
                )
            })
            .collect();
        for &(a, ra, sa) in &rows {
            for &(b, rb, sb) in &rows {
                mat[(a, b)] += r.matrix[(ra, rb)] * (sa * sb);
            }
        }
    }
    let scale = 1.0 / binomial(r.k, k_to) as f64;
    Ok(ReducedDM {
        k: k_to,
        particles: r.particles,
        basis: tb,
        matrix: HermitianMatrix::symmetrized(mat).scale(scale),
        normalization: r.normalization,
        source: format!("trace_down {} -> {k_to}", r.k),
    })
}

/// Isometric embedding of a 2-RDM into H (x) H: {i<j} -> (|ij> - |ji>)/sqrt(2).
pub fn embed_wedge_to_tensor(r: &ReducedDM) -> Result<TensorDM> {
    if r.k != 2 {
        return Err(Error::InvalidParameter(format!(
            "tensor embedding needs a 2-RDM, got k={}",
            r.k
        )));
    }
    let m = r.modes();
    let pairs: Vec<(usize, usize)> = r
        .basis
        .iter()
        .map(|s| {
            let mut it = s.modes();
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    let mut mat = CMatrix::zeros(m * m, m * m);
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for (b, &(k, l)) in pairs.iter().enumerate() {
            let v = r.matrix[(a, b)] * 0.5;
            if v == ZERO {
                continue;
            }
            mat[(i * m + j, k * m + l)] += v;
            mat[(i * m + j, l * m + k)] -= v;
            mat[(j * m + i, k * m + l)] -= v;
            mat[(j * m + i, l * m + k)] += v;
        }
    }
    TensorDM::new(vec![m, m], HermitianMatrix::symmetrized(mat))
}

/// P A P with P = (1 - SWAP)/2 on a two-party tensor product.
pub fn pfer_project(t: &TensorDM) -> Result<TensorDM> {
    if t.parties() != 2 || t.dims[0] != t.dims[1] {
        return Err(Error::Shape(format!(
            "antisymmetrizer needs two identical factors, got {:?}",
            t.dims
        )));
    }
    let d = t.dims[0];
    let a = &t.matrix;
    let sw = |i: usize| (i % d) * d + i / d;
    let mat = CMatrix::from_fn(d * d, d * d, |r, c| {
        (a[(r, c)] - a[(sw(r), c)] - a[(r, sw(c))] + a[(sw(r), sw(c))]) * 0.25
    });
    TensorDM::new(t.dims.clone(), HermitianMatrix::symmetrized(mat))
}

/// Expands a wedge-basis state into the full M^N tensor product:
/// psi(x_1..x_N) = sgn(pi) psi_S / sqrt(N!).
pub fn expand_to_tensor(state: &PureStateN, limit: usize) -> Result<TensorState> {
    let (m, n) = (state.modes(), state.particles());
    let total = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > limit as u128 {
        return Err(Error::Capacity {
            what: "tensor expansion M^N",
            requested: total,
            limit: limit as u128,
        });
    }
    let total = total as usize;
    let norm = 1.0 / factorial(n).sqrt();
    let mut amps = vec![ZERO; total];
    for (s, a) in state.support() {
        let modes: Vec<usize> = s.modes().collect();
        for_each_permutation(&modes, |perm, sign| {
            let idx = perm.iter().fold(0usize, |acc, &x| acc * m + x);
            amps[idx] = a * (sign * norm);
        });
    }
    TensorState::new(vec![m; n], amps)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|x| x as f64).product()
}

/// Visits every permutation of `items` with its sign (Heap's algorithm).
fn for_each_permutation(items: &[usize], mut f: impl FnMut(&[usize], f64)) {
    let mut a = items.to_vec();
    let n = a.len();
    let mut c = vec![0usize; n];
    let mut sign = 1.0;
    f(&a, sign);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            sign = -sign;
            f(&a, sign);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Independent oracle: dense tensor expansion, partial trace over the last
/// N-k factors, then compression onto normalized antisymmetrized k-vectors.
pub fn brute_force_reduce(state: &PureStateN, k: usize) -> Result<ReducedDM> {
    brute_force_reduce_with_limits(state, k, &Limits::DEFAULT)
}

pub fn brute_force_reduce_with_limits(state: &PureStateN, k: usize, limits: &Limits) -> Result<ReducedDM> {
    let (m, n) = (state.modes(), state.particles());
    check_k(n, k)?;
    let psi = expand_to_tensor(state, limits.max_bruteforce)?;
    let tdim = m.pow((n - k) as u32);
    // rows of the M^k x M^(N-k) reshape, antisymmetrized over each k-subset
    let kb = RankedBasis::new(m, k)?;
    let kfact = factorial(k);
    let rows: Vec<Vec<C64>> = kb
        .iter()
        .map(|s| {
            let modes: Vec<usize> = s.modes().collect();
            let mut acc = vec![ZERO; tdim];
            for_each_permutation(&modes, |perm, sign| {
                let x = perm.iter().fold(0usize, |acc, &x| acc * m + x);
                for (a, z) in acc.iter_mut().zip(&psi.amplitudes[x * tdim..(x + 1) * tdim]) {
                    *a += z * sign;
                }
            });
            acc
        })
        .collect();
    let dim = kb.dim();
    let mut mat = CMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            let v: C64 = rows[a].iter().zip(&rows[b]).map(|(x, y)| x * y.conj()).sum();
            mat[(a, b)] = v / kfact;
        }
    }
    Ok(ReducedDM {
        k,
        particles: n,
        basis: kb,
        matrix: HermitianMatrix::symmetrized(mat),
        normalization: Normalization::UnitTrace,
        source: format!("brute_force_reduce k={k} of M={m} N={n}"),
    })
}

/// Multiplies by target/current trace and updates the tag.
pub fn rescale(r: &ReducedDM, target: Normalization) -> ReducedDM {
    let from = r.normalization.target_trace(r.particles, r.k);
    let to = target.target_trace(r.particles, r.k);
    let mut out = r.clone();
    out.matrix = r.matrix.scale(to / from);
    out.normalization = target;
    out
}

/// Writes `fermirdm M k normtag`, `# particles N`, further comments, then one
/// line per matrix row of `re im` pairs with 17 significant digits.
pub fn write_rdm<W: Write>(w: &mut W, r: &ReducedDM, comments: &[String]) -> Result<()> {
    writeln!(w, "fermirdm {} {} {}", r.modes(), r.k, r.normalization.tag())?;
    writeln!(w, "# particles {}", r.particles)?;
    writeln!(w, "# source {}", r.source)?;
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    let dim = r.matrix.dim();
    for i in 0..dim {
        let row: Vec<String> = (0..dim)
            .map(|j| {
                let z = r.matrix[(i, j)];
                format!("{:.16e} {:.16e}", z.re, z.im)
            })
            .collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn read_rdm<R: BufRead>(r: R) -> Result<ReducedDM> {
    let mut header: Option<(usize, usize, Normalization)> = None;
    let mut particles: Option<usize> = None;
    let mut source = String::from("loaded");
    let mut data: Vec<C64> = Vec::new();
    for (ln, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(c) = t.strip_prefix('#') {
            let c = c.trim();
            if let Some(p) = c.strip_prefix("particles ") {
                particles = Some(parse_num(p.trim(), ln)?);
            } else if let Some(s) = c.strip_prefix("source ") {
                source = s.to_string();
            }
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        if header.is_none() {
            if f.len() != 4 || f[0] != "fermirdm" {
                return Err(Error::Parse {
                    line: ln + 1,
                    msg: format!("expected `fermirdm M k normtag`, got `{t}`"),
                });
            }
            let norm = Normalization::from_tag(f[3]).ok_or_else(|| Error::Parse {
                line: ln + 1,
                msg: format!("unknown normalization tag `{}`", f[3]),
            })?;
            header = Some((parse_num(f[1], ln)?, parse_num(f[2], ln)?, norm));
            continue;
        }
        if f.len() % 2 != 0 {
            return Err(Error::Parse {
                line: ln + 1,
                msg: "odd number of real components".into(),
            });
        }
        for pair in f.chunks(2) {
            data.push(C64::new(parse_num(pair[0], ln)?, parse_num(pair[1], ln)?));
        }
    }
    let (m, k, norm) = header.ok_or(Error::Parse {
        line: 0,
        msg: "missing fermirdm header".into(),
    })?;
    let particles = particles.ok_or(Error::Parse {
        line: 0,
        msg: "missing `# particles N` line".into(),
    })?;
    if k > particles || particles > m {
        return Err(Error::InvalidParameter(format!(
            "inconsistent M={m} N={particles} k={k}"
        )));
    }
    let basis = RankedBasis::new(m, k)?;
    let dim = basis.dim();
    let matrix = HermitianMatrix::new(CMatrix::from_vec(dim, dim, data)?)?;
    let target = norm.target_trace(particles, k);
    if (matrix.trace() - target).abs() > 1e-8 * target {
        return Err(Error::Normalization(format!(
            "trace {} does not match {norm} normalization {target}",
            matrix.trace()
        )));
    }
    Ok(ReducedDM {
        k,
        particles,
        basis,
        matrix,
        normalization: norm,
        source,
    })
}
