//! Constructors for N-fermion states on the ranked antisymmetric basis:
//! Slater determinants, Yang pairing states, the pair vector, seeded random
//! states and convex mixtures, plus the `fermistate` text format.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::fockbasis::{binomial, ModeSet, RankedBasis, SubsetIter};
use crate::hermlin::{C64, ZERO};

/// Pure N-particle state: amplitudes indexed by basis rank.
#[derive(Clone, Debug, PartialEq)]
pub struct PureStateN {
    basis: RankedBasis,
    amplitudes: Vec<C64>,
}

const NORM_TOL: f64 = 1e-12;

impl PureStateN {
    /// Wraps amplitudes that are already unit-normalized (within 1e-12).
    pub fn new(basis: RankedBasis, amplitudes: Vec<C64>) -> Result<Self> {
        check_len(&basis, &amplitudes)?;
        let norm = l2(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Normalization(format!(
                "state norm {norm} differs from 1"
            )));
        }
        Ok(PureStateN { basis, amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(basis: RankedBasis, mut amplitudes: Vec<C64>) -> Result<Self> {
        check_len(&basis, &amplitudes)?;
        let norm = l2(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Normalization("cannot normalize a zero vector".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(PureStateN { basis, amplitudes })
    }

    #[inline]
    pub fn basis(&self) -> &RankedBasis {
        &self.basis
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn modes(&self) -> usize {
        self.basis.modes()
    }

    pub fn particles(&self) -> usize {
        self.basis.particles()
    }

    /// Nonzero amplitudes as (mode set, amplitude), in rank order.
    pub fn support(&self) -> impl Iterator<Item = (ModeSet, C64)> + '_ {
        self.basis
            .iter()
            .zip(self.amplitudes.iter())
            .filter(|(_, a)| **a != ZERO)
            .map(|(s, a)| (s, *a))
    }

    pub fn support_size(&self) -> usize {
        self.amplitudes.iter().filter(|a| **a != ZERO).count()
    }

    /// <self|other>
    pub fn inner(&self, other: &PureStateN) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

fn check_len(basis: &RankedBasis, amplitudes: &[C64]) -> Result<()> {
    if amplitudes.len() != basis.dim() {
        return Err(Error::Shape(format!(
            "{} amplitudes for a basis of dimension {}",
            amplitudes.len(),
            basis.dim()
        )));
    }
    Ok(())
}

fn l2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn check_state_dim(basis: &RankedBasis, limits: &Limits) -> Result<()> {
    if basis.dim() > limits.max_state_dim {
        return Err(Error::Capacity {
            what: "state dimension",
            requested: basis.dim() as u128,
            limit: limits.max_state_dim as u128,
        });
    }
    Ok(())
}

/// Convex combination of pure states with strictly positive weights.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedStateN {
    basis: RankedBasis,
    terms: Vec<(f64, PureStateN)>,
}

impl MixedStateN {
    pub fn pure(state: PureStateN) -> Self {
        MixedStateN {
            basis: *state.basis(),
            terms: vec![(1.0, state)],
        }
    }

    #[inline]
    pub fn basis(&self) -> &RankedBasis {
        &self.basis
    }

    #[inline]
    pub fn terms(&self) -> &[(f64, PureStateN)] {
        &self.terms
    }
}

/// Pairing-state parameters: m mode pairs, n occupied pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct YangParams {
    m: usize,
    n: usize,
}

impl YangParams {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if n < 1 || n > m || m > 32 {
            return Err(Error::InvalidParameter(format!(
                "pairing state needs 1 <= n <= m <= 32, got m={m}, n={n}"
            )));
        }
        Ok(YangParams { m, n })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modes(&self) -> usize {
        2 * self.m
    }

    pub fn particles(&self) -> usize {
        2 * self.n
    }
}

/// Modes of pair `j` (0-based): (2j, 2j+1).
fn pair_modes(pairs: ModeSet) -> ModeSet {
    ModeSet::from_bits(pairs.modes().fold(0u64, |acc, j| acc | (0b11 << (2 * j))))
}

pub fn slater_state(basis: &RankedBasis, occupied: ModeSet) -> Result<PureStateN> {
    let idx = basis.rank(occupied)?;
    let mut amps = vec![ZERO; basis.dim()];
    amps[idx] = C64::new(1.0, 0.0);
    Ok(PureStateN {
        basis: *basis,
        amplitudes: amps,
    })
}

/// Slater determinant of N orthonormal orbitals given as length-M coefficient
/// vectors. The amplitude on basis element S is det[orbital_a(s_b)].
pub fn slater_from_orbitals(basis: &RankedBasis, orbitals: &[Vec<C64>]) -> Result<PureStateN> {
    let (m, n) = (basis.modes(), basis.particles());
    if orbitals.len() != n || orbitals.iter().any(|o| o.len() != m) {
        return Err(Error::Shape(format!(
            "need {n} orbitals of length {m}"
        )));
    }
    for a in 0..n {
        for b in a..n {
            let ip: C64 = orbitals[a]
                .iter()
                .zip(&orbitals[b])
                .map(|(x, y)| x.conj() * y)
                .sum();
            let target = if a == b { 1.0 } else { 0.0 };
            if (ip - target).norm() > 1e-10 {
                return Err(Error::InvalidParameter(format!(
                    "orbitals {a} and {b} are not orthonormal (overlap {ip})"
                )));
            }
        }
    }
    let amps: Vec<C64> = basis
        .iter()
        .map(|s| {
            let cols: Vec<usize> = s.modes().collect();
            let mut mat: Vec<C64> = Vec::with_capacity(n * n);
            for orb in orbitals {
                for &c in &cols {
                    mat.push(orb[c]);
                }
            }
            det_complex(n, &mut mat)
        })
        .collect();
    PureStateN::normalized(*basis, amps)
}

/// Determinant by Gaussian elimination with partial pivoting (destroys `a`).
pub(crate) fn det_complex(n: usize, a: &mut [C64]) -> C64 {
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
            .unwrap();
        if a[pivot * n + col] == ZERO {
            return ZERO;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f == ZERO {
                continue;
            }
            for k in col..n {
                let v = a[col * n + k];
                a[r * n + k] -= f * v;
            }
        }
    }
    det
}

pub fn yang_state(p: YangParams) -> Result<PureStateN> {
    yang_state_with_limits(p, &Limits::DEFAULT)
}

/// Equal-amplitude superposition of the binomial(m, n) determinants that fill
/// n whole pairs; pair j occupies modes (2j, 2j+1).
pub fn yang_state_with_limits(p: YangParams, limits: &Limits) -> Result<PureStateN> {
    let basis = RankedBasis::new(p.modes(), p.particles())?;
    check_state_dim(&basis, limits)?;
    let amp = C64::new((binomial(p.m, p.n) as f64).powf(-0.5), 0.0);
    let mut amps = vec![ZERO; basis.dim()];
    for pairs in SubsetIter::new(p.m, p.n) {
        amps[basis.rank(pair_modes(pairs))?] = amp;
    }
    Ok(PureStateN {
        basis,
        amplitudes: amps,
    })
}

/// Unit two-particle vector with amplitude 1/sqrt(m) on every pair {2j, 2j+1}.
pub fn chi_pair_vector(m: usize) -> Result<PureStateN> {
    if m < 1 || m > 32 {
        return Err(Error::InvalidParameter(format!(
            "pair vector needs 1 <= m <= 32, got {m}"
        )));
    }
    let basis = RankedBasis::new(2 * m, 2)?;
    let amp = C64::new(1.0 / (m as f64).sqrt(), 0.0);
    let mut amps = vec![ZERO; basis.dim()];
    for j in 0..m {
        amps[basis.rank(ModeSet::from_bits(0b11 << (2 * j)))?] = amp;
    }
    Ok(PureStateN {
        basis,
        amplitudes: amps,
    })
}

/// Deterministic per-seed generator used for every random input in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn complex_normal(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state: i.i.d. complex normal amplitudes, normalized.
pub fn random_pure_state(basis: &RankedBasis, seed: u64) -> Result<PureStateN> {
    check_state_dim(basis, &Limits::DEFAULT)?;
    let mut rng = seeded_rng(seed);
    let amps = (0..basis.dim()).map(|_| complex_normal(&mut rng)).collect();
    PureStateN::normalized(*basis, amps)
}

/// Weights must be positive; a total within 1e-9 of one is renormalized.
pub fn convex_mixture(weights: &[f64], states: Vec<PureStateN>) -> Result<MixedStateN> {
    if weights.len() != states.len() || states.is_empty() {
        return Err(Error::Shape(format!(
            "{} weights for {} states",
            weights.len(),
            states.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "mixture weight {w} is not strictly positive"
        )));
    }
    let basis = *states[0].basis();
    if states.iter().any(|s| *s.basis() != basis) {
        return Err(Error::Shape("mixture members live on different bases".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Normalization(format!(
            "mixture weights sum to {total}"
        )));
    }
    Ok(MixedStateN {
        basis,
        terms: weights.iter().map(|w| w / total).zip(states).collect(),
    })
}

/// Writes `fermistate M N`, optional `#` comment lines, then `index re im`
/// for every nonzero amplitude with 17 significant digits.
pub fn write_state<W: Write>(w: &mut W, state: &PureStateN, comments: &[String]) -> Result<()> {
    writeln!(w, "fermistate {} {}", state.modes(), state.particles())?;
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    for (i, a) in state.amplitudes.iter().enumerate() {
        if *a != ZERO {
            writeln!(w, "{i} {:.16e} {:.16e}", a.re, a.im)?;
        }
    }
    Ok(())
}

pub fn read_state<R: BufRead>(r: R) -> Result<PureStateN> {
    let mut lines = r.lines().enumerate();
    let (basis, mut amps) = loop {
        let Some((ln, line)) = lines.next() else {
            return Err(Error::Parse {
                line: 0,
                msg: "missing fermistate header".into(),
            });
        };
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        if f.len() != 3 || f[0] != "fermistate" {
            return Err(Error::Parse {
                line: ln + 1,
                msg: format!("expected `fermistate M N`, got `{t}`"),
            });
        }
        let m = parse_num::<usize>(f[1], ln)?;
        let n = parse_num::<usize>(f[2], ln)?;
        let basis = RankedBasis::new(m, n)?;
        check_state_dim(&basis, &Limits::DEFAULT)?;
        break (basis, vec![ZERO; basis.dim()]);
    };
    for (ln, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::Parse {
                line: ln + 1,
                msg: format!("expected `index re im`, got `{t}`"),
            });
        }
        let idx = parse_num::<usize>(f[0], ln)?;
        if idx >= basis.dim() {
            return Err(Error::OutOfRange {
                index: idx,
                dim: basis.dim(),
            });
        }
        amps[idx] = C64::new(parse_num(f[1], ln)?, parse_num(f[2], ln)?);
    }
    let norm = l2(&amps);
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Normalization(format!(
            "stored state has norm {norm}"
        )));
    }
    if (norm - 1.0).abs() > NORM_TOL {
        return PureStateN::normalized(basis, amps);
    }
    Ok(PureStateN {
        basis,
        amplitudes: amps,
    })
}

pub(crate) fn parse_num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Parse {
        line: line + 1,
        msg: format!("cannot parse `{s}`"),
    })
}
