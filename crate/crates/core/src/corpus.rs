//! Built-in test corpus: Slater determinants, pairing states, seeded random
//! states and mixtures of determinants.

use serde::Serialize;

use crate::config::Limits;
use crate::error::Result;
use crate::fockbasis::{ModeSet, RankedBasis};
use crate::hermlin::C64;
use crate::rdmcore::{ReducedDM, Reducible};
use crate::statekit::{
    check_state_dim, complex_normal, convex_mixture, random_pure_state, seeded_rng, slater_from_orbitals,
    slater_state, yang_state, MixedStateN, PureStateN, YangParams,
};

/// Shapes (M, N) used for random states.
pub const RANDOM_SHAPES: [(usize, usize); 6] = [(4, 2), (5, 2), (5, 3), (6, 2), (6, 3), (6, 4)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Slater,
    Yang,
    Random,
    SlaterMixture,
    /// Loaded from a user-supplied state file.
    File,
}

#[derive(Clone, Debug)]
pub enum CorpusState {
    Pure(PureStateN),
    Mixed(MixedStateN),
}

impl CorpusState {
    pub fn as_reducible(&self) -> &dyn Reducible {
        match self {
            CorpusState::Pure(s) => s,
            CorpusState::Mixed(s) => s,
        }
    }

    pub fn as_pure(&self) -> Option<&PureStateN> {
        match self {
            CorpusState::Pure(s) => Some(s),
            CorpusState::Mixed(_) => None,
        }
    }

    pub fn reduce(&self, k: usize) -> Result<ReducedDM> {
        self.as_reducible().reduce(k)
    }

    pub fn modes(&self) -> usize {
        self.as_reducible().basis().modes()
    }

    pub fn particles(&self) -> usize {
        self.as_reducible().basis().particles()
    }
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub label: String,
    pub family: Family,
    pub state: CorpusState,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusOptions {
    pub random: usize,
    pub seed: u64,
    /// Largest pair count of the pairing states (M = 2m modes).
    pub yang_max_m: usize,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            random: 200,
            seed: 1,
            yang_max_m: 3,
        }
    }
}

/// n orthonormal random orbitals on m modes (Gram-Schmidt of Gaussian vectors).
pub fn random_orbitals(m: usize, n: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = seeded_rng(seed);
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(n);
    while out.len() < n {
        let mut v: Vec<C64> = (0..m).map(|_| complex_normal(&mut rng)).collect();
        for u in &out {
            let dot: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            out.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    out
}

fn slater_entry(label: String, m: usize, modes: &[usize]) -> Result<CorpusEntry> {
    let basis = RankedBasis::new(m, modes.len())?;
    Ok(CorpusEntry {
        label,
        family: Family::Slater,
        state: CorpusState::Pure(slater_state(&basis, ModeSet::from_modes(modes)?)?),
    })
}

pub fn build_corpus(opts: &CorpusOptions) -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for &(m, n) in &RANDOM_SHAPES {
        let first: Vec<usize> = (0..n).collect();
        out.push(slater_entry(format!("slater M={m} N={n} occ={first:?}"), m, &first)?);
        let spread: Vec<usize> = (0..n).map(|i| (2 * i + 1) % m).collect();
        let mut sorted = spread.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() == n && sorted != first {
            out.push(slater_entry(format!("slater M={m} N={n} occ={sorted:?}"), m, &sorted)?);
        }
        let basis = RankedBasis::new(m, n)?;
        let orbitals = random_orbitals(m, n, opts.seed ^ (m * 16 + n) as u64);
        out.push(CorpusEntry {
            label: format!("rotated slater M={m} N={n}"),
            family: Family::Slater,
            state: CorpusState::Pure(slater_from_orbitals(&basis, &orbitals)?),
        });
    }
    for m in 1..=opts.yang_max_m {
        for n in 1..=m {
            out.push(CorpusEntry {
                label: format!("yang m={m} n={n}"),
                family: Family::Yang,
                state: CorpusState::Pure(yang_state(YangParams::new(m, n)?)?),
            });
        }
    }
    for i in 0..opts.random {
        let (m, n) = RANDOM_SHAPES[i % RANDOM_SHAPES.len()];
        let seed = opts.seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
        out.push(CorpusEntry {
            label: format!("random M={m} N={n} seed={seed}"),
            family: Family::Random,
            state: CorpusState::Pure(random_pure_state(&RankedBasis::new(m, n)?, seed)?),
        });
    }
    out.extend(slater_mixtures(opts.seed)?);
    Ok(out)
}

/// Corpus restricted to one shape: Slater determinants, the pairing state
/// when M and N are both even, and `random` seeded random states.
pub fn build_shape_corpus(m: usize, n: usize, random: usize, seed: u64) -> Result<Vec<CorpusEntry>> {
    let basis = RankedBasis::new(m, n)?;
    check_state_dim(&basis, &Limits::DEFAULT)?;
    let mut out = Vec::new();
    let first: Vec<usize> = (0..n).collect();
    out.push(slater_entry(format!("slater M={m} N={n} occ={first:?}"), m, &first)?);
    let last: Vec<usize> = (m - n..m).collect();
    if last != first {
        out.push(slater_entry(format!("slater M={m} N={n} occ={last:?}"), m, &last)?);
    }
    out.push(CorpusEntry {
        label: format!("rotated slater M={m} N={n}"),
        family: Family::Slater,
        state: CorpusState::Pure(slater_from_orbitals(
            &basis,
            &random_orbitals(m, n, seed ^ (m * 16 + n) as u64),
        )?),
    });
    if m % 2 == 0 && n % 2 == 0 && n > 0 {
        let p = YangParams::new(m / 2, n / 2)?;
        out.push(CorpusEntry {
            label: format!("yang m={} n={}", p.m(), p.n()),
            family: Family::Yang,
            state: CorpusState::Pure(yang_state(p)?),
        });
    }
    for i in 0..random {
        let seed = seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
        out.push(CorpusEntry {
            label: format!("random M={m} N={n} seed={seed}"),
            family: Family::Random,
            state: CorpusState::Pure(random_pure_state(&basis, seed)?),
        });
    }
    Ok(out)
}

/// Mixtures of orthogonal determinants, including rotated-orbital ones.
pub fn slater_mixtures(seed: u64) -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    let b62 = RankedBasis::new(6, 2)?;
    let pairs = [[0, 1], [2, 3], [4, 5]];
    let states: Vec<PureStateN> = pairs
        .iter()
        .map(|p| slater_state(&b62, ModeSet::from_modes(p).unwrap()))
        .collect::<Result<_>>()?;
    out.push(CorpusEntry {
        label: "mixture of 3 pair slaters M=6".into(),
        family: Family::SlaterMixture,
        state: CorpusState::Mixed(convex_mixture(&[0.5, 0.3, 0.2], states)?),
    });

    let b63 = RankedBasis::new(6, 3)?;
    let a = slater_state(&b63, ModeSet::from_modes(&[0, 1, 2])?)?;
    let b = slater_state(&b63, ModeSet::from_modes(&[3, 4, 5])?)?;
    out.push(CorpusEntry {
        label: "mixture of 2 slaters M=6 N=3".into(),
        family: Family::SlaterMixture,
        state: CorpusState::Mixed(convex_mixture(&[0.5, 0.5], vec![a, b])?),
    });

    // determinants of a rotated orbital set, so the mixture is not diagonal
    let orb = random_orbitals(6, 6, seed.wrapping_add(77));
    let rotated: Vec<PureStateN> = [[0, 1, 2], [3, 4, 5], [0, 2, 4]]
        .iter()
        .map(|idx| {
            let chosen: Vec<Vec<C64>> = idx.iter().map(|&i| orb[i].clone()).collect();
            slater_from_orbitals(&b63, &chosen)
        })
        .collect::<Result<_>>()?;
    out.push(CorpusEntry {
        label: "mixture of 3 rotated slaters M=6 N=3".into(),
        family: Family::SlaterMixture,
        state: CorpusState::Mixed(convex_mixture(&[0.4, 0.35, 0.25], rotated)?),
    });
    Ok(out)
}

/// Two-particle mixtures of orthogonal pair determinants on M modes.
pub fn pair_slater_mixture(m: usize, pairs: &[[usize; 2]], weights: &[f64]) -> Result<MixedStateN> {
    let basis = RankedBasis::new(m, 2)?;
    let states = pairs
        .iter()
        .map(|p| slater_state(&basis, ModeSet::from_modes(p)?))
        .collect::<Result<Vec<_>>>()?;
    convex_mixture(weights, states)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_corpus_shape() {
        let c = build_corpus(&CorpusOptions::default()).unwrap();
        let random = c.iter().filter(|e| e.family == Family::Random).count();
        assert_eq!(random, 200);
        assert!(c.len() > 200);
        assert!(c
            .iter()
            .filter(|e| e.family == Family::Random)
            .all(|e| e.state.modes() <= 6 && e.state.particles() <= 4));
        let again = build_corpus(&CorpusOptions::default()).unwrap();
        let amps = |e: &CorpusEntry| e.state.as_pure().map(|p| p.amplitudes().to_vec());
        assert!(c.iter().zip(&again).all(|(a, b)| amps(a) == amps(b)));
    }

    #[test]
    fn shape_corpus_contents() {
        let c = build_shape_corpus(6, 4, 3, 1).unwrap();
        assert_eq!(c.iter().filter(|e| e.family == Family::Yang).count(), 1);
        assert_eq!(c.iter().filter(|e| e.family == Family::Random).count(), 3);
        assert!(c.iter().all(|e| e.state.modes() == 6 && e.state.particles() == 4));
        let odd = build_shape_corpus(5, 3, 0, 1).unwrap();
        assert!(odd.iter().all(|e| e.family == Family::Slater));
        assert!(build_shape_corpus(3, 4, 0, 1).is_err());
    }

    #[test]
    fn orbitals_are_orthonormal() {
        let o = random_orbitals(5, 3, 9);
        for i in 0..3 {
            for j in 0..3 {
                let ip: C64 = o[i].iter().zip(&o[j]).map(|(a, b)| a.conj() * b).sum();
                let t = if i == j { 1.0 } else { 0.0 };
                assert!((ip - t).norm() < 1e-12);
            }
        }
    }
}
