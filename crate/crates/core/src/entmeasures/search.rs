//! Gradient-free search for pure states with small two-particle entropy.

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::fockbasis::{binomial, ModeSet, RankedBasis};
use crate::hermlin::C64;
use crate::rdmcore::reduce_pure;
use crate::statekit::{complex_normal, random_pure_state, seeded_rng, slater_state, PureStateN};

use super::Entropy;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOptions {
    pub restarts: usize,
    /// Perturbation attempts per restart.
    pub steps: usize,
    /// Initial perturbation scale; halved after a run of rejections.
    pub step_size: f64,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            restarts: 50,
            steps: 300,
            step_size: 0.3,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub best_entropy: f64,
    pub best_state: PureStateN,
    /// ln binomial(N, 2), the 2-RDM entropy of any Slater determinant.
    pub slater_reference: f64,
    /// Slater 2-RDM entropy computed numerically from a determinant.
    pub slater_numeric: f64,
    /// best_entropy - slater_reference.
    pub gap: f64,
    pub restart_values: Vec<f64>,
    pub evaluations: usize,
}

fn s2(state: &PureStateN) -> Result<f64> {
    reduce_pure(state, 2)?.entropy()
}

/// Random restarts followed by single-amplitude perturbations, accepted when
/// the 2-RDM entropy decreases.
pub fn min_s2_search(m: usize, n: usize, opts: &SearchOptions) -> Result<SearchResult> {
    let basis = RankedBasis::new(m, n)?;
    let slater = slater_state(&basis, ModeSet::first(n))?;
    let slater_reference = (binomial(n, 2) as f64).ln();
    let slater_numeric = if n >= 2 { s2(&slater)? } else { 0.0 };
    let mut evaluations = 0;
    let mut best: Option<(f64, PureStateN)> = None;
    let mut restart_values = Vec::with_capacity(opts.restarts);
    let dim = basis.dim();
    for r in 0..opts.restarts {
        let mut rng = seeded_rng(opts.seed);
        rng.set_stream(r as u64);
        let mut state = random_pure_state(&basis, rng.random())?;
        let mut value = s2(&state)?;
        evaluations += 1;
        let mut step = opts.step_size;
        let mut misses = 0;
        for _ in 0..opts.steps {
            let idx = rng.random_range(0..dim);
            let mut amps: Vec<C64> = state.amplitudes().to_vec();
            amps[idx] += complex_normal(&mut rng) * step;
            let trial = PureStateN::normalized(basis, amps)?;
            let v = s2(&trial)?;
            evaluations += 1;
            if v < value {
                state = trial;
                value = v;
                misses = 0;
            } else {
                misses += 1;
                if misses >= 2 * dim {
                    step *= 0.5;
                    misses = 0;
                }
            }
        }
        restart_values.push(value);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, state));
        }
    }
    let (best_entropy, best_state) = match best {
        Some(b) => b,
        None => (slater_numeric, slater),
    };
    let gap = best_entropy - slater_reference;
    log::info!(
        "min S2 search M={m} N={n}: best {best_entropy:.10} vs ln C(N,2) = {slater_reference:.10} (gap {gap:.3e})"
    );
    Ok(SearchResult {
        best_entropy,
        best_state,
        slater_reference,
        slater_numeric,
        gap,
        restart_values,
        evaluations,
    })
}
