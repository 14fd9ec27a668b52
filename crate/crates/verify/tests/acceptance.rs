//! Acceptance suite: one PASS/FAIL line per criterion, with the measured
//! quantities underneath. Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fermient::corpus::{build_corpus, pair_slater_mixture, CorpusEntry, CorpusOptions, CorpusState};
use fermient::entmeasures::{
    ef_optimize, elem_sym, elem_sym_determinant, elem_sym_direct, extension_from_tripartite,
    min_s2_search, mutual_info_bounds, nbody_elem_bound, power_sums, purity, slater_extension,
    slater_extension_tensor, slater_squashed_bound, squashed_extension_value, subadd_remainder,
    yang_analytics, EfOptions, Entropy, SearchOptions,
};
use fermient::fockbasis::{ModeSet, RankedBasis};
use fermient::hermlin::{kron, HermitianMatrix, C64};
use fermient::rdmcore::{
    brute_force_reduce_with_limits, embed_wedge_to_tensor, reduce_pure, TensorDM, TensorState,
};
use fermient::statekit::{seeded_rng, slater_state, yang_state, YangParams};
use fermient::{Limits, PureStateN};
use rand::Rng;

struct Outcome {
    ok: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            ok: true,
            notes: Vec::new(),
        }
    }

    fn check(&mut self, cond: bool, what: impl Into<String>) {
        let what = what.into();
        if !cond {
            self.ok = false;
            self.notes.push(format!("violated: {what}"));
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }
}

fn run(id: u32, title: &str, budget: Option<Duration>, f: impl FnOnce(&mut Outcome)) -> bool {
    let start = Instant::now();
    let mut out = Outcome::new();
    f(&mut out);
    let elapsed = start.elapsed();
    if let Some(b) = budget {
        out.check(elapsed <= b, format!("runtime {elapsed:.2?} exceeds {b:.0?}"));
    }
    let tag = if out.ok { "PASS" } else { "FAIL" };
    println!("{tag} criterion {id}: {title} ({:.2}s)", elapsed.as_secs_f64());
    for n in &out.notes {
        println!("     {n}");
    }
    out.ok
}

fn ln(x: f64) -> f64 {
    x.ln()
}

fn random_bipartite(d1: usize, d2: usize, env: usize, seed: u64) -> TensorDM {
    let mut rng = seeded_rng(seed);
    let v: Vec<C64> = (0..d1 * d2 * env)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let psi = TensorState::new(vec![d1 * d2, env], v.iter().map(|z| z / norm).collect()).unwrap();
    TensorDM::new(vec![d1, d2], psi.block_marginal(0, 1)).unwrap()
}

fn random_tripartite(dims: [usize; 3], env: usize, seed: u64) -> TensorDM {
    let total: usize = dims.iter().product();
    let mut rng = seeded_rng(seed);
    let v: Vec<C64> = (0..total * env)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let psi = TensorState::new(vec![total, env], v.iter().map(|z| z / norm).collect()).unwrap();
    TensorDM::new(dims.to_vec(), psi.block_marginal(0, 1)).unwrap()
}

fn c1(o: &mut Outcome) {
    let b = RankedBasis::new(6, 4).unwrap();
    let s = slater_state(&b, ModeSet::first(4)).unwrap();
    let r2 = reduce_pure(&s, 2).unwrap();
    let spec = r2.spectrum().unwrap();
    let dev = spec
        .values
        .iter()
        .take(6)
        .map(|v| (v - 1.0 / 6.0).abs())
        .chain(spec.values.iter().skip(6).map(|v| v.abs()))
        .fold(0.0, f64::max);
    o.check(dev <= 1e-12, format!("2-RDM spectrum deviation from flat 1/6: {dev:.2e}"));
    let s12 = r2.entropy().unwrap();
    let r1 = reduce_pure(&s, 1).unwrap();
    let s1 = r1.entropy().unwrap();
    let p = purity(&r1.matrix);
    o.check((s12 - ln(6.0)).abs() <= 1e-10, format!("S12 = {s12:.15} vs ln 6"));
    o.check((s1 - ln(4.0)).abs() <= 1e-10, format!("S1 = {s1:.15} vs ln 4"));
    o.check((p - 0.25).abs() <= 1e-12, format!("Tr rho1^2 = {p:.15}"));
    let (rep, _) = mutual_info_bounds(&s, 1e-9).unwrap();
    o.check(rep.slack.abs() <= 1e-9, format!("mutual-information slack {:.2e}", rep.slack));
    o.note(format!(
        "S12 = {s12:.12}, S1 = {s1:.12}, purity = {p:.12}, slack = {:.2e}",
        rep.slack
    ));
}

fn c2(o: &mut Outcome) {
    let mut worst_spec: f64 = 0.0;
    let mut worst_ent: f64 = 0.0;
    let mut worst_sum: f64 = 0.0;
    for m in 2..=5 {
        for n in 1..=m {
            let p = YangParams::new(m, n).unwrap();
            let a = yang_analytics(p).unwrap();
            let y = yang_state(p).unwrap();
            let r = reduce_pure(&y, 2).unwrap();
            let spec = r.spectrum().unwrap();
            let exact = a.eigenvalues();
            let d = spec
                .values
                .iter()
                .zip(&exact)
                .map(|(x, e)| (x - e).abs())
                .fold(0.0, f64::max);
            worst_spec = worst_spec.max(d);
            let sum: f64 = a.spectrum.iter().map(|&(v, k)| v * k as f64).sum();
            worst_sum = worst_sum.max((sum - 1.0).abs());
            let e = (r.entropy().unwrap() - a.entropy).abs();
            worst_ent = worst_ent.max(e);
            o.check(d <= 1e-10, format!("m={m} n={n}: spectrum deviation {d:.2e}"));
            o.check((sum - 1.0).abs() <= 1e-12, format!("m={m} n={n}: weighted sum {sum}"));
            o.check(e <= 1e-10, format!("m={m} n={n}: entropy deviation {e:.2e}"));
        }
    }
    o.note(format!(
        "14 (m,n) pairs; max spectrum dev {worst_spec:.2e}, max entropy dev {worst_ent:.2e}, max |sum-1| {worst_sum:.2e}"
    ));
}

fn c3(o: &mut Outcome, corpus: &[CorpusEntry]) {
    let mut min_slack = f64::INFINITY;
    for seed in 0..100u64 {
        let d1 = 2 + (seed as usize) % 3;
        let d2 = 2 + (seed as usize / 3) % 3;
        let env = 1 + (seed as usize / 9) % 4;
        let rho = random_bipartite(d1, d2, env, 1000 + seed);
        let a = rho.marginal(&[0]).unwrap();
        let b = rho.marginal(&[1]).unwrap();
        let r = subadd_remainder(&rho, &a, &b, 1e-9).unwrap();
        min_slack = min_slack.min(r.slack);
        o.check(r.holds, format!("random bipartite seed {seed}: slack {:.2e}", r.slack));
    }
    o.note(format!("100 random bipartite states: min slack {min_slack:.3e}"));
    let mut min_slack = f64::INFINITY;
    for e in corpus {
        let t = embed_wedge_to_tensor(&e.state.reduce(2).unwrap()).unwrap();
        let a = t.marginal(&[0]).unwrap();
        let b = t.marginal(&[1]).unwrap();
        let r = subadd_remainder(&t, &a, &b, 1e-9).unwrap();
        min_slack = min_slack.min(r.slack);
        o.check(r.holds, format!("{}: slack {:.2e}", e.label, r.slack));
    }
    o.note(format!(
        "{} embedded corpus 2-RDMs: min slack {min_slack:.3e}",
        corpus.len()
    ));
    let a = HermitianMatrix::diag(&[0.6, 0.3, 0.1]);
    let b = HermitianMatrix::diag(&[0.45, 0.55]);
    let rho = TensorDM::new(vec![3, 2], kron(&a, &b).unwrap()).unwrap();
    let r = subadd_remainder(&rho, &a, &b, 1e-9).unwrap();
    let gap = (r.lhs - r.rhs).abs();
    o.check(gap <= 1e-10, format!("product state |lhs - rhs| = {gap:.2e}"));
    o.note(format!("product state |lhs - rhs| = {gap:.2e}"));
}

fn c4(o: &mut Outcome, corpus: &[CorpusEntry]) {
    let mut rng = seeded_rng(4);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let dim = 1 + i % 12;
        let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= total);
        let n = 1 + rng.random_range(0..dim);
        let p = power_sums(&v, n);
        let a = elem_sym(n, &p[1..]).unwrap();
        let b = elem_sym_determinant(n, &p[1..]).unwrap();
        let c = elem_sym_direct(&v, n).unwrap();
        let d = (a - b).abs().max((a - c).abs()).max((b - c).abs());
        worst = worst.max(d);
        o.check(d <= 1e-12, format!("spectrum {i}: routes disagree by {d:.2e}"));
    }
    o.note(format!("50 spectra: max pairwise disagreement {worst:.2e}"));
    let mut worst_e3: f64 = 0.0;
    for _ in 0..50 {
        let p2: f64 = rng.random_range(0.0..1.0);
        let p3: f64 = rng.random_range(0.0..1.0);
        let e3 = elem_sym(3, &[p2, p3]).unwrap();
        worst_e3 = worst_e3.max((e3 - (1.0 - 3.0 * p2 + 2.0 * p3) / 6.0).abs());
    }
    o.check(worst_e3 <= 1e-14, format!("e3 deviation {worst_e3:.2e}"));
    o.note(format!("e3 = (1 - 3 p2 + 2 p3)/6: max deviation {worst_e3:.2e}"));
    let mut min_slack = f64::INFINITY;
    let mut vacuous = 0;
    for e in corpus {
        let r = nbody_elem_bound(e.state.as_reducible(), 1e-9).unwrap();
        if r.vacuous {
            vacuous += 1;
            continue;
        }
        min_slack = min_slack.min(r.slack);
        o.check(r.holds, format!("{}: slack {:.2e}", e.label, r.slack));
    }
    o.note(format!(
        "N S1 - S_1..N >= -ln e_N on {} corpus states: min slack {min_slack:.3e}, {vacuous} vacuous",
        corpus.len()
    ));
}

fn c5(o: &mut Outcome, corpus: &[CorpusEntry]) {
    let ln2 = ln(2.0);
    let opts = EfOptions {
        restarts: 20,
        seed: 5,
        ..EfOptions::default()
    };
    let b = RankedBasis::new(4, 2).unwrap();
    let slater = slater_state(&b, ModeSet::from_modes(&[0, 1]).unwrap()).unwrap();
    let rho = embed_wedge_to_tensor(&reduce_pure(&slater, 2).unwrap()).unwrap();
    let r = ef_optimize(&rho, &opts).unwrap();
    o.check((r.value - ln2).abs() <= 1e-4, format!("Slater projection: E_f {:.10}", r.value));
    o.note(format!("2-particle Slater projection: E_f <= {:.12}", r.value));

    let mixtures: [(usize, Vec<[usize; 2]>, Vec<f64>); 4] = [
        (4, vec![[0, 1], [2, 3]], vec![0.5, 0.5]),
        (4, vec![[0, 2], [1, 3]], vec![0.3, 0.7]),
        (6, vec![[0, 1], [2, 3], [4, 5]], vec![0.5, 0.3, 0.2]),
        (6, vec![[0, 3], [1, 4], [2, 5]], vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]),
    ];
    for (m, pairs, w) in mixtures {
        let mix = pair_slater_mixture(m, &pairs, &w).unwrap();
        let rho = embed_wedge_to_tensor(&mix.reduce_2()).unwrap();
        let r = ef_optimize(&rho, &opts).unwrap();
        let err = r.decomposition.reconstruction_error(&rho);
        o.check(
            (r.value - ln2).abs() <= 1e-4,
            format!("mixture M={m} {pairs:?}: E_f {:.10}", r.value),
        );
        o.check(err <= 1e-8, format!("mixture M={m}: reconstruction error {err:.2e}"));
        o.note(format!(
            "mixture of {} pair Slaters, M={m}: E_f <= {:.12} (20 restarts)",
            pairs.len(),
            r.value
        ));
    }

    // every corpus input: one sweep from the eigen-ensemble with L = rank
    let quick = EfOptions {
        restarts: 1,
        max_ensemble: 0,
        max_iters: 1,
        ..EfOptions::default()
    };
    let mut lowest = f64::INFINITY;
    let mut worst_err: f64 = 0.0;
    for e in corpus {
        let rho = embed_wedge_to_tensor(&e.state.reduce(2).unwrap()).unwrap();
        let r = ef_optimize(&rho, &quick).unwrap();
        lowest = lowest.min(r.value);
        worst_err = worst_err.max(r.decomposition.reconstruction_error(&rho));
        o.check(r.value >= ln2 - 1e-4, format!("{}: E_f {:.10} below ln 2", e.label, r.value));
    }
    o.check(worst_err <= 1e-8, format!("corpus reconstruction error {worst_err:.2e}"));
    o.note(format!(
        "{} corpus inputs: lowest E_f upper bound {lowest:.10} (ln 2 = {ln2:.10}), max reconstruction error {worst_err:.2e}",
        corpus.len()
    ));

    // observation: pairing state m=3, n=2 against the two closed forms
    let p = YangParams::new(3, 2).unwrap();
    let a = yang_analytics(p).unwrap();
    let y = yang_state(p).unwrap();
    let rho = embed_wedge_to_tensor(&reduce_pure(&y, 2).unwrap()).unwrap();
    let obs = EfOptions {
        restarts: 2,
        ensemble_size: Some(30),
        max_iters: 200,
        seed: 5,
        ..EfOptions::default()
    };
    let r = ef_optimize(&rho, &obs).unwrap();
    o.check(r.value >= ln2 - 1e-4, "pairing state E_f below ln 2");
    o.note(format!(
        "observation, pairing state m=3 n=2 (rank {}, L={}, 2 restarts): E_f <= {:.10}; closed form (ln m) {:.10}; variant (ln 2m) {:.10}; ln 2 = {ln2:.10}",
        r.rank, r.ensemble_size, r.value, a.ef_closed_form, a.ef_variant
    ));
}

trait Reduce2 {
    fn reduce_2(&self) -> fermient::ReducedDM;
}

impl Reduce2 for fermient::MixedStateN {
    fn reduce_2(&self) -> fermient::ReducedDM {
        fermient::rdmcore::reduce_mixed(self, 2).unwrap()
    }
}

fn c6(o: &mut Outcome, corpus: &[CorpusEntry]) {
    for (n, k) in [(4, 2), (5, 3)] {
        let target = slater_squashed_bound(n).unwrap();
        let numeric = squashed_extension_value(&slater_extension(n, k).unwrap());
        let tensor = squashed_extension_value(&slater_extension_tensor(n, k).unwrap());
        let branch = if n % 2 == 0 { "even" } else { "odd" };
        o.check(
            (numeric - target).abs() <= 1e-10,
            format!(
                "{branch} branch N={n}, k={k}: extension value {numeric:.12} vs closed form {target:.12} (diff {:.3e})",
                numeric - target
            ),
        );
        o.check(
            (numeric - tensor).abs() <= 1e-10,
            format!("N={n}, k={k}: RDM and tripartite routes differ"),
        );
        o.note(format!(
            "N={n}, k={k}: extension value {numeric:.12} (tripartite route {tensor:.12}), closed form {target:.12}"
        ));
    }
    let mut min_val = f64::INFINITY;
    let mut count = 0;
    for (n, k) in [(3, 2), (3, 3), (4, 2), (4, 3), (4, 4), (5, 2), (5, 3), (5, 4), (6, 3)] {
        let v = squashed_extension_value(&slater_extension_tensor(n, k).unwrap());
        min_val = min_val.min(v);
        count += 1;
        o.check(v >= -1e-9, format!("Slater N={n} k={k}: value {v:.3e}"));
    }
    for seed in 0..20u64 {
        let dims = [2 + (seed as usize % 2), 2, 2 + (seed as usize / 2) % 2];
        let rho = random_tripartite(dims, 1 + (seed as usize % 3), 500 + seed);
        let v = squashed_extension_value(&extension_from_tripartite(&rho).unwrap());
        min_val = min_val.min(v);
        count += 1;
        o.check(v >= -1e-9, format!("random tripartite seed {seed}: value {v:.3e}"));
    }
    // 3-RDMs of corpus states on 5 modes, as H (x) H (x) H
    for e in corpus.iter().filter(|e| e.state.modes() == 5 && e.state.particles() == 3).take(12) {
        let r3 = e.state.reduce(3).unwrap();
        let t = fermient::entmeasures::embed_rdm_to_tensor(&r3).unwrap();
        let v = squashed_extension_value(&extension_from_tripartite(&t).unwrap());
        min_val = min_val.min(v);
        count += 1;
        o.check(v >= -1e-9, format!("{}: value {v:.3e}", e.label));
    }
    o.note(format!("{count} genuine tripartite extensions: min value {min_val:.3e}"));
}

fn c7(o: &mut Outcome, corpus: &[CorpusEntry]) {
    let limits = Limits::DEFAULT;
    let mut worst: f64 = 0.0;
    let mut states = 0;
    let mut randoms = 0;
    let mut yang_extra: Vec<PureStateN> = Vec::new();
    for (m, n) in [(4, 1), (4, 2), (4, 3)] {
        yang_extra.push(yang_state(YangParams::new(m, n).unwrap()).unwrap());
    }
    let mut pool: Vec<(String, &PureStateN)> = Vec::new();
    for e in corpus {
        if let CorpusState::Pure(p) = &e.state {
            let is_random = e.label.starts_with("random");
            if is_random {
                if randoms >= 50 {
                    continue;
                }
                randoms += 1;
            }
            pool.push((e.label.clone(), p));
        }
    }
    for y in &yang_extra {
        pool.push((format!("yang M={} N={}", y.modes(), y.particles()), y));
    }
    for (label, s) in pool {
        let total = (s.modes() as u128).pow(s.particles() as u32);
        if total > limits.max_bruteforce as u128 {
            continue;
        }
        states += 1;
        for k in 1..=s.particles() {
            let fast = reduce_pure(s, k).unwrap();
            let slow = brute_force_reduce_with_limits(s, k, &limits).unwrap();
            let d = fast.matrix.max_abs_diff(&slow.matrix);
            worst = worst.max(d);
            o.check(d <= 1e-10, format!("{label}, k={k}: max entry difference {d:.2e}"));
        }
    }
    o.note(format!(
        "{states} states (M^N <= 1e5), all k: max entry difference {worst:.2e}"
    ));
}

fn c8(o: &mut Outcome, corpus: &[CorpusEntry]) {
    let mut coleman: f64 = f64::NEG_INFINITY;
    let mut yang: f64 = f64::NEG_INFINITY;
    for e in corpus {
        let n = e.state.particles() as f64;
        let l1 = e.state.reduce(1).unwrap().spectrum().unwrap().max();
        coleman = coleman.max(l1 - 1.0 / n);
        o.check(l1 <= 1.0 / n + 1e-9, format!("{}: lambda_max(rho1) = {l1}", e.label));
        if n >= 2.0 {
            let l2 = e.state.reduce(2).unwrap().spectrum().unwrap().max();
            yang = yang.max(l2 - 2.0 / (n - 1.0));
            o.check(
                l2 <= 2.0 / (n - 1.0) + 1e-9,
                format!("{}: lambda_max(rho12) = {l2}", e.label),
            );
        }
    }
    o.note(format!(
        "{} states: max(lambda1 - 1/N) = {coleman:.3e}, max(lambda12 - 2/(N-1)) = {yang:.3e}",
        corpus.len()
    ));
}

fn c9(o: &mut Outcome) {
    for (m, n) in [(5, 3), (6, 4)] {
        let opts = SearchOptions {
            restarts: 50,
            seed: 9,
            ..SearchOptions::default()
        };
        let r = min_s2_search(m, n, &opts).unwrap();
        let beaten = r.best_entropy < r.slater_reference - 1e-6;
        o.note(format!(
            "observation M={m} N={n}: best S12 found {:.10}, ln C(N,2) = {:.10}, gap {:.3e}; {}",
            r.best_entropy,
            r.slater_reference,
            r.gap,
            if beaten {
                "a searched state went below the Slater value"
            } else {
                "no searched state went below the Slater value"
            }
        ));
        o.check(
            (r.slater_numeric - r.slater_reference).abs() <= 1e-12,
            "Slater reference reproduces ln C(N,2)",
        );
    }
    o.note("E_sq infimum and the O(1) constant are not computed; extension values and search gaps only");
}

fn main() -> ExitCode {
    let corpus = build_corpus(&CorpusOptions::default()).expect("corpus builds");
    println!("acceptance suite: corpus of {} states", corpus.len());
    let secs = Duration::from_secs;
    let results = [
        run(1, "Slater exactness, N=4 M=6", Some(secs(1)), c1),
        run(2, "pairing-state spectra and entropy, 2<=m<=5", Some(secs(30)), c2),
        run(3, "quantitative subadditivity", Some(secs(60)), |o| c3(o, &corpus)),
        run(4, "elementary symmetric functions", Some(secs(30)), |o| c4(o, &corpus)),
        run(5, "entanglement of formation", Some(secs(300)), |o| c5(o, &corpus)),
        run(6, "squashed-entanglement extension values", Some(secs(30)), |o| c6(o, &corpus)),
        run(7, "fast vs brute-force reduction", Some(secs(120)), |o| c7(o, &corpus)),
        run(8, "Coleman and Yang spectral bounds", Some(secs(60)), |o| c8(o, &corpus)),
        run(9, "desk-scale substitutes (observations)", None, c9),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!(
        "acceptance: {} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
