//! Entanglement of formation by direct minimization over pure-state
//! ensembles.
//!
//! Every size-L ensemble of a rank-r state arises from an L x r isometry V
//! acting on the eigen-ensemble b_j = sqrt(mu_j) phi_j: the unnormalized
//! members are psi_k = sum_j V_kj b_j. Mixing two rows of V by a 2x2 unitary
//! keeps V an isometry and changes only two members, so the search runs
//! cyclic sweeps of such rotations with a line search over the angle. The
//! result is an upper bound on E_f.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::hermlin::{eig_herm, eigvals_small, CMatrix, HermitianMatrix, C64, ZERO};
use crate::rdmcore::TensorDM;
use crate::statekit::{complex_normal, seeded_rng};

const MAX_RANK: usize = 64;
const ANGLE_SAMPLES: usize = 16;
const GOLDEN_STEPS: usize = 20;
const PHASES: [f64; 2] = [0.0, std::f64::consts::FRAC_PI_2];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EfOptions {
    /// Ensemble size L; `None` picks min(r^2, max(r, max_ensemble)).
    pub ensemble_size: Option<usize>,
    pub max_ensemble: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Maximum number of rotation sweeps per restart.
    pub max_iters: usize,
    /// A sweep improving the objective by less than this ends a restart.
    pub tol: f64,
}

impl Default for EfOptions {
    fn default() -> Self {
        EfOptions {
            ensemble_size: None,
            max_ensemble: 36,
            restarts: 20,
            seed: 0,
            max_iters: 100,
            tol: 1e-10,
        }
    }
}

/// Pure-state decomposition rho = sum_k weights[k] |members[k]><members[k]|.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleDecomposition {
    pub weights: Vec<f64>,
    /// Unit vectors on the two-party space, row-major over `dims`.
    pub members: Vec<Vec<C64>>,
    pub dims: [usize; 2],
    /// sum_k weights[k] S(Tr_2 member_k).
    pub value: f64,
}

impl EnsembleDecomposition {
    pub fn reconstruct(&self) -> HermitianMatrix {
        let d = self.dims[0] * self.dims[1];
        let mut out = CMatrix::zeros(d, d);
        for (w, v) in self.weights.iter().zip(&self.members) {
            for i in 0..d {
                if v[i] == ZERO {
                    continue;
                }
                let vi = v[i] * *w;
                for j in 0..d {
                    out[(i, j)] += vi * v[j].conj();
                }
            }
        }
        HermitianMatrix::symmetrized(out)
    }

    /// Frobenius distance between the reconstructed and the target state.
    pub fn reconstruction_error(&self, rho: &TensorDM) -> f64 {
        self.reconstruct().as_matrix().sub(rho.matrix.as_matrix()).frobenius()
    }
}

#[derive(Clone, Debug)]
pub struct EfResult {
    /// Best objective found: an upper bound on E_f.
    pub value: f64,
    pub decomposition: EnsembleDecomposition,
    /// Whether the best restart met the sweep tolerance.
    pub converged: bool,
    pub sweeps: usize,
    pub best_restart: usize,
    pub restart_values: Vec<f64>,
    pub rank: usize,
    pub ensemble_size: usize,
}

/// E_f minus the fermionic floor ln 2.
pub fn ef_fermionic_excess(value: f64) -> f64 {
    value - 2f64.ln()
}

/// ||x||^2 S(Tr_2 x x^dagger / ||x||^2) = -sum nu ln nu + t ln t,
/// nu the eigenvalues of X X^dagger (the smaller side) and t = sum nu.
fn member_cost(x: &[C64], da: usize, db: usize, scratch: &mut Scratch) -> f64 {
    let t: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    if t <= 1e-300 {
        return 0.0;
    }
    let (small, large, transpose) = if da <= db { (da, db, false) } else { (db, da, true) };
    if small == 1 {
        return 0.0;
    }
    let at = |i: usize, k: usize| if transpose { x[k * db + i] } else { x[i * db + k] };
    let g = &mut scratch.gram;
    for i in 0..small {
        for j in 0..=i {
            let mut acc = ZERO;
            for k in 0..large {
                acc += at(i, k) * at(j, k).conj();
            }
            g[i * small + j] = acc;
            g[j * small + i] = acc.conj();
        }
    }
    eigvals_small(g, small, &mut scratch.values, &mut scratch.work);
    let mut s = t * t.ln();
    for &v in &scratch.values[..small] {
        if v > 0.0 {
            s -= v * v.ln();
        }
    }
    s
}

struct Scratch {
    gram: Vec<C64>,
    values: Vec<f64>,
    work: Vec<f64>,
}

impl Scratch {
    fn new(da: usize, db: usize) -> Self {
        let small = da.min(db);
        Scratch {
            gram: vec![ZERO; small * small],
            values: vec![0.0; small],
            work: vec![0.0; small],
        }
    }
}

struct Problem {
    da: usize,
    db: usize,
    /// Eigen-ensemble vectors sqrt(mu_j) phi_j.
    basis: Vec<Vec<C64>>,
}

struct RunOutcome {
    value: f64,
    members: Vec<Vec<C64>>,
    converged: bool,
    sweeps: usize,
}

impl Problem {
    fn members_from(&self, v: &CMatrix) -> Vec<Vec<C64>> {
        let d = self.da * self.db;
        (0..v.rows())
            .map(|k| {
                let mut out = vec![ZERO; d];
                for (j, b) in self.basis.iter().enumerate() {
                    let c = v[(k, j)];
                    if c == ZERO {
                        continue;
                    }
                    for (o, bv) in out.iter_mut().zip(b) {
                        *o += c * bv;
                    }
                }
                out
            })
            .collect()
    }

    fn cost(&self, x: &[C64], scratch: &mut Scratch) -> f64 {
        member_cost(x, self.da, self.db, scratch)
    }

    fn rotated(
        &self,
        a: &[C64],
        b: &[C64],
        theta: f64,
        phase: f64,
        out_a: &mut [C64],
        out_b: &mut [C64],
        scratch: &mut Scratch,
    ) -> f64 {
        let (s, c) = theta.sin_cos();
        let e = C64::from_polar(1.0, phase);
        for i in 0..a.len() {
            out_a[i] = a[i] * c - b[i] * e.conj() * s;
            out_b[i] = a[i] * e * s + b[i] * c;
        }
        self.cost(out_a, scratch) + self.cost(out_b, scratch)
    }

    fn run(&self, v: CMatrix, opts: &EfOptions) -> RunOutcome {
        let mut members = self.members_from(&v);
        let l = members.len();
        let d = self.da * self.db;
        let mut scratch = Scratch::new(self.da, self.db);
        let mut costs: Vec<f64> = members.iter().map(|m| self.cost(m, &mut scratch)).collect();
        let mut total: f64 = costs.iter().sum();
        let mut buf_a = vec![ZERO; d];
        let mut buf_b = vec![ZERO; d];
        let mut converged = false;
        let mut sweeps = 0;
        while sweeps < opts.max_iters {
            sweeps += 1;
            let before = total;
            for p in 0..l {
                for q in p + 1..l {
                    for &phase in &PHASES {
                        let current = costs[p] + costs[q];
                        let (a, b) = (&members[p], &members[q]);
                        if a.iter().chain(b.iter()).all(|z| *z == ZERO) {
                            continue;
                        }
                        let mut f = |th: f64| self.rotated(a, b, th, phase, &mut buf_a, &mut buf_b, &mut scratch);
                        let step = std::f64::consts::PI / ANGLE_SAMPLES as f64;
                        let mut best = (0.0, current);
                        for i in 1..ANGLE_SAMPLES {
                            let th = i as f64 * step;
                            let val = f(th);
                            if val < best.1 {
                                best = (th, val);
                            }
                        }
                        let (mut lo, mut hi) = (best.0 - step, best.0 + step);
                        let g = 0.5 * (5f64.sqrt() - 1.0);
                        let mut x1 = hi - g * (hi - lo);
                        let mut x2 = lo + g * (hi - lo);
                        let mut f1 = f(x1);
                        let mut f2 = f(x2);
                        for _ in 0..GOLDEN_STEPS {
                            if f1 < f2 {
                                hi = x2;
                                x2 = x1;
                                f2 = f1;
                                x1 = hi - g * (hi - lo);
                                f1 = f(x1);
                            } else {
                                lo = x1;
                                x1 = x2;
                                f1 = f2;
                                x2 = lo + g * (hi - lo);
                                f2 = f(x2);
                            }
                        }
                        for (th, val) in [(x1, f1), (x2, f2)] {
                            if val < best.1 {
                                best = (th, val);
                            }
                        }
                        if best.1 < current - 1e-15 {
                            f(best.0);
                            members[p].copy_from_slice(&buf_a);
                            members[q].copy_from_slice(&buf_b);
                            costs[p] = self.cost(&members[p], &mut scratch);
                            costs[q] = self.cost(&members[q], &mut scratch);
                        }
                    }
                }
            }
            total = costs.iter().sum();
            if before - total < opts.tol {
                converged = true;
                break;
            }
        }
        RunOutcome {
            value: total,
            members,
            converged,
            sweeps,
        }
    }
}

/// Random L x r isometry: Gaussian columns, Gram-Schmidt.
fn random_isometry(l: usize, r: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    loop {
        let mut v = CMatrix::from_fn(l, r, |_, _| complex_normal(rng));
        let mut ok = true;
        for j in 0..r {
            for i in 0..j {
                let mut dot = ZERO;
                for k in 0..l {
                    dot += v[(k, i)].conj() * v[(k, j)];
                }
                for k in 0..l {
                    let vi = v[(k, i)];
                    v[(k, j)] -= dot * vi;
                }
            }
            let norm = (0..l).map(|k| v[(k, j)].norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            for k in 0..l {
                v[(k, j)] /= norm;
            }
        }
        if ok {
            return v;
        }
    }
}

/// Minimizes the average marginal entropy over pure-state decompositions of a
/// bipartite state. Restarts are independent and merged by value, ties going
/// to the lower restart index; restart 0 starts from the eigen-ensemble.
pub fn ef_optimize(rho: &TensorDM, opts: &EfOptions) -> Result<EfResult> {
    if rho.parties() != 2 {
        return Err(Error::Shape(format!(
            "entanglement of formation needs 2 parties, got {}",
            rho.parties()
        )));
    }
    let tol = Tolerances::DEFAULT;
    let tr = rho.matrix.trace();
    if (tr - 1.0).abs() > tol.trace {
        return Err(Error::Normalization(format!("state has trace {tr}")));
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidParameter("need at least one restart".into()));
    }
    let mut spec = eig_herm(&rho.matrix);
    spec.clamp_psd(&tol)?;
    let vecs = spec.vectors.as_ref().expect("eigenvectors requested");
    let d = rho.matrix.dim();
    let basis: Vec<Vec<C64>> = spec
        .values
        .iter()
        .enumerate()
        .filter(|(_, &mu)| mu > tol.support_cutoff)
        .map(|(j, &mu)| (0..d).map(|i| vecs[(i, j)] * mu.sqrt()).collect())
        .collect();
    let r = basis.len();
    if r > MAX_RANK {
        return Err(Error::Capacity {
            what: "state rank",
            requested: r as u128,
            limit: MAX_RANK as u128,
        });
    }
    let l = match opts.ensemble_size {
        Some(l) if l < r => {
            return Err(Error::InvalidParameter(format!(
                "ensemble size {l} below rank {r}"
            )))
        }
        Some(l) => l,
        None => (r * r).min(r.max(opts.max_ensemble)),
    };
    let problem = Problem {
        da: rho.dims[0],
        db: rho.dims[1],
        basis,
    };
    log::debug!("E_f search: rank {r}, ensemble size {l}, {} restarts", opts.restarts);

    let outcomes: Vec<RunOutcome> = (0..opts.restarts)
        .into_par_iter()
        .map(|idx| {
            let v = if idx == 0 {
                CMatrix::from_fn(l, r, |i, j| if i == j { C64::new(1.0, 0.0) } else { ZERO })
            } else {
                let mut rng = seeded_rng(opts.seed);
                rng.set_stream(idx as u64);
                random_isometry(l, r, &mut rng)
            };
            problem.run(v, opts)
        })
        .collect();

    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.value < outcomes[best].value {
            best = i;
        }
    }
    let restart_values: Vec<f64> = outcomes.iter().map(|o| o.value).collect();
    let winner = outcomes.into_iter().nth(best).expect("at least one restart");
    let mut weights = Vec::new();
    let mut members = Vec::new();
    for m in winner.members {
        let w: f64 = m.iter().map(|z| z.norm_sqr()).sum();
        if w <= 1e-14 {
            continue;
        }
        let n = w.sqrt();
        weights.push(w);
        members.push(m.into_iter().map(|z| z / n).collect());
    }
    Ok(EfResult {
        value: winner.value,
        decomposition: EnsembleDecomposition {
            weights,
            members,
            dims: [problem.da, problem.db],
            value: winner.value,
        },
        converged: winner.converged,
        sweeps: winner.sweeps,
        best_restart: best,
        restart_values,
        rank: r,
        ensemble_size: l,
    })
}
