use fermient::entmeasures::{
    elem_sym, elem_sym_determinant, elem_sym_direct, mutual_info_bounds, nbody_elem_bound,
    power_sums, purity, subadd_remainder, vn_entropy, Entropy,
};
use fermient::fockbasis::{merge_sign, ModeSet, RankedBasis};
use fermient::hermlin::{eig_herm, kron, CMatrix, HermitianMatrix, C64};
use fermient::rdmcore::{embed_wedge_to_tensor, reduce_pure, trace_down};
use fermient::statekit::random_pure_state;
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = (usize, usize)> {
    (3usize..=7).prop_flat_map(|m| (Just(m), 2usize..m))
}

fn hermitian(n: usize) -> impl Strategy<Value = HermitianMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
        let raw: Vec<C64> = v.into_iter().map(|(a, b)| C64::new(a, b)).collect();
        let m = CMatrix::from_vec(n, n, raw).unwrap();
        let h = CMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
        HermitianMatrix::new(h).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_unrank_bijection((m, n) in (1usize..=20).prop_flat_map(|m| (Just(m), 1usize..=m)), pick in any::<u64>()) {
        let b = RankedBasis::new(m, n).unwrap();
        let idx = (pick % b.dim() as u64) as usize;
        let s = b.unrank(idx).unwrap();
        prop_assert_eq!(s.len(), n);
        prop_assert_eq!(b.rank(s).unwrap(), idx);
    }

    #[test]
    fn merge_sign_swap_rule(a in 0u64..(1 << 10), b in 0u64..(1 << 10)) {
        let (a, b) = (ModeSet::from_bits(a), ModeSet::from_bits(b & !a));
        let ab = merge_sign(a, b).unwrap();
        let ba = merge_sign(b, a).unwrap();
        let parity = if (a.len() * b.len()) % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(ab * ba, parity);
    }

    #[test]
    fn eigendecomposition_reconstructs(h in (1usize..7).prop_flat_map(hermitian)) {
        let spec = eig_herm(&h);
        let u = spec.vectors.as_ref().unwrap();
        let n = h.dim();
        let d = CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(spec.values[i], 0.0) } else { C64::new(0.0, 0.0) });
        let back = u.matmul(&d).unwrap().matmul(&u.adjoint()).unwrap();
        prop_assert!(back.sub(h.as_matrix()).frobenius() <= 1e-10 * (1.0 + h.as_matrix().frobenius()));
        prop_assert!(spec.values.windows(2).all(|w| w[0] >= w[1]));
        let tr: f64 = spec.values.iter().sum();
        prop_assert!((tr - h.trace()).abs() < 1e-10);
    }

    #[test]
    fn rdm_invariants((m, n) in shape(), seed in any::<u64>()) {
        let s = random_pure_state(&RankedBasis::new(m, n).unwrap(), seed).unwrap();
        for k in 1..=n.min(3) {
            let r = reduce_pure(&s, k).unwrap();
            prop_assert!((r.trace() - 1.0).abs() < 1e-12);
            prop_assert!(r.matrix.as_matrix().hermiticity_defect() < 1e-14);
            let spec = r.spectrum().unwrap();
            prop_assert!(spec.min() >= -1e-12);
            if k == 1 {
                prop_assert!(spec.max() <= 1.0 / n as f64 + 1e-9);
            }
            if k == 2 {
                prop_assert!(spec.max() <= 2.0 / (n as f64 - 1.0) + 1e-9);
                let down = trace_down(&r, 1).unwrap();
                let direct = reduce_pure(&s, 1).unwrap();
                prop_assert!(down.matrix.max_abs_diff(&direct.matrix) < 1e-12);
            }
        }
    }

    #[test]
    fn entropy_bounds_hold((m, n) in shape(), seed in any::<u64>()) {
        let s = random_pure_state(&RankedBasis::new(m, n).unwrap(), seed).unwrap();
        let (a, b) = mutual_info_bounds(&s, 1e-9).unwrap();
        prop_assert!(a.holds && b.holds);
        prop_assert!(nbody_elem_bound(&s, 1e-9).unwrap().holds);
        let r1 = reduce_pure(&s, 1).unwrap();
        prop_assert!((-r1.entropy().unwrap()).exp() <= purity(&r1.matrix) + 1e-12);
        let t = embed_wedge_to_tensor(&reduce_pure(&s, 2).unwrap()).unwrap();
        let rep = subadd_remainder(&t, &r1.matrix, &r1.matrix, 1e-9).unwrap();
        prop_assert!(rep.holds);
    }

    #[test]
    fn elem_sym_routes(raw in prop::collection::vec(0.001f64..1.0, 1..12), pick in any::<usize>()) {
        let total: f64 = raw.iter().sum();
        let v: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let n = 1 + pick % v.len();
        let p = power_sums(&v, n);
        let a = elem_sym(n, &p[1..]).unwrap();
        let b = elem_sym_determinant(n, &p[1..]).unwrap();
        let c = elem_sym_direct(&v, n).unwrap();
        prop_assert!((a - c).abs() <= 1e-12);
        prop_assert!((b - c).abs() <= 1e-12);
    }

    #[test]
    fn entropy_is_subadditive_on_products(p in 0.01f64..0.99, q in 0.01f64..0.99) {
        let a = HermitianMatrix::diag(&[p, 1.0 - p]);
        let b = HermitianMatrix::diag(&[q, 1.0 - q]);
        let ab = kron(&a, &b).unwrap();
        let s = vn_entropy(&ab).unwrap();
        prop_assert!((s - vn_entropy(&a).unwrap() - vn_entropy(&b).unwrap()).abs() < 1e-12);
    }
}
