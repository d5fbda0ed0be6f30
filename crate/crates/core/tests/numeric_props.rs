mod common;

use common::{q, rng};
use mvlab_core::matrix::{rank, rq_decompose, svd, Mat};
use mvlab_core::poly::{quartic_root_structure, solve_cubic, BinaryForm, PolyRoot, RootValue};
use mvlab_core::scalar::{rational, Rational};
use proptest::prelude::*;
use rand::Rng;

fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Mat<Rational>> {
    prop::collection::vec(-4i64..=4, rows * cols).prop_map(move |v| Mat::from_fn(rows, cols, |r, c| q(v[r * cols + c])))
}

fn same_roots(a: &[PolyRoot<Rational>], b: &[PolyRoot<Rational>]) -> bool {
    a.len() == b.len()
        && a.iter().all(|x| {
            b.iter().any(|y| {
                x.multiplicity == y.multiplicity
                    && match (&x.value, &y.value) {
                        (RootValue::Exact(u), RootValue::Exact(v)) => u == v,
                        (u, v) => (u.approx() - v.approx()).norm() < 1e-9,
                    }
            })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(m in (1usize..5, 1usize..6).prop_flat_map(|(r, c)| small_matrix(r, c))) {
        let ns = m.null_space();
        prop_assert_eq!(m.rank() + ns.len(), m.cols());
        for v in &ns {
            prop_assert!(m.mul_vec(v).iter().all(|x| *x == q(0)));
        }
        prop_assert_eq!(rank(&m, None).unwrap(), m.rank());
    }

    #[test]
    fn svd_reconstructs(seed in any::<u64>(), rows in 1usize..6, cols in 1usize..6) {
        let mut r = rng(seed);
        let m = Mat::from_fn(rows, cols, |_, _| r.gen_range(-10.0..10.0));
        let d = svd(&m).unwrap();
        let k = d.singular_values.len();
        let s = Mat::from_fn(k, k, |i, j| if i == j { d.singular_values[i] } else { 0.0 });
        let back = d.u.mul(&s).mul(&d.v.transpose());
        let scale = m.max_magnitude().max(1e-300);
        prop_assert!(back.sub(&m).max_magnitude() / scale < 1e-12);
        prop_assert!(d.u.transpose().mul(&d.u).sub(&Mat::identity(k)).max_magnitude() < 1e-12);
        prop_assert!(d.v.transpose().mul(&d.v).sub(&Mat::identity(k)).max_magnitude() < 1e-12);
    }

    #[test]
    fn rq_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = Mat::from_fn(3, 3, |i, j| r.gen_range(-1.0..1.0) + if i == j { 3.0 } else { 0.0 });
        let d = rq_decompose(&m).unwrap();
        let back = d.k.mul(&d.r);
        let s = m[(2, 2)] / back[(2, 2)];
        prop_assert!(back.scale(&s).sub(&m).max_magnitude() < 1e-10 * m.max_magnitude());
        prop_assert!(d.k[(1, 0)] == 0.0 && d.k[(2, 0)] == 0.0 && d.k[(2, 1)] == 0.0);
        prop_assert!((0..3).all(|i| d.k[(i, i)] > 0.0));
    }

    #[test]
    fn cubic_roots_ignore_scaling(c in prop::array::uniform4(-6i64..=6), k in prop::sample::select(vec![-3i64, -1, 2, 5])) {
        prop_assume!(c[0] != 0);
        let a = solve_cubic(c.map(q)).unwrap();
        let b = solve_cubic(c.map(|x| rational(x * k, 7))).unwrap();
        prop_assert!(same_roots(&a, &b));
    }

    #[test]
    fn quartic_structure_ignores_scaling(c in prop::array::uniform5(-5i64..=5), k in prop::sample::select(vec![-2i64, 3, 7])) {
        prop_assume!(c.iter().any(|&x| x != 0));
        let f = BinaryForm::new(c.iter().map(|&x| q(x)).collect()).unwrap();
        let g = BinaryForm::new(c.iter().map(|&x| rational(x * k, 4)).collect()).unwrap();
        let (a, b) = (quartic_root_structure(&f).unwrap(), quartic_root_structure(&g).unwrap());
        prop_assert_eq!(a.len(), b.len());
        for r in &a {
            prop_assert!(b.iter().any(|s| s.multiplicity == r.multiplicity && s.root == r.root));
        }
    }
}
