use kakeya_core::numeric::{Matrix, Rational};
use kakeya_core::rat;
use kakeya_core::sumset::{
    check_ratio, count_trapezia, difference_set, gen_line_counterexample, random_instance, x_sumset, Instance,
};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = Instance> {
    (1usize..=3, 1usize..=20, 1usize..=20, 2i64..=12, 0.1f64..1.0, any::<u64>())
        .prop_map(|(d, na, nb, side, rho, seed)| random_instance(d, na, nb, side, rho, seed))
}

fn matrix(d: usize) -> impl Strategy<Value = Matrix<Rational>> {
    prop::collection::vec((-5i64..=5, 1i64..=4).prop_map(|(p, q)| rat(p, q)), d * d)
        .prop_map(move |v| Matrix::from_vec(d, v).unwrap())
}

/// [[X, 0], [0, X]] acting on padded points: the embedded copy lives in the
/// first block.
fn block_diag(x: &Matrix<Rational>) -> Matrix<Rational> {
    let d = x.dim();
    let mut m = Matrix::zeros(2 * d);
    for i in 0..d {
        for j in 0..d {
            m.set(i, j, x.get(i, j).clone());
            m.set(i + d, j + d, x.get(i, j).clone());
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translation_invariance((inst, x, v) in instance().prop_flat_map(|i| {
        let d = i.dim();
        (Just(i), matrix(d), prop::collection::vec(-50i64..=50, d))
    })) {
        let moved = inst.translate(&v);
        prop_assert_eq!(difference_set(&inst).unwrap().len(), difference_set(&moved).unwrap().len());
        prop_assert_eq!(x_sumset(&inst, &x).unwrap().set.len(), x_sumset(&moved, &x).unwrap().set.len());
    }

    #[test]
    fn block_padding_preserves_cardinalities((inst, x) in instance().prop_flat_map(|i| {
        let d = i.dim();
        (Just(i), matrix(d))
    })) {
        let d = inst.dim();
        let padded = inst.pad(2 * d);
        prop_assert_eq!(difference_set(&inst).unwrap().len(), difference_set(&padded).unwrap().len());
        prop_assert_eq!(x_sumset(&inst, &x).unwrap().set.len(), x_sumset(&padded, &block_diag(&x)).unwrap().set.len());
    }

    #[test]
    fn sixth_and_quarter_hold(inst in instance()) {
        prop_assume!(!inst.g.is_empty());
        let d = inst.dim();
        let id = Matrix::<Rational>::identity(d);
        if let Ok(r) = check_ratio(&inst, std::slice::from_ref(&id), &rat(1, 6)) {
            prop_assert!(r.holds);
        }
        if let Ok(r) = check_ratio(&inst, &[id.clone(), id.scale(&rat(2, 1))], &rat(1, 4)) {
            prop_assert!(r.holds);
        }
    }

    #[test]
    fn trapezia_bracketed((inst, x) in instance().prop_flat_map(|i| {
        let d = i.dim();
        (Just(i), matrix(d))
    })) {
        prop_assume!(!inst.g.is_empty() && x.det() != rat(0, 1));
        let y = &x + &Matrix::identity(x.dim());
        let r = count_trapezia(&inst, &x, &y).unwrap();
        prop_assert!(r.identity_verified);
        prop_assert!(r.lower_bound <= r.count as f64 * (1.0 + 1e-12));
        prop_assert!(r.count as f64 <= r.upper_bound);
    }
}

#[test]
fn line_family_exponent_increases_to_two() {
    let x = Matrix::from_rows(vec![vec![rat(0, 1), rat(1, 1)], vec![rat(1, 1), rat(0, 1)]]).unwrap();
    let mut last = 0.0;
    for m in 2..=40 {
        let inst = gen_line_counterexample(&x, m).unwrap();
        let r = check_ratio(&inst, std::slice::from_ref(&x), &rat(0, 1)).unwrap();
        let e = r.achieved_exponent.unwrap();
        assert!(e > last, "M={m}: {e} <= {last}");
        let mf = m as f64;
        assert!((e - (mf * mf).ln() / (2.0 * mf - 1.0).ln()).abs() < 1e-12);
        assert!(e < 2.0);
        last = e;
    }
}
