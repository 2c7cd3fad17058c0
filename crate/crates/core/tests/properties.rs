//! Randomized cross-checks of the algebraic invariants that the unit
//! tests only sample deterministically.

use ffverify_core::budget::Budget;
use ffverify_core::mat::enumerate_gl;
use ffverify_core::subspace::AffineSubspace;
use ffverify_core::{FieldP, Mat};
use proptest::prelude::*;

fn field_strategy() -> impl Strategy<Value = FieldP> {
    prop_oneof![Just(FieldP::F2), Just(FieldP::F3), Just(FieldP::F5)]
}

fn mat_strategy(rows: usize, cols: usize) -> impl Strategy<Value = Mat> {
    field_strategy().prop_flat_map(move |f| {
        proptest::collection::vec(0..f.modulus() as u8, rows * cols)
            .prop_map(move |entries| Mat::new(rows, cols, f, entries).unwrap())
    })
}

fn square_pair(n: usize) -> impl Strategy<Value = (Mat, Mat)> {
    field_strategy().prop_flat_map(move |f| {
        let entry = 0..f.modulus() as u8;
        (
            proptest::collection::vec(entry.clone(), n * n),
            proptest::collection::vec(entry, n * n),
        )
            .prop_map(move |(a, b)| {
                (Mat::new(n, n, f, a).unwrap(), Mat::new(n, n, f, b).unwrap())
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rank_equals_rank_of_transpose(m in mat_strategy(3, 4)) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn det_is_multiplicative_2x2(pair in square_pair(2)) {
        let (a, b) = pair;
        let f = a.field();
        prop_assert_eq!(
            a.mul(&b).unwrap().det().unwrap(),
            f.mul(a.det().unwrap(), b.det().unwrap())
        );
    }

    #[test]
    fn det_is_multiplicative_3x3(pair in square_pair(3)) {
        let (a, b) = pair;
        let f = a.field();
        prop_assert_eq!(
            a.mul(&b).unwrap().det().unwrap(),
            f.mul(a.det().unwrap(), b.det().unwrap())
        );
    }

    #[test]
    fn invertibility_matches_full_rank(m in mat_strategy(3, 3)) {
        let full = m.rank() == 3;
        prop_assert_eq!(m.is_invertible(), full);
        if full {
            let inv = m.inverse().unwrap();
            prop_assert_eq!(m.mul(&inv).unwrap(), Mat::identity(3, m.field()));
        }
    }

    #[test]
    fn kernel_dimension_complements_rank(m in mat_strategy(3, 4)) {
        let kernel = m.kernel_basis();
        prop_assert_eq!(kernel.len(), 4 - m.rank());
        for v in &kernel {
            prop_assert!(m.apply(v).iter().all(|&x| x == 0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn canonicalize_is_idempotent(
        base in proptest::collection::vec(0..2u8, 4),
        d1 in proptest::collection::vec(0..2u8, 4),
        d2 in proptest::collection::vec(0..2u8, 4),
    ) {
        let f = FieldP::F2;
        let mats: Vec<Mat> = [d1, d2]
            .into_iter()
            .map(|v| Mat::new(2, 2, f, v).unwrap())
            .filter(|m| !m.to_vec().iter().all(|&x| x == 0))
            .collect();
        let s = AffineSubspace::new(Mat::new(2, 2, f, base).unwrap(), mats).unwrap();
        let once = s.canonicalize();
        prop_assert_eq!(once.canonicalize(), once);
    }

    #[test]
    fn equivalence_action_preserves_rank_profile(
        base in proptest::collection::vec(0..2u8, 4),
        dir in proptest::collection::vec(0..2u8, 4),
        pi in 0..6usize,
        qi in 0..6usize,
    ) {
        let f = FieldP::F2;
        let dir = Mat::new(2, 2, f, dir).unwrap();
        prop_assume!(!dir.to_vec().iter().all(|&x| x == 0));
        let s = AffineSubspace::new(Mat::new(2, 2, f, base).unwrap(), vec![dir])
            .unwrap()
            .canonicalize();
        let budget = Budget::default();
        let gl: Vec<Mat> = enumerate_gl(2, f, &budget).unwrap().collect();
        let t = s.act(&gl[pi], &gl[qi]).unwrap();
        prop_assert_eq!(t.dim(), s.dim());
        prop_assert_eq!(
            t.max_rank_bounded(2, &budget).unwrap(),
            s.max_rank_bounded(2, &budget).unwrap()
        );
    }
}
