use fintriple::analysis::{spectrum, zeta_action};
use fintriple::calculus::{blocks, commutator, off_block_residual, rotate_block, BlockKernel};
use fintriple::dirac::{
    validate_axioms, FiniteTriple, LatticeTriple, Normalization, AXIOM_TOLERANCE,
};
use fintriple::product::{leibniz_residual, tensor_triple};
use fintriple::qmatrix::{build_q, Shape};
use fintriple::triple::{build_basis, grading, real_structure, AlgebraElement};
use fintriple::Complex64;
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = Shape> {
    prop_oneof![Just(Shape::Circle), Just(Shape::Segment)]
}

fn normalization() -> impl Strategy<Value = Normalization> {
    prop_oneof![
        Just(Normalization::Sqrt2Corrected),
        Just(Normalization::Unit)
    ]
}

fn samples(n: usize) -> impl Strategy<Value = AlgebraElement> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n).prop_map(|v| {
        AlgebraElement::new(
            v.into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
        )
    })
}

fn lattice() -> impl Strategy<Value = (Shape, usize)> {
    shape().prop_flat_map(|s| (Just(s), s.min_size().max(3)..40))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn circle_determinant_has_period_six(n in 3usize..300) {
        let a = build_q(Shape::Circle, n).unwrap().determinant();
        let b = build_q(Shape::Circle, n + 6).unwrap().determinant();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn segment_determinant_has_period_three(n in 2usize..300) {
        let a = build_q(Shape::Segment, n).unwrap().determinant();
        let b = build_q(Shape::Segment, n + 3).unwrap().determinant();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn grading_and_reality_are_involutions((s, n) in lattice()) {
        let basis = build_basis(&build_q(s, n).unwrap());
        let g = grading(&basis);
        prop_assert!(g.signs().iter().all(|&x| x == 1 || x == -1));
        prop_assert!(real_structure(&basis).is_involution());
        if s == Shape::Circle {
            prop_assert_eq!(g.trace(), n as i64);
        }
    }

    #[test]
    fn axioms_hold_for_any_seed((s, n) in lattice(), norm in normalization(), seed in any::<u64>()) {
        let t = LatticeTriple::new(s, n, norm).unwrap();
        let report = validate_axioms(&t, seed, AXIOM_TOLERANCE);
        prop_assert!(report.all_pass(), "{:?}", report);
    }

    #[test]
    fn commutator_is_block_diagonal(
        (s, n, a) in lattice().prop_flat_map(|(s, n)| (Just(s), Just(n), samples(n))),
        norm in normalization(),
    ) {
        let t = LatticeTriple::new(s, n, norm).unwrap();
        let c = commutator(t.dirac(), &a).unwrap();
        prop_assert!(off_block_residual(&c, t.basis()) < 1e-12);
        let gamma = grading(t.basis());
        for b in blocks(&c, t.dirac()).unwrap() {
            if let BlockKernel::Line(v) = fintriple::calculus::block_kernel(&b) {
                // Kernel vectors live on the neighbour rows, which carry γ = +1.
                let offsets: Vec<usize> = t.basis().column_block(b.point).collect();
                for (k, z) in v.iter().enumerate() {
                    if z.norm() > 1e-14 {
                        prop_assert_eq!(gamma.signs()[offsets[k]], 1);
                    }
                }
            }
            if b.is_interior() && !b.is_degenerate() {
                let r = rotate_block(&b).unwrap();
                prop_assert!(r.kernel_residual() < 1e-10 * (1.0 + r.nu));
            }
        }
    }

    #[test]
    fn spectrum_is_symmetric((s, n) in lattice(), norm in normalization()) {
        let t = LatticeTriple::new(s, n, norm).unwrap();
        let spec = spectrum(t.dirac_matrix(), n).unwrap();
        prop_assert!(spec.symmetry_residual() < 1e-10);
    }

    #[test]
    fn zeta_is_monotone_in_cutoff(n in 3usize..25, s in 0.1f64..3.0, k in 1usize..60) {
        let t = LatticeTriple::new(Shape::Circle, n, Normalization::Sqrt2Corrected).unwrap();
        let spec = spectrum(t.dirac_matrix(), n).unwrap();
        let lo = zeta_action(&spec, s, k).unwrap();
        let hi = zeta_action(&spec, s, k + 1).unwrap();
        prop_assert!(hi.value >= lo.value);
        prop_assert!(lo.partial_sums.windows(2).all(|w| w[1] >= w[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn leibniz_identity(
        (n1, a) in (3usize..7).prop_flat_map(|n| (Just(n), samples(n))),
        (n2, b) in (3usize..7).prop_flat_map(|n| (Just(n), samples(n))),
    ) {
        let left = LatticeTriple::new(Shape::Circle, n1, Normalization::Sqrt2Corrected).unwrap();
        let right = LatticeTriple::new(Shape::Circle, n2, Normalization::Unit).unwrap();
        let p = tensor_triple(left, right, 7).unwrap();
        prop_assert!(leibniz_residual(&p, &a, &b).unwrap() < 1e-12);
    }
}
