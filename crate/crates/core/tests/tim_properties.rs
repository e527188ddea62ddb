use proptest::prelude::*;
use qmc_patterns::absorber::{joint_parametric, Completion};
use qmc_patterns::models::RotationQubit;
use qmc_patterns::patterns::Pattern;
use qmc_patterns::qmc::stationary_state;
use qmc_patterns::tim::{
    annihilation_operator, creation_operator, exact_mode_expectations, fock_overlap, number_operator, quadrature_p,
    quadrature_q, transfer_mode_moments, FockSpec,
};

fn pattern() -> impl Strategy<Value = Pattern> {
    (0u64..8).prop_map(|v| Pattern::from_value(2 * v + 1).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mode_operators_are_hermitian(alpha in pattern(), n in 5usize..10) {
        prop_assume!(alpha.len() <= n);
        for op in [quadrature_q(&alpha, n).unwrap(), quadrature_p(&alpha, n).unwrap(), number_operator(&alpha, n).unwrap()] {
            prop_assert!(op.hermiticity_defect() < 1e-12);
        }
    }

    #[test]
    fn annihilation_is_adjoint_of_creation(alpha in pattern(), n in 5usize..10) {
        prop_assume!(alpha.len() <= n);
        let a = annihilation_operator(&alpha, n).unwrap();
        let astar = creation_operator(&alpha, n).unwrap();
        let diff = a.add(&astar.adjoint().scale((-1.0).into()));
        prop_assert!(diff.matrix().data().iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn vacuum_norm_counts_placements(alpha in pattern(), n in 5usize..11) {
        prop_assume!(alpha.len() <= n);
        let norm = fock_overlap(&FockSpec::new([(alpha.clone(), 1)]), &FockSpec::new([(alpha.clone(), 1)]), n).unwrap();
        let want = (n - alpha.len() + 1) as f64 / n as f64;
        prop_assert!((norm.re - want).abs() < 1e-12);
    }

    #[test]
    fn transfer_moments_match_state_vector(u in 0.2f64..1.5, alpha in pattern(), n in 6usize..11) {
        prop_assume!(alpha.len() <= n);
        let jp = joint_parametric(RotationQubit::default(), 0.2, Completion::default()).unwrap();
        let exact = exact_mode_expectations(&jp, u, n, &alpha).unwrap();
        let k = jp.kraus_local(u, n as f64).unwrap();
        let (a, number) = transfer_mode_moments(&k, stationary_state(&k).unwrap().matrix(), n, &alpha).unwrap();
        prop_assert!((a - exact.annihilation).norm() < 1e-10);
        prop_assert!((number - exact.number).abs() < 1e-10);
    }
}
