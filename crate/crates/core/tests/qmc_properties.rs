use proptest::prelude::*;

use qmc_patterns::linalg::{self, c, CMat};
use qmc_patterns::models::{RotationQubit, RandomUnitaryModel};
use qmc_patterns::qmc::{
    stationary_state, transition_apply, DensityMatrix, ParametricModel, Picture, Resolvent, Superoperator,
};

fn random_observable(seed: &[f64], d: usize) -> CMat {
    let mut x = CMat::from_fn(d, d, |i, j| c(seed[(i * d + j) % seed.len()], seed[(i + j * d + 1) % seed.len()]));
    x = (&x + x.adjoint()) * c(0.5, 0.0);
    x
}

fn centered(x: &CMat, rho: &DensityMatrix) -> CMat {
    let shift = rho.expect(x);
    x - CMat::identity(x.nrows(), x.ncols()) * shift
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn resolvent_matches_neumann_series(seed in 0u64..10_000, coeffs in prop::collection::vec(-1.0f64..1.0, 8)) {
        let model = RandomUnitaryModel::primitive(2, seed, 0.3);
        let k = model.kraus_at(0.3).unwrap();
        let rho = stationary_state(&k).unwrap();
        let x = centered(&random_observable(&coeffs, 2), &rho);
        let r = Resolvent::new(&k, rho.clone()).unwrap().apply(&x).unwrap();
        let mut term = x.clone();
        let mut sum = x.clone();
        for _ in 0..4000 {
            term = transition_apply(&k, &term, Picture::Heisenberg).unwrap();
            sum += &term;
            if linalg::norm(&term) < 1e-15 {
                break;
            }
        }
        let sum = centered(&sum, &rho);
        prop_assert!(linalg::norm(&(r - sum)) < 1e-8);
    }

    #[test]
    fn heisenberg_and_schrodinger_are_adjoint(seed in 0u64..10_000, coeffs in prop::collection::vec(-1.0f64..1.0, 8)) {
        let model = RandomUnitaryModel::new(2, seed);
        let k = model.kraus_at(0.7).unwrap();
        let x = random_observable(&coeffs, 2);
        let rho = DensityMatrix::maximally_mixed(2);
        let lhs = rho.expect(&transition_apply(&k, &x, Picture::Heisenberg).unwrap());
        let moved = DensityMatrix::new(transition_apply(&k, rho.matrix(), Picture::Schrodinger).unwrap()).unwrap();
        prop_assert!((lhs - moved.expect(&x)).norm() < 1e-12);
        let s = Superoperator::from_kraus(&k, Picture::Schrodinger);
        let h = Superoperator::from_kraus(&k, Picture::Heisenberg);
        let y = random_observable(&coeffs[1..], 2);
        let a = linalg::trace_product(&y.adjoint(), &s.apply(&x));
        let b = linalg::trace_product(&h.apply(&y).adjoint(), &x);
        prop_assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn stationary_state_is_fixed_and_trace_one(seed in 0u64..10_000, theta in 0.05f64..0.85) {
        let model = RandomUnitaryModel::primitive(3, seed, theta);
        let k = model.kraus_at(theta).unwrap();
        prop_assert!(k.completeness_residual() < 1e-10);
        let rho = stationary_state(&k).unwrap();
        let moved = transition_apply(&k, rho.matrix(), Picture::Schrodinger).unwrap();
        prop_assert!(linalg::norm(&(moved - rho.matrix())) < 1e-9);
        prop_assert!((rho.matrix().trace() - c(1.0, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn rotation_qubit_stationary_state_is_full_rank() {
    let k = RotationQubit::default().kraus_at(0.2).unwrap();
    let rho = stationary_state(&k).unwrap();
    let (vals, _) = rho.eigen_mixture();
    assert!(vals.iter().all(|&v| v > 1e-3));
}
