use qmc_patterns::absorber::{joint_parametric, Completion};
use qmc_patterns::fisher::{lambda_tot, mode_table, mu_alpha, mu_alpha_superop, qfi_rate, ModeCalculator};
use qmc_patterns::linalg::{kron, CMat};
use qmc_patterns::models::{RotationQubit, RandomUnitaryModel};
use qmc_patterns::patterns::Pattern;
use qmc_patterns::qmc::{KrausFamily, ParametricModel, Superoperator};
use qmc_patterns::Result;

/// Multiplies every Kraus operator by a θ-dependent phase.
struct Phased<M> {
    inner: M,
    rate: f64,
}

impl<M: ParametricModel> ParametricModel for Phased<M> {
    fn kraus_at(&self, theta: f64) -> Result<KrausFamily> {
        Ok(self.inner.kraus_at(theta)?.with_phase(self.rate * theta + 0.3 * theta * theta))
    }
    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }
}

/// `−8 ln|ν(ε)| / ε²`, `ν` the leading eigenvalue of `X ↦ Σ K_i(θ) X K_i(θ+ε)†`.
fn fidelity_rate<M: ParametricModel>(model: &M, theta: f64, eps: f64) -> f64 {
    let a = model.kraus_at(theta).unwrap();
    let b = model.kraus_at(theta + eps).unwrap();
    let d = a.dim();
    let mut m = CMat::zeros(d * d, d * d);
    for (ka, kb) in a.ops().iter().zip(b.ops()) {
        m += kron(&kb.conjugate(), ka);
    }
    let nu = Superoperator::from_matrix(d, m).eigenvalues().into_iter().map(|z| z.norm()).fold(0.0, f64::max);
    -8.0 * nu.ln() / (eps * eps)
}

/// Richardson extrapolation of the fidelity rate, symmetric in ε.
fn fidelity_qfi<M: ParametricModel>(model: &M, theta: f64) -> f64 {
    let g = |e: f64| 0.5 * (fidelity_rate(model, theta, e) + fidelity_rate(model, theta, -e));
    let (h1, h2) = (g(4e-3), g(2e-3));
    (4.0 * h2 - h1) / 3.0
}

#[test]
fn qfi_rate_matches_fidelity_oracle() {
    let f = qfi_rate(&RotationQubit::default(), 0.2).unwrap();
    let oracle = fidelity_qfi(&RotationQubit::default(), 0.2);
    assert!((f - oracle).abs() < 1e-5, "{f} vs {oracle}");
    assert!((f - 13.401482287).abs() < 1e-7);
    for seed in [1, 2, 3] {
        let m = RandomUnitaryModel::primitive(2, seed, 0.4);
        let f = qfi_rate(&m, 0.4).unwrap();
        let oracle = fidelity_qfi(&m, 0.4);
        assert!((f - oracle).abs() < 1e-4 * f.max(1.0), "seed {seed}: {f} vs {oracle}");
    }
}

#[test]
fn qfi_rate_is_phase_gauge_invariant() {
    let base = qfi_rate(&RotationQubit::default(), 0.2).unwrap();
    for rate in [-2.0, 0.5, 3.0] {
        let phased = Phased { inner: RotationQubit::default(), rate };
        assert!((qfi_rate(&phased, 0.2).unwrap() - base).abs() < 1e-6);
    }
}

#[test]
fn lambda_tot_is_completion_invariant() {
    let f = qfi_rate(&RotationQubit::default(), 0.2).unwrap();
    for completion in [Completion::GramSchmidt, Completion::Polar, Completion::MaxGap] {
        let jp = joint_parametric(RotationQubit::default(), 0.2, completion).unwrap();
        let lt = lambda_tot(&jp.local().unwrap()).unwrap();
        assert!((4.0 * lt.value() - f).abs() < 1e-5, "{completion:?}");
        assert!(lt.discrepancy() < 1e-6);
    }
}

#[test]
fn mode_amplitudes_agree_with_superoperator_form() {
    let jp = joint_parametric(RotationQubit::default(), 0.2, Completion::default()).unwrap();
    let local = jp.local().unwrap();
    for alpha in Pattern::all_up_to(5) {
        let a = mu_alpha(&local, &alpha).unwrap();
        let b = mu_alpha_superop(&local, &alpha).unwrap();
        assert!((a - b).norm() < 1e-8, "{alpha}");
    }
}

#[test]
fn mode_table_converges_to_lambda_tot() {
    let jp = joint_parametric(RotationQubit::default(), 0.2, Completion::default()).unwrap();
    let table = mode_table(&jp.local().unwrap(), 12).unwrap();
    let tot = table.lambda_tot.value();
    let mut last = 0.0;
    for len in 1..=12 {
        let frac = table.partial_sum_up_to(len) / tot;
        assert!(frac >= last - 1e-12);
        last = frac;
    }
    assert!(last >= 0.999);
    let calc = ModeCalculator::new(&jp.local().unwrap()).unwrap();
    assert!(calc.restricted_radius() < 1.0);
}

#[test]
fn random_models_satisfy_fisher_identity() {
    for seed in 10..16 {
        let m = RandomUnitaryModel::primitive(2, seed, 0.5);
        let f = qfi_rate(&m, 0.5).unwrap();
        let jp = joint_parametric(m, 0.5, Completion::default()).unwrap();
        let lt = lambda_tot(&jp.local().unwrap()).unwrap();
        assert!((4.0 * lt.value() - f).abs() < 1e-5, "seed {seed}");
        assert!(lt.discrepancy() < 1e-6, "seed {seed}");
    }
}
