//! Kraus families, transition superoperators and their stationary states.
//!
//! Matrices are column-vectorised, so the Schrödinger map `ρ ↦ Σ K ρ K†`
//! acts as `Σ conj(K) ⊗ K` and the Heisenberg map `X ↦ Σ K† X K` as
//! `Σ Kᵀ ⊗ K†`.

use crate::config::{TOLERANCES, DEFAULT_FD_STEP_SECOND};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, C64, I};

/// Kraus operators of a quantum channel. Sequential-measurement code uses
/// the binary case `(K_0, K_1)`; the channel-level operations accept any
/// number of operators.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausFamily {
    ops: Vec<CMat>,
}

impl KrausFamily {
    /// Binary family `(K_0, K_1)` satisfying `K_0†K_0 + K_1†K_1 = 1`.
    pub fn new(k0: CMat, k1: CMat) -> Result<Self> {
        Self::from_ops(vec![k0, k1])
    }

    /// General family; every operator must be square of the same size.
    pub fn from_ops(ops: Vec<CMat>) -> Result<Self> {
        let family = Self::from_ops_unchecked(ops)?;
        let residual = family.completeness_residual();
        if residual > TOLERANCES.completeness {
            return Err(Error::InvalidKraus(format!(
                "completeness residual {residual:e}"
            )));
        }
        Ok(family)
    }

    /// Shape checks only; used for derivative tuples and perturbed families.
    pub(crate) fn from_ops_unchecked(ops: Vec<CMat>) -> Result<Self> {
        let d = ops
            .first()
            .ok_or_else(|| Error::InvalidKraus("empty family".into()))?
            .nrows();
        if d == 0 {
            return Err(Error::InvalidKraus("zero dimension".into()));
        }
        for k in &ops {
            if k.nrows() != d || k.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, got: k.ncols() });
            }
            if !linalg::is_finite(k) {
                return Err(Error::InvalidKraus("non-finite entry".into()));
            }
        }
        Ok(Self { ops })
    }

    pub fn dim(&self) -> usize {
        self.ops[0].nrows()
    }

    pub fn ops(&self) -> &[CMat] {
        &self.ops
    }

    pub fn is_binary(&self) -> bool {
        self.ops.len() == 2
    }

    pub fn k0(&self) -> &CMat {
        &self.ops[0]
    }

    pub fn k1(&self) -> &CMat {
        &self.ops[1]
    }

    /// Frobenius norm of `Σ K†K − 1`.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.dim();
        let mut acc = -linalg::identity(d);
        for k in &self.ops {
            acc += k.adjoint() * k;
        }
        linalg::norm(&acc)
    }

    /// Multiplies every operator by the same phase.
    pub fn with_phase(&self, phase: f64) -> Self {
        let z = C64::from_polar(1.0, phase);
        Self { ops: self.ops.iter().map(|k| k * z).collect() }
    }
}

/// A smooth one-parameter family of Kraus pairs.
pub trait ParametricModel: Send + Sync {
    fn kraus_at(&self, theta: f64) -> Result<KrausFamily>;

    /// Open parameter interval.
    fn domain(&self) -> (f64, f64);

    /// First-derivative finite-difference step.
    fn fd_step(&self) -> f64 {
        crate::config::DEFAULT_FD_STEP
    }

    fn contains(&self, theta: f64, margin: f64) -> bool {
        let (lo, hi) = self.domain();
        theta - margin > lo && theta + margin < hi
    }
}

impl<M: ParametricModel + ?Sized> ParametricModel for &M {
    fn kraus_at(&self, theta: f64) -> Result<KrausFamily> {
        (**self).kraus_at(theta)
    }
    fn domain(&self) -> (f64, f64) {
        (**self).domain()
    }
    fn fd_step(&self) -> f64 {
        (**self).fd_step()
    }
}

impl<M: ParametricModel + ?Sized> ParametricModel for Box<M> {
    fn kraus_at(&self, theta: f64) -> Result<KrausFamily> {
        (**self).kraus_at(theta)
    }
    fn domain(&self) -> (f64, f64) {
        (**self).domain()
    }
    fn fd_step(&self) -> f64 {
        (**self).fd_step()
    }
}

impl<M: ParametricModel + ?Sized> ParametricModel for std::sync::Arc<M> {
    fn kraus_at(&self, theta: f64) -> Result<KrausFamily> {
        (**self).kraus_at(theta)
    }
    fn domain(&self) -> (f64, f64) {
        (**self).domain()
    }
    fn fd_step(&self) -> f64 {
        (**self).fd_step()
    }
}

/// Validated density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMat);

impl DensityMatrix {
    pub fn new(rho: CMat) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return Err(Error::InvalidDensityMatrix("not square".into()));
        }
        let tol = TOLERANCES.density;
        let herm = linalg::max_abs(&(&rho - rho.adjoint()));
        if herm > tol {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian ({herm:e})")));
        }
        let tr = rho.trace();
        if (tr - 1.0).norm() > tol {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let (vals, _) = linalg::hermitian_eigen(&rho);
        if let Some(min) = vals.last() {
            if *min < -tol {
                return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(Self(rho))
    }

    pub fn pure(psi: &linalg::CVec) -> Result<Self> {
        let n = linalg::vec_norm(psi);
        let psi = psi / c(n, 0.0);
        Self::new(&psi * psi.adjoint())
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self(linalg::identity(d) * c(1.0 / d as f64, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    /// `Tr(ρ X)`.
    pub fn expect(&self, x: &CMat) -> C64 {
        linalg::trace_product(&self.0, x)
    }

    /// Eigenvalues (decreasing) and eigenvectors, as a convex mixture of pure states.
    pub fn eigen_mixture(&self) -> (Vec<f64>, CMat) {
        linalg::hermitian_eigen(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picture {
    Heisenberg,
    Schrodinger,
}

/// Vectorised linear map on `d × d` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: CMat,
}

impl Superoperator {
    pub fn from_kraus(kraus: &KrausFamily, picture: Picture) -> Self {
        let d = kraus.dim();
        let mut m = CMat::zeros(d * d, d * d);
        for k in kraus.ops() {
            m += match picture {
                Picture::Schrodinger => linalg::kron(&k.conjugate(), k),
                Picture::Heisenberg => linalg::kron(&k.transpose(), &k.adjoint()),
            };
        }
        Self { dim: d, matrix: m }
    }

    /// `X ↦ A X B` as a vectorised map.
    pub fn sandwich(a: &CMat, b: &CMat) -> Self {
        Self { dim: a.nrows(), matrix: linalg::kron(&b.transpose(), a) }
    }

    pub fn from_matrix(dim: usize, matrix: CMat) -> Self {
        Self { dim, matrix }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn apply(&self, x: &CMat) -> CMat {
        linalg::unvectorize(&(&self.matrix * linalg::vectorize(x)), self.dim)
    }

    /// Adjoint with respect to the Hilbert–Schmidt inner product.
    pub fn adjoint(&self) -> Self {
        Self { dim: self.dim, matrix: self.matrix.adjoint() }
    }

    pub fn compose(&self, inner: &Superoperator) -> Self {
        Self { dim: self.dim, matrix: &self.matrix * &inner.matrix }
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        linalg::eigenvalues(&self.matrix)
    }
}

/// `Σ K† X K` (Heisenberg) or `Σ K X K†` (Schrödinger).
pub fn transition_apply(kraus: &KrausFamily, x: &CMat, picture: Picture) -> Result<CMat> {
    let d = kraus.dim();
    if x.nrows() != d || x.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.nrows() });
    }
    let mut out = CMat::zeros(d, d);
    for k in kraus.ops() {
        out += match picture {
            Picture::Heisenberg => k.adjoint() * x * k,
            Picture::Schrodinger => k * x * k.adjoint(),
        };
    }
    Ok(out)
}

/// Splits the spectrum of `T_*` into the unit eigenvalue and the rest,
/// failing unless the map is primitive.
fn primitive_spectrum(kraus: &KrausFamily) -> Result<Vec<C64>> {
    let eig = Superoperator::from_kraus(kraus, Picture::Schrodinger).eigenvalues();
    let unit = eig
        .iter()
        .filter(|z| (*z - 1.0).norm() < TOLERANCES.unit_eigenvalue)
        .count();
    if unit != 1 {
        return Err(Error::NotPrimitive(format!("eigenvalue 1 has multiplicity {unit}")));
    }
    let mut rest: Vec<C64> = Vec::with_capacity(eig.len() - 1);
    let mut skipped = false;
    for z in eig {
        if !skipped && (z - 1.0).norm() < TOLERANCES.unit_eigenvalue {
            skipped = true;
            continue;
        }
        if z.norm() >= 1.0 - TOLERANCES.peripheral {
            return Err(Error::NotPrimitive(format!("peripheral eigenvalue {z}")));
        }
        rest.push(z);
    }
    Ok(rest)
}

/// Unique stationary state of a primitive channel.
pub fn stationary_state(kraus: &KrausFamily) -> Result<DensityMatrix> {
    primitive_spectrum(kraus)?;
    let d = kraus.dim();
    let t = Superoperator::from_kraus(kraus, Picture::Schrodinger);
    // T − 1 is singular; the border vec(1) vec(1)† fixes the trace.
    let ones = linalg::vectorize(&linalg::identity(d));
    let m = t.matrix() - CMat::identity(d * d, d * d) + &ones * ones.adjoint();
    let inv = linalg::inverse(&m).ok_or_else(|| Error::NotPrimitive("singular bordered transfer matrix".into()))?;
    let mut rho = linalg::unvectorize(&(inv * ones), d);
    rho = (&rho + rho.adjoint()) * c(0.5, 0.0);
    let tr = rho.trace();
    rho /= tr;
    let residual = linalg::norm(&(t.apply(&rho) - &rho));
    if residual > TOLERANCES.stationarity {
        return Err(Error::NotPrimitive(format!("stationarity residual {residual:e}")));
    }
    DensityMatrix::new(rho)
}

/// `1 − max |λ|` over the non-unit eigenvalues of `T_*`.
pub fn spectral_gap(kraus: &KrausFamily) -> Result<f64> {
    let rest = primitive_spectrum(kraus)?;
    let second = rest.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(1.0 - second)
}

/// Resolvent `(Id − T)^{-1}` of the Heisenberg map on centered observables.
#[derive(Debug, Clone)]
pub struct Resolvent {
    dim: usize,
    rho: DensityMatrix,
    inverse: CMat,
}

impl Resolvent {
    /// Inverts `Id − T + |1⟩⟨ρ|`, which agrees with `Id − T` on centered
    /// observables and is invertible for primitive `T`.
    pub fn new(kraus: &KrausFamily, rho: DensityMatrix) -> Result<Self> {
        let d = kraus.dim();
        let t = Superoperator::from_kraus(kraus, Picture::Heisenberg);
        let ones = linalg::vectorize(&linalg::identity(d));
        let m = CMat::identity(d * d, d * d) - t.matrix() + ones * linalg::vectorize(rho.matrix()).adjoint();
        let inverse = linalg::inverse(&m).ok_or_else(|| Error::NotPrimitive("singular resolvent".into()))?;
        Ok(Self { dim: d, rho, inverse })
    }

    pub fn stationary(&self) -> &DensityMatrix {
        &self.rho
    }

    /// Returns `y` with `(Id − T) y = x` and `Tr(ρ y) = 0`.
    pub fn apply(&self, x: &CMat) -> Result<CMat> {
        if x.nrows() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.nrows() });
        }
        let centre = self.rho.expect(x);
        if centre.norm() > TOLERANCES.centering {
            return Err(Error::InputNotCentered(centre.norm()));
        }
        let mut y = linalg::unvectorize(&(&self.inverse * linalg::vectorize(x)), self.dim);
        let shift = self.rho.expect(&y);
        for i in 0..self.dim {
            y[(i, i)] -= shift;
        }
        Ok(y)
    }
}

/// One-shot version of [`Resolvent::apply`].
pub fn resolvent_apply(kraus: &KrausFamily, x: &CMat) -> Result<CMat> {
    let rho = stationary_state(kraus)?;
    Resolvent::new(kraus, rho)?.apply(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeOrder {
    First,
    Second,
}

/// Central finite differences of each Kraus operator. Raw (not gauge fixed).
pub fn kraus_derivatives<M: ParametricModel + ?Sized>(
    model: &M,
    theta: f64,
    order: DerivativeOrder,
) -> Result<Vec<CMat>> {
    let (h, margin) = match order {
        DerivativeOrder::First => (model.fd_step(), model.fd_step()),
        DerivativeOrder::Second => (DEFAULT_FD_STEP_SECOND, 2.0 * DEFAULT_FD_STEP_SECOND),
    };
    kraus_derivatives_with_step(model, theta, order, h, margin)
}

pub fn kraus_derivatives_with_step<M: ParametricModel + ?Sized>(
    model: &M,
    theta: f64,
    order: DerivativeOrder,
    h: f64,
    margin: f64,
) -> Result<Vec<CMat>> {
    if !model.contains(theta, margin) {
        let (lo, hi) = model.domain();
        return Err(Error::OutOfDomain { theta, lo, hi, margin });
    }
    let plus = model.kraus_at(theta + h)?;
    let minus = model.kraus_at(theta - h)?;
    let centre = model.kraus_at(theta)?;
    let derivs: Vec<CMat> = match order {
        DerivativeOrder::First => plus
            .ops()
            .iter()
            .zip(minus.ops())
            .map(|(p, m)| (p - m) / c(2.0 * h, 0.0))
            .collect(),
        DerivativeOrder::Second => plus
            .ops()
            .iter()
            .zip(minus.ops())
            .zip(centre.ops())
            .map(|((p, m), k)| (p + m - k * c(2.0, 0.0)) / c(h * h, 0.0))
            .collect(),
    };
    if order == DerivativeOrder::First {
        let residual = differentiated_completeness(&centre, &derivs);
        if residual > TOLERANCES.derivative_completeness {
            return Err(Error::StepTooLarge(residual));
        }
    }
    Ok(derivs)
}

/// `‖Σ (K̇†K + K†K̇)‖`, which vanishes for exact derivatives.
pub fn differentiated_completeness(kraus: &KrausFamily, first: &[CMat]) -> f64 {
    let d = kraus.dim();
    let mut acc = CMat::zeros(d, d);
    for (k, dk) in kraus.ops().iter().zip(first) {
        acc += dk.adjoint() * k + k.adjoint() * dk;
    }
    linalg::norm(&acc)
}

/// `Σ_j Tr(ρ K̇_j† K_j)`.
pub fn gauge_functional(kraus: &KrausFamily, first: &[CMat], rho: &DensityMatrix) -> C64 {
    kraus
        .ops()
        .iter()
        .zip(first)
        .map(|(k, dk)| rho.expect(&(dk.adjoint() * k)))
        .sum()
}

/// Derivatives after the phase change `K_j → e^{iγ(θ)} K_j` that enforces
/// `Σ_j Tr(ρ K̇_j† K_j) = 0`.
#[derive(Debug, Clone)]
pub struct GaugeFixed {
    pub first: Vec<CMat>,
    pub second: Option<Vec<CMat>>,
    /// Phase velocity γ̇ that was added.
    pub phase_rate: f64,
}

pub fn gauge_fix(
    kraus: &KrausFamily,
    first: &[CMat],
    second: Option<&[CMat]>,
    rho: &DensityMatrix,
) -> Result<GaugeFixed> {
    let d = kraus.dim();
    if rho.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: rho.dim() });
    }
    if first.len() != kraus.ops().len() {
        return Err(Error::InvalidKraus("derivative count mismatch".into()));
    }
    // K̇ → K̇ + iγ̇K shifts the functional by −iγ̇.
    let g = gauge_functional(kraus, first, rho).im;
    let ig = I * g;
    let fixed_first: Vec<CMat> = first
        .iter()
        .zip(kraus.ops())
        .map(|(dk, k)| dk + k * ig)
        .collect();
    let fixed_second = second.map(|dd| {
        dd.iter()
            .zip(first)
            .zip(kraus.ops())
            .map(|((ddk, dk), k)| ddk + dk * (ig * 2.0) - k * c(g * g, 0.0))
            .collect()
    });
    Ok(GaugeFixed { first: fixed_first, second: fixed_second, phase_rate: g })
}

/// Everything at a single parameter value that the Fisher and absorber
/// computations need: Kraus operators, stationary state, gauge-fixed
/// first and second derivatives.
#[derive(Debug, Clone)]
pub struct LocalExpansion {
    pub theta: f64,
    pub kraus: KrausFamily,
    pub stationary: DensityMatrix,
    pub first: Vec<CMat>,
    pub second: Vec<CMat>,
    pub phase_rate: f64,
}

impl LocalExpansion {
    pub fn at<M: ParametricModel + ?Sized>(model: &M, theta: f64) -> Result<Self> {
        let kraus = model.kraus_at(theta)?;
        let stationary = stationary_state(&kraus)?;
        let first = kraus_derivatives(model, theta, DerivativeOrder::First)?;
        let second = kraus_derivatives(model, theta, DerivativeOrder::Second)?;
        let fixed = gauge_fix(&kraus, &first, Some(&second), &stationary)?;
        Ok(Self {
            theta,
            kraus,
            stationary,
            first: fixed.first,
            second: fixed.second.expect("second derivatives supplied"),
            phase_rate: fixed.phase_rate,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CVec, ONE, ZERO};
    use crate::models::{amplitude_damping, RotationQubit};

    fn diag(a: f64, b: f64) -> CMat {
        CMat::from_row_slice(2, 2, &[c(a, 0.0), ZERO, ZERO, c(b, 0.0)])
    }

    #[test]
    fn heisenberg_identity_is_fixed() {
        let k = RotationQubit::default().kraus_at(0.2).unwrap();
        let out = transition_apply(&k, &linalg::identity(2), Picture::Heisenberg).unwrap();
        assert!(linalg::norm(&(out - linalg::identity(2))) < 1e-12);
    }

    #[test]
    fn amplitude_damping_half_excited() {
        let k = amplitude_damping(0.5);
        let out = transition_apply(&k, &diag(0.0, 1.0), Picture::Schrodinger).unwrap();
        assert!(linalg::norm(&(out - diag(0.5, 0.5))) < 1e-12);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let k = amplitude_damping(0.5);
        let err = transition_apply(&k, &linalg::identity(3), Picture::Schrodinger).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn amplitude_damping_stationary_is_ground() {
        let rho = stationary_state(&amplitude_damping(0.5)).unwrap();
        assert!(linalg::norm(&(rho.matrix() - diag(1.0, 0.0))) < 1e-10);
    }

    #[test]
    fn unitary_channel_is_not_primitive() {
        let u = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let k = KrausFamily::new(u, CMat::zeros(2, 2)).unwrap();
        assert!(matches!(stationary_state(&k), Err(Error::NotPrimitive(_))));
        assert!(matches!(spectral_gap(&k), Err(Error::NotPrimitive(_))));
    }

    #[test]
    fn depolarizing_gap_is_one() {
        let half = c(0.5, 0.0);
        let x = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]) * half;
        let y = CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]) * half;
        let z = diag(1.0, -1.0) * half;
        let id = linalg::identity(2) * half;
        let k = KrausFamily::from_ops(vec![id, x, y, z]).unwrap();
        assert!((spectral_gap(&k).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn amplitude_damping_gap_is_coherence_decay() {
        for p in [0.2, 0.5, 0.9] {
            let gap = spectral_gap(&amplitude_damping(p)).unwrap();
            let expected = 1.0 - (1.0 - p).sqrt();
            assert!((gap - expected).abs() < 1e-10, "p={p}: {gap} vs {expected}");
        }
    }

    #[test]
    fn resolvent_rejects_uncentered_and_maps_zero() {
        let k = RotationQubit::default().kraus_at(0.2).unwrap();
        assert!(matches!(
            resolvent_apply(&k, &linalg::identity(2)),
            Err(Error::InputNotCentered(_))
        ));
        let y = resolvent_apply(&k, &CMat::zeros(2, 2)).unwrap();
        assert!(linalg::norm(&y) < 1e-14);
    }

    struct PhaseOnly;
    impl ParametricModel for PhaseOnly {
        fn kraus_at(&self, theta: f64) -> Result<KrausFamily> {
            let base = amplitude_damping(0.3);
            let k0 = base.k0() * C64::from_polar(1.0, theta);
            KrausFamily::new(k0, base.k1().clone())
        }
        fn domain(&self) -> (f64, f64) {
            (-1.0, 1.0)
        }
    }

    #[test]
    fn pure_phase_family_gauge_fixes_to_zero_contribution() {
        let m = PhaseOnly;
        let k = m.kraus_at(0.1).unwrap();
        let raw = kraus_derivatives(&m, 0.1, DerivativeOrder::First).unwrap();
        assert!(linalg::norm(&(&raw[0] - k.k0() * I)) < 1e-8);
        let rho = stationary_state(&k).unwrap();
        let fixed = gauge_fix(&k, &raw, None, &rho).unwrap();
        assert!(gauge_functional(&k, &fixed.first, &rho).norm() < 1e-10);
        // ρ_ss = |0⟩⟨0| and K_1 annihilates it, so the phase rate is all of K̇_0.
        assert!(linalg::norm(&fixed.first[0]) < 1e-8);
    }

    #[test]
    fn gauge_fix_is_idempotent() {
        let m = RotationQubit::default();
        let k = m.kraus_at(0.2).unwrap();
        let rho = stationary_state(&k).unwrap();
        let raw = kraus_derivatives(&m, 0.2, DerivativeOrder::First).unwrap();
        let once = gauge_fix(&k, &raw, None, &rho).unwrap();
        let twice = gauge_fix(&k, &once.first, None, &rho).unwrap();
        assert!(twice.phase_rate.abs() < 1e-12);
        for (a, b) in once.first.iter().zip(&twice.first) {
            assert!(linalg::norm(&(a - b)) < 1e-12);
        }
        let g = gauge_functional(&k, &once.first, &rho);
        assert!(g.im.abs() < 1e-12);
        assert!(g.norm() < 1e-10);
    }

    #[test]
    fn step_too_large_detected() {
        let m = RotationQubit::default();
        let err = kraus_derivatives_with_step(&m, 0.2, DerivativeOrder::First, 0.3, 0.0);
        assert!(matches!(err, Err(Error::StepTooLarge(_)) | Err(Error::InvalidKraus(_))));
    }

    #[test]
    fn pure_density_matrix() {
        let psi = CVec::from_vec(vec![ONE, I]);
        let rho = DensityMatrix::pure(&psi).unwrap();
        assert!((rho.matrix()[(0, 1)] - c(0.0, -0.5)).norm() < 1e-15);
        assert!(DensityMatrix::new(diag(0.5, 0.6)).is_err());
        assert!(DensityMatrix::new(diag(1.2, -0.2)).is_err());
    }
}
