//! Coherent absorber construction.
//!
//! Given a primitive system channel with stationary state `ρ = Σ λ_i |e_i⟩⟨e_i|`,
//! the absorber is a `d`-level system coupled to each output unit after the
//! system so that system + absorber have the pure stationary state
//! `χ = Σ √λ_i |e_i⟩ ⊗ |i⟩`. Joint indices are `system * d + absorber`;
//! absorber ⊗ noise indices are `absorber * 2 + noise`.

use crate::config::TOLERANCES;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, C64};
use crate::qmc::{self, DensityMatrix, KrausFamily, LocalExpansion, ParametricModel};

/// `χ = Σ_i √λ_i |e_i⟩ ⊗ |i_A⟩` for `ρ = Σ_i λ_i |e_i⟩⟨e_i|`.
#[derive(Debug, Clone)]
pub struct Purification {
    d: usize,
    chi: CVec,
    eigenvalues: Vec<f64>,
    /// Eigenvectors of ρ as columns, same order as `eigenvalues`.
    basis: CMat,
}

impl Purification {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn chi(&self) -> &CVec {
        &self.chi
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    /// `Tr_A |χ⟩⟨χ|`.
    pub fn reduced_system_state(&self) -> CMat {
        let d = self.d;
        CMat::from_fn(d, d, |s, t| (0..d).map(|a| self.chi[s * d + a] * self.chi[t * d + a].conj()).sum())
    }
}

/// Eigenvalues sorted decreasing; eigenvector phases fixed by making the
/// largest-modulus entry real positive.
pub fn purify(rho: &DensityMatrix) -> Result<Purification> {
    let d = rho.dim();
    let (eigenvalues, basis) = linalg::hermitian_eigen(rho.matrix());
    let min = eigenvalues.last().copied().unwrap_or(0.0);
    if min < TOLERANCES.min_eigenvalue {
        return Err(Error::RankDeficient(min));
    }
    let mut chi = CVec::zeros(d * d);
    for s in 0..d {
        for a in 0..d {
            chi[s * d + a] = basis[(s, a)] * eigenvalues[a].sqrt();
        }
    }
    Ok(Purification { d, chi, eigenvalues, basis })
}

/// How the outcome-1 rows of the absorber unitary are chosen. The outcome-0
/// rows are fixed by the system channel; the rest is free up to a unitary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Completion {
    /// Gram–Schmidt of the standard basis (lexicographic) against the fixed rows.
    GramSchmidt,
    /// `V_{11} = |V_{11}|` positive, `V_{10}` fixed by orthogonality.
    Polar,
    /// Completion maximising the spectral gap of the joint channel.
    #[default]
    MaxGap,
}

/// Unitary on absorber ⊗ noise unit.
#[derive(Debug, Clone)]
pub struct AbsorberUnitary {
    d: usize,
    v: CMat,
}

impl AbsorberUnitary {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &CMat {
        &self.v
    }

    /// Block `V_{kl} = ⟨k_N|V|l_N⟩` acting on the absorber.
    pub fn block(&self, k: usize, l: usize) -> CMat {
        CMat::from_fn(self.d, self.d, |i, j| self.v[(i * 2 + k, j * 2 + l)])
    }

    pub fn unitarity_residual(&self) -> f64 {
        let n = 2 * self.d;
        linalg::norm(&(self.v.adjoint() * &self.v - CMat::identity(n, n)))
    }

    fn from_blocks(blocks: [[CMat; 2]; 2]) -> Self {
        let d = blocks[0][0].nrows();
        let v = CMat::from_fn(2 * d, 2 * d, |r, col| blocks[r % 2][col % 2][(r / 2, col / 2)]);
        Self { d, v }
    }
}

/// Row vectors `v_i = Σ_{k,j} √(λ_j/λ_i) ⟨e_i|K_k|e_j⟩ |j_A⟩⊗|k_N⟩`.
pub fn absorber_rows(kraus: &KrausFamily, pur: &Purification) -> Result<Vec<CVec>> {
    let d = kraus.dim();
    if pur.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: pur.dim() });
    }
    if !kraus.is_binary() {
        return Err(Error::InvalidKraus("absorbers need a binary Kraus family".into()));
    }
    let rotated: Vec<CMat> = kraus
        .ops()
        .iter()
        .map(|k| pur.basis.adjoint() * k * &pur.basis)
        .collect();
    let lam = &pur.eigenvalues;
    Ok((0..d)
        .map(|i| {
            let mut v = CVec::zeros(2 * d);
            for (k, kr) in rotated.iter().enumerate() {
                for j in 0..d {
                    v[j * 2 + k] = kr[(i, j)] * (lam[j] / lam[i]).sqrt();
                }
            }
            v
        })
        .collect())
}

fn outcome_zero_blocks(rows: &[CVec], d: usize) -> [CMat; 2] {
    let block = |l: usize| CMat::from_fn(d, d, |i, j| rows[i][j * 2 + l].conj());
    [block(0), block(1)]
}

fn gram_schmidt_absorber(rows: &[CVec], d: usize) -> Result<AbsorberUnitary> {
    let n = 2 * d;
    let mut basis: Vec<CVec> = rows.to_vec();
    for e in 0..n {
        if basis.len() == n {
            break;
        }
        let mut x = CVec::zeros(n);
        x[e] = c(1.0, 0.0);
        // two passes for numerical orthogonality
        for _ in 0..2 {
            for b in &basis {
                let p = linalg::inner(b, &x);
                x -= b * p;
            }
        }
        let nx = linalg::vec_norm(&x);
        if nx > TOLERANCES.gram_schmidt {
            basis.push(x / c(nx, 0.0));
        }
    }
    if basis.len() < n {
        return Err(Error::NumericalDegeneracy("Gram–Schmidt completion ran out of candidates".into()));
    }
    let v = CMat::from_fn(n, n, |r, col| {
        let (i, k) = (r / 2, r % 2);
        basis[k * d + i][col].conj()
    });
    Ok(AbsorberUnitary { d, v })
}

/// Moduli `|V_{10}|`, `|V_{11}|` and the fixed unitary `w` linking them.
struct PolarData {
    v0: [CMat; 2],
    abs10: CMat,
    abs11: CMat,
    w: CMat,
}

fn polar_data(rows: &[CVec], d: usize) -> Result<PolarData> {
    let v0 = outcome_zero_blocks(rows, d);
    let id = linalg::identity(d);
    let m10 = &id - v0[0].adjoint() * &v0[0];
    let m11 = &id - v0[1].adjoint() * &v0[1];
    for m in [&m10, &m11] {
        let min = linalg::hermitian_eigen(m).0.last().copied().unwrap_or(0.0);
        if min < TOLERANCES.min_eigenvalue {
            return Err(Error::NumericalDegeneracy(format!("1 − |V_0l|² is singular ({min:e})")));
        }
    }
    let abs10 = linalg::psd_sqrt(&m10);
    let abs11 = linalg::psd_sqrt(&m11);
    let inv10 = abs10.clone().try_inverse().ok_or_else(|| Error::NumericalDegeneracy("|V_10|".into()))?;
    let inv11 = abs11.clone().try_inverse().ok_or_else(|| Error::NumericalDegeneracy("|V_11|".into()))?;
    let w = -(inv10 * v0[0].adjoint() * &v0[1] * inv11);
    Ok(PolarData { v0, abs10, abs11, w })
}

impl PolarData {
    fn absorber(&self, u: &CMat) -> AbsorberUnitary {
        AbsorberUnitary::from_blocks([
            [self.v0[0].clone(), self.v0[1].clone()],
            [u * &self.abs10, u * &self.w * &self.abs11],
        ])
    }
}

fn joint_ops(kraus: &KrausFamily, v: &AbsorberUnitary) -> Vec<CMat> {
    (0..2)
        .map(|k| {
            let mut m = CMat::zeros(kraus.dim() * v.d, kraus.dim() * v.d);
            for l in 0..2 {
                m += linalg::kron(&kraus.ops()[l], &v.block(k, l));
            }
            m
        })
        .collect()
}

fn joint_gap(kraus: &KrausFamily, v: &AbsorberUnitary) -> f64 {
    KrausFamily::from_ops_unchecked(joint_ops(kraus, v))
        .and_then(|k| qmc::spectral_gap(&k))
        .unwrap_or(f64::NEG_INFINITY)
}

/// Canonical Gram–Schmidt completion.
pub fn build_absorber(kraus: &KrausFamily, pur: &Purification) -> Result<AbsorberUnitary> {
    build_absorber_with(kraus, pur, Completion::GramSchmidt)
}

pub fn build_absorber_with(
    kraus: &KrausFamily,
    pur: &Purification,
    completion: Completion,
) -> Result<AbsorberUnitary> {
    let d = kraus.dim();
    let rows = absorber_rows(kraus, pur)?;
    let v = match completion {
        Completion::GramSchmidt => gram_schmidt_absorber(&rows, d)?,
        Completion::Polar => {
            let p = polar_data(&rows, d)?;
            p.absorber(&p.w.adjoint())
        }
        Completion::MaxGap => max_gap_absorber(kraus, &rows, d)?,
    };
    let residual = v.unitarity_residual();
    if residual > 1e-9 {
        return Err(Error::NumericalDegeneracy(format!("absorber unitarity residual {residual:e}")));
    }
    Ok(v)
}

/// Deterministic search over the free unitary `u` in `V_{1l}`. Starts from
/// the Gram–Schmidt and polar completions and refines by compass search on
/// a Hermitian generator; stops once the joint gap reaches the system gap.
fn max_gap_absorber(kraus: &KrausFamily, rows: &[CVec], d: usize) -> Result<AbsorberUnitary> {
    let gs = gram_schmidt_absorber(rows, d)?;
    let polar = match polar_data(rows, d) {
        Ok(p) => p,
        Err(_) => return Ok(gs),
    };
    let target = qmc::spectral_gap(kraus)? - 1e-9;
    let inv10 = polar.abs10.clone().try_inverse().expect("checked invertible");
    let u_gs = gs.block(1, 0) * inv10;
    let candidates = [polar.w.adjoint(), linalg::identity(d), u_gs];
    let mut best_u = candidates[0].clone();
    let mut best = f64::NEG_INFINITY;
    for u in candidates {
        let g = joint_gap(kraus, &polar.absorber(&u));
        if g > best + 1e-12 {
            best = g;
            best_u = u;
        }
    }
    if best >= target {
        return Ok(polar.absorber(&best_u));
    }
    let generators = hermitian_basis(d);
    let mut step = 0.5;
    let mut evals = 0;
    while step > 1e-4 && evals < 4000 && best < target {
        let mut improved = false;
        for g in &generators {
            for sign in [1.0, -1.0] {
                let u = linalg::expi_hermitian(&(g * c(sign * step, 0.0))) * &best_u;
                let gap = joint_gap(kraus, &polar.absorber(&u));
                evals += 1;
                if gap > best + 1e-12 {
                    best = gap;
                    best_u = u;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(polar.absorber(&best_u))
}

fn hermitian_basis(d: usize) -> Vec<CMat> {
    let mut out = Vec::new();
    for i in 0..d {
        for j in i..d {
            let mut m = CMat::zeros(d, d);
            if i == j {
                m[(i, i)] = c(1.0, 0.0);
                out.push(m);
            } else {
                m[(i, j)] = c(1.0, 0.0);
                m[(j, i)] = c(1.0, 0.0);
                out.push(m.clone());
                let mut n = CMat::zeros(d, d);
                n[(i, j)] = c(0.0, -1.0);
                n[(j, i)] = c(0.0, 1.0);
                out.push(n);
            }
        }
    }
    out
}

/// System + absorber chain at the reference parameter.
#[derive(Debug, Clone)]
pub struct JointModel {
    kraus: KrausFamily,
    purification: Purification,
    absorber: AbsorberUnitary,
    theta_ref: f64,
}

impl JointModel {
    pub fn kraus(&self) -> &KrausFamily {
        &self.kraus
    }

    pub fn chi(&self) -> &CVec {
        self.purification.chi()
    }

    pub fn purification(&self) -> &Purification {
        &self.purification
    }

    pub fn absorber(&self) -> &AbsorberUnitary {
        &self.absorber
    }

    pub fn theta_ref(&self) -> f64 {
        self.theta_ref
    }

    /// `(‖K̃_0χ − χ‖, ‖K̃_1χ‖, ‖K̃_0†χ − χ‖, completeness residual)`.
    pub fn identity_residuals(&self) -> [f64; 4] {
        let chi = self.chi();
        [
            linalg::vec_norm(&(self.kraus.k0() * chi - chi)),
            linalg::vec_norm(&(self.kraus.k1() * chi)),
            linalg::vec_norm(&(self.kraus.k0().adjoint() * chi - chi)),
            self.kraus.completeness_residual(),
        ]
    }
}

/// `K̃_k = Σ_l K_l ⊗ V_{kl}`.
pub fn joint_kraus(
    v: &AbsorberUnitary,
    kraus: &KrausFamily,
    pur: &Purification,
    theta_ref: f64,
) -> Result<JointModel> {
    if v.dim() != kraus.dim() || pur.dim() != kraus.dim() {
        return Err(Error::DimensionMismatch { expected: kraus.dim(), got: v.dim() });
    }
    let joint = KrausFamily::from_ops(joint_ops(kraus, v))?;
    let model = JointModel { kraus: joint, purification: pur.clone(), absorber: v.clone(), theta_ref };
    let [r0, r1, r0a, _] = model.identity_residuals();
    if r1 > TOLERANCES.absorber {
        return Err(Error::AbsorberMismatch(r1));
    }
    if r0 > TOLERANCES.absorber || r0a > TOLERANCES.absorber {
        return Err(Error::AbsorberMismatch(r0.max(r0a)));
    }
    Ok(model)
}

/// Joint Kraus operators and their gauge-fixed derivatives at the absorber
/// parameter.
#[derive(Debug, Clone)]
pub struct JointLocal {
    pub joint: JointModel,
    pub first: [CMat; 2],
    pub second: [CMat; 2],
}

impl JointLocal {
    pub fn chi(&self) -> &CVec {
        self.joint.chi()
    }

    pub fn k(&self, i: usize) -> &CMat {
        &self.joint.kraus().ops()[i]
    }

    /// `⟨χ|K̃̇_0 χ⟩`, zero in the gauge.
    pub fn gauge_residual(&self) -> C64 {
        linalg::inner(self.chi(), &(&self.first[0] * self.chi()))
    }
}

/// System parameter θ free, absorber frozen at `theta_abs`:
/// `θ ↦ (Σ_l K_{θ,l} ⊗ V_{kl})_k`.
#[derive(Debug, Clone)]
pub struct JointParametric<M> {
    model: M,
    local: LocalExpansion,
    absorber: AbsorberUnitary,
    purification: Purification,
    joint: JointModel,
}

pub fn joint_parametric<M: ParametricModel>(
    model: M,
    theta_abs: f64,
    completion: Completion,
) -> Result<JointParametric<M>> {
    if !model.contains(theta_abs, 2.0 * crate::config::DEFAULT_FD_STEP_SECOND) {
        return Err(Error::DomainExit(theta_abs));
    }
    let local = LocalExpansion::at(&model, theta_abs)?;
    let pur = purify(&local.stationary)?;
    let absorber = build_absorber_with(&local.kraus, &pur, completion)?;
    let joint = joint_kraus(&absorber, &local.kraus, &pur, theta_abs)?;
    Ok(JointParametric { model, local, absorber, purification: pur, joint })
}

impl<M: ParametricModel> JointParametric<M> {
    pub fn theta_abs(&self) -> f64 {
        self.local.theta
    }

    pub fn system_model(&self) -> &M {
        &self.model
    }

    pub fn system_local(&self) -> &LocalExpansion {
        &self.local
    }

    pub fn absorber(&self) -> &AbsorberUnitary {
        &self.absorber
    }

    pub fn purification(&self) -> &Purification {
        &self.purification
    }

    pub fn joint(&self) -> &JointModel {
        &self.joint
    }

    fn lift(&self, ops: &[CMat]) -> [CMat; 2] {
        let lift_k = |k: usize| {
            let mut m = CMat::zeros(self.joint.kraus.dim(), self.joint.kraus.dim());
            for (l, op) in ops.iter().enumerate() {
                m += linalg::kron(op, &self.absorber.block(k, l));
            }
            m
        };
        [lift_k(0), lift_k(1)]
    }

    /// Gauge-fixed joint derivatives at `theta_abs`, lifted from the
    /// gauge-fixed system derivatives.
    pub fn local(&self) -> Result<JointLocal> {
        let out = JointLocal {
            joint: self.joint.clone(),
            first: self.lift(&self.local.first),
            second: self.lift(&self.local.second),
        };
        let g = out.gauge_residual().norm();
        if g > TOLERANCES.joint_gauge {
            return Err(Error::GaugeViolation(g));
        }
        Ok(out)
    }

    /// Joint chain at a system parameter expressed in local units,
    /// `θ = θ_abs + u / √n`.
    pub fn kraus_local(&self, u: f64, n: f64) -> Result<KrausFamily> {
        self.kraus_at(self.theta_abs() + u / n.sqrt())
    }
}

impl<M: ParametricModel> ParametricModel for JointParametric<M> {
    fn kraus_at(&self, theta: f64) -> Result<KrausFamily> {
        let sys = self.model.kraus_at(theta)?;
        KrausFamily::from_ops(joint_ops(&sys, &self.absorber))
    }

    fn domain(&self) -> (f64, f64) {
        self.model.domain()
    }

    fn fd_step(&self) -> f64 {
        self.model.fd_step()
    }
}

/// Transpose, in the ρ eigenbasis, of the recovery-channel Kraus operator
/// `K'_l = √ρ K_l† √ρ^{-1}`. Equals the completion-independent block `V_{0l}`.
pub fn recovery_transpose(kraus: &KrausFamily, pur: &Purification, l: usize) -> CMat {
    let d = kraus.dim();
    let k = pur.basis.adjoint() * &kraus.ops()[l] * &pur.basis;
    let lam = &pur.eigenvalues;
    // K'_l = √ρ K_l† √ρ^{-1} in the eigenbasis, then transposed.
    let kp = CMat::from_fn(d, d, |i, j| k[(j, i)].conj() * (lam[i] / lam[j]).sqrt());
    kp.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::RotationQubit;

    fn diag(a: f64, b: f64) -> CMat {
        CMat::from_row_slice(2, 2, &[c(a, 0.0), crate::linalg::ZERO, crate::linalg::ZERO, c(b, 0.0)])
    }

    #[test]
    fn purify_maximally_mixed() {
        let p = purify(&DensityMatrix::maximally_mixed(2)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [s, 0.0, 0.0, s];
        for (z, e) in p.chi().iter().zip(expected) {
            assert!((z - c(e, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn purify_diagonal() {
        let p = purify(&DensityMatrix::new(diag(0.9, 0.1)).unwrap()).unwrap();
        let expected = [0.9f64.sqrt(), 0.0, 0.0, 0.1f64.sqrt()];
        for (z, e) in p.chi().iter().zip(expected) {
            assert!((z - c(e, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn purify_rejects_rank_deficient() {
        let err = purify(&DensityMatrix::new(diag(1.0, 0.0)).unwrap()).unwrap_err();
        assert!(matches!(err, Error::RankDeficient(_)));
    }

    #[test]
    fn rows_are_orthonormal_and_blocks_match_recovery() {
        let k = RotationQubit::default().kraus_at(0.2).unwrap();
        let pur = purify(&qmc::stationary_state(&k).unwrap()).unwrap();
        let rows = absorber_rows(&k, &pur).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let g = linalg::inner(&rows[i], &rows[j]);
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((g - c(e, 0.0)).norm() < 1e-10);
            }
        }
        for completion in [Completion::GramSchmidt, Completion::Polar, Completion::MaxGap] {
            let v = build_absorber_with(&k, &pur, completion).unwrap();
            assert!(v.unitarity_residual() < 1e-10);
            for l in 0..2 {
                let diff = v.block(0, l) - recovery_transpose(&k, &pur, l);
                assert!(linalg::norm(&diff) < 1e-9, "{completion:?} l={l}");
            }
        }
    }

    #[test]
    fn mismatched_purification_is_detected() {
        let m = RotationQubit::default();
        let k = m.kraus_at(0.2).unwrap();
        let pur = purify(&qmc::stationary_state(&m.kraus_at(0.5).unwrap()).unwrap()).unwrap();
        let own = purify(&qmc::stationary_state(&k).unwrap()).unwrap();
        let v = build_absorber(&k, &own).unwrap();
        assert!(matches!(joint_kraus(&v, &k, &pur, 0.2), Err(Error::AbsorberMismatch(_))));
    }
}
