//! QFI rate, pattern-mode amplitudes μ_α, intensities λ_α and λ_tot.

use std::io::Write;

use crate::absorber::JointLocal;
use crate::config::TOLERANCES;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, C64};
use crate::patterns::Pattern;
use crate::qmc::{
    gauge_fix, DensityMatrix, KrausFamily, LocalExpansion, ParametricModel, Picture, Resolvent,
    Superoperator,
};

/// QFI rate of the output at `theta`.
pub fn qfi_rate<M: ParametricModel + ?Sized>(model: &M, theta: f64) -> Result<f64> {
    qfi_rate_local(&LocalExpansion::at(model, theta)?)
}

pub fn qfi_rate_local(local: &LocalExpansion) -> Result<f64> {
    qfi_rate_from(&local.kraus, &local.first, &local.stationary)
}

/// `4 Σ Tr(ρ K̇†K̇) + 8 Σ Tr(Im(K ρ K̇†) R(Im Σ K̇†K))` after gauge fixing
/// the supplied derivatives.
pub fn qfi_rate_from(kraus: &KrausFamily, first: &[CMat], rho: &DensityMatrix) -> Result<f64> {
    let fixed = gauge_fix(kraus, first, None, rho)?;
    let d = kraus.dim();
    let mut direct = 0.0;
    let mut source = CMat::zeros(d, d);
    for (k, dk) in kraus.ops().iter().zip(&fixed.first) {
        direct += rho.expect(&(dk.adjoint() * dk)).re;
        source += dk.adjoint() * k;
    }
    let y = Resolvent::new(kraus, rho.clone())?.apply(&linalg::herm_im(&source))?;
    let mut cross = 0.0;
    for (k, dk) in kraus.ops().iter().zip(&fixed.first) {
        let a = linalg::herm_im(&(k * rho.matrix() * dk.adjoint()));
        cross += linalg::trace_product(&a, &y).re;
    }
    let f = 4.0 * direct + 8.0 * cross;
    if !f.is_finite() || f < -1e-8 {
        return Err(Error::InternalInconsistency(format!("negative QFI rate {f:e}")));
    }
    Ok(f.max(0.0))
}

/// `(1 − K̃_0)^{-1}` on the orthogonal complement of χ, zero on χ.
pub fn restricted_inverse(k0: &CMat, chi: &CVec) -> Result<CMat> {
    let dim = k0.nrows();
    let proj = chi * chi.adjoint();
    let p = linalg::identity(dim) - &proj;
    let m = &p * (linalg::identity(dim) - k0) * &p + proj;
    let inv = linalg::inverse(&m)
        .ok_or_else(|| Error::NumericalDegeneracy("1 − K̃_0 singular off the absorber state".into()))?;
    Ok(inv * p)
}

/// Both evaluations of λ_tot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaTot {
    /// `‖(K̃_1 R K̃̇_0 + K̃̇_1) χ‖²`.
    pub norm_form: f64,
    /// `−Re ⟨χ, (2 K̃̇_0 R K̃̇_0 + K̃̈_0) χ⟩`.
    pub second_form: f64,
}

impl LambdaTot {
    pub fn value(&self) -> f64 {
        self.norm_form
    }

    pub fn discrepancy(&self) -> f64 {
        (self.norm_form - self.second_form).abs()
    }
}

/// Precomputed state for evaluating μ_α at one reference parameter.
#[derive(Debug, Clone)]
pub struct ModeCalculator {
    local: JointLocal,
    restricted: CMat,
    /// `(K̃_1 R K̃̇_0 + K̃̇_1) χ`; every μ_α is a matrix element of it.
    seed: CVec,
}

impl ModeCalculator {
    pub fn new(local: &JointLocal) -> Result<Self> {
        let g = local.gauge_residual().norm();
        if g > TOLERANCES.joint_gauge {
            return Err(Error::GaugeViolation(g));
        }
        let chi = local.chi();
        let restricted = restricted_inverse(local.k(0), chi)?;
        let seed = local.k(1) * (&restricted * (&local.first[0] * chi)) + &local.first[1] * chi;
        Ok(Self { local: local.clone(), restricted, seed })
    }

    pub fn local(&self) -> &JointLocal {
        &self.local
    }

    pub fn mu(&self, alpha: &Pattern) -> C64 {
        let mut v = self.seed.clone();
        for &b in &alpha.bits()[1..] {
            v = self.local.k(b as usize) * v;
        }
        linalg::inner(&v, self.local.chi())
    }

    pub fn lambda(&self, alpha: &Pattern) -> f64 {
        self.mu(alpha).norm_sqr()
    }

    pub fn lambda_tot(&self) -> Result<LambdaTot> {
        let chi = self.local.chi();
        let norm_form = linalg::vec_norm(&self.seed).powi(2);
        let d0 = &self.local.first[0];
        let m = d0 * &self.restricted * d0 * c(2.0, 0.0) + &self.local.second[0];
        let second_form = -linalg::inner(chi, &(m * chi)).re;
        let out = LambdaTot { norm_form, second_form };
        if out.discrepancy() > TOLERANCES.lambda_tot_agreement {
            return Err(Error::InternalInconsistency(format!(
                "lambda_tot forms disagree: {norm_form} vs {second_form}"
            )));
        }
        Ok(out)
    }

    /// Spectral radius of `K̃_0` on the complement of χ.
    pub fn restricted_radius(&self) -> f64 {
        let chi = self.local.chi();
        let dim = chi.len();
        let p = linalg::identity(dim) - chi * chi.adjoint();
        linalg::eigenvalues(&(&p * self.local.k(0) * &p))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

pub fn mu_alpha(local: &JointLocal, alpha: &Pattern) -> Result<C64> {
    Ok(ModeCalculator::new(local)?.mu(alpha))
}

pub fn lambda_tot(local: &JointLocal) -> Result<LambdaTot> {
    ModeCalculator::new(local)?.lambda_tot()
}

/// μ_α through Heisenberg-picture superoperators,
/// `⟨χ| (Ṫ R A^α + Ã^α)(1) |χ⟩`.
pub fn mu_alpha_superop(local: &JointLocal, alpha: &Pattern) -> Result<C64> {
    let g = local.gauge_residual().norm();
    if g > TOLERANCES.joint_gauge {
        return Err(Error::GaugeViolation(g));
    }
    let (k0, k1) = (local.k(0), local.k(1));
    let (d0, d1) = (&local.first[0], &local.first[1]);
    let dim = k0.nrows();
    let a0 = Superoperator::from_kraus(local.joint.kraus(), Picture::Heisenberg);
    let a1 = Superoperator::sandwich(&k1.adjoint(), k0);
    let a1_dot = Superoperator::from_matrix(
        dim,
        Superoperator::sandwich(&d1.adjoint(), k0).matrix()
            + Superoperator::sandwich(&k1.adjoint(), d0).matrix(),
    );
    let t_dot = Superoperator::from_matrix(
        dim,
        [(k0, d0), (k1, d1)]
            .iter()
            .map(|(k, d)| {
                Superoperator::sandwich(&d.adjoint(), k).matrix()
                    + Superoperator::sandwich(&k.adjoint(), d).matrix()
            })
            .fold(CMat::zeros(dim * dim, dim * dim), |acc, m| acc + m),
    );
    let pick = |b: bool| if b { &a1 } else { &a0 };
    let mut tail = linalg::identity(dim);
    for &b in alpha.bits()[1..].iter().rev() {
        tail = pick(b).apply(&tail);
    }
    let full = a1.apply(&tail);
    let dotted = a1_dot.apply(&tail);
    let chi = local.chi();
    let rho = DensityMatrix::pure(chi)?;
    let resolved = Resolvent::new(local.joint.kraus(), rho)?.apply(&full)?;
    let y = t_dot.apply(&resolved) + dotted;
    Ok(linalg::inner(chi, &(y * chi)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeEntry {
    pub pattern: Pattern,
    pub mu: C64,
    pub lambda: f64,
}

/// μ_α and λ_α for every pattern up to a length, ordered by binary value.
#[derive(Debug, Clone)]
pub struct ModeTable {
    pub theta_ref: f64,
    pub truncation: usize,
    pub entries: Vec<ModeEntry>,
    pub lambda_tot: LambdaTot,
}

impl ModeTable {
    pub fn lambda(&self, alpha: &Pattern) -> Option<f64> {
        self.entries
            .binary_search_by(|e| e.pattern.cmp(alpha))
            .ok()
            .map(|i| self.entries[i].lambda)
    }

    pub fn partial_sum(&self) -> f64 {
        self.entries.iter().map(|e| e.lambda).sum()
    }

    /// Σ_{|α|≤len} λ_α.
    pub fn partial_sum_up_to(&self, len: usize) -> f64 {
        self.entries.iter().filter(|e| e.pattern.len() <= len).map(|e| e.lambda).sum()
    }

    pub fn residual(&self) -> f64 {
        self.lambda_tot.value() - self.partial_sum()
    }

    /// Columns `pattern,re_mu,im_mu,lambda,cumulative`, the last being the
    /// running sum of λ divided by λ_tot.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        wr.write_record(["pattern", "re_mu", "im_mu", "lambda", "cumulative"])?;
        let tot = self.lambda_tot.value();
        let mut acc = 0.0;
        for e in &self.entries {
            acc += e.lambda;
            let frac = if tot > 0.0 { acc / tot } else { 0.0 };
            wr.write_record([
                e.pattern.to_string(),
                format!("{:.12e}", e.mu.re),
                format!("{:.12e}", e.mu.im),
                format!("{:.12e}", e.lambda),
                format!("{frac:.12}"),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

pub fn mode_table(local: &JointLocal, max_len: usize) -> Result<ModeTable> {
    if max_len == 0 {
        return Err(Error::BadTruncation(0));
    }
    let calc = ModeCalculator::new(local)?;
    let lambda_tot = calc.lambda_tot()?;
    let chi = local.chi();
    let mut entries = Vec::new();
    // Depth-first over prefixes; the vector for prefix w is K̃_{w_L}…K̃_{w_2} seed.
    let mut stack = vec![(vec![true], calc.seed.clone())];
    while let Some((bits, v)) = stack.pop() {
        if *bits.last().unwrap() {
            let mu = linalg::inner(&v, chi);
            entries.push(ModeEntry {
                pattern: Pattern::new(bits.clone())?,
                mu,
                lambda: mu.norm_sqr(),
            });
        }
        if bits.len() < max_len {
            for b in [false, true] {
                let mut next = bits.clone();
                next.push(b);
                stack.push((next, local.k(b as usize) * &v));
            }
        }
    }
    entries.sort_by(|a, b| a.pattern.cmp(&b.pattern));
    Ok(ModeTable { theta_ref: local.joint.theta_ref(), truncation: max_len, entries, lambda_tot })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::absorber::{joint_parametric, Completion};
    use crate::models::{amplitude_damping, ConstantModel, RotationQubit};

    #[test]
    fn rotation_qubit_qfi_rate() {
        let f = qfi_rate(&RotationQubit::default(), 0.2).unwrap();
        assert!((f - 13.4015).abs() < 1e-3, "{f}");
    }

    #[test]
    fn constant_model_has_zero_information() {
        let m = ConstantModel { kraus: amplitude_damping(0.4), domain: (-1.0, 1.0) };
        let k = m.kraus_at(0.0).unwrap();
        let rho = crate::qmc::stationary_state(&k).unwrap();
        let zero = vec![CMat::zeros(2, 2), CMat::zeros(2, 2)];
        assert_eq!(qfi_rate_from(&k, &zero, &rho).unwrap(), 0.0);
    }

    #[test]
    fn mode_forms_agree_and_sum_to_lambda_tot() {
        let jp = joint_parametric(RotationQubit::default(), 0.2, Completion::default()).unwrap();
        let local = jp.local().unwrap();
        let calc = ModeCalculator::new(&local).unwrap();
        for alpha in Pattern::all_up_to(5) {
            let a = calc.mu(&alpha);
            let b = mu_alpha_superop(&local, &alpha).unwrap();
            assert!((a - b).norm() < 1e-8, "{alpha}: {a} vs {b}");
        }
        let lt = calc.lambda_tot().unwrap();
        assert!(lt.discrepancy() < 1e-6);
        let f = qfi_rate(&RotationQubit::default(), 0.2).unwrap();
        assert!((4.0 * lt.value() - f).abs() < 1e-5, "{} vs {f}", 4.0 * lt.value());
    }

    #[test]
    fn table_lists_short_patterns_in_order() {
        let jp = joint_parametric(RotationQubit::default(), 0.2, Completion::default()).unwrap();
        let t = mode_table(&jp.local().unwrap(), 3).unwrap();
        let names: Vec<String> = t.entries.iter().map(|e| e.pattern.to_string()).collect();
        assert_eq!(names, ["1", "11", "101", "111"]);
        assert!(matches!(mode_table(&jp.local().unwrap(), 0), Err(Error::BadTruncation(0))));
    }
}
