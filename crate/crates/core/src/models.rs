//! Built-in parametric models.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, C64, ZERO};
use crate::qmc::{KrausFamily, ParametricModel};

/// Qubit system coupled to qubit noise units with
///
/// ```text
/// U|00⟩ = cos θ √(1−θ²)|00⟩ + i sin θ √(1−θ²)|10⟩ + θ|11⟩
/// U|10⟩ = i sin θ √(1−λ)|00⟩ + cos θ √(1−λ)|10⟩ + √λ e^{iφ}|01⟩
/// ```
///
/// (system first, noise unit second).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationQubit {
    pub lambda: f64,
    pub phi: f64,
}

impl Default for RotationQubit {
    fn default() -> Self {
        Self { lambda: 0.8, phi: std::f64::consts::FRAC_PI_4 }
    }
}

impl RotationQubit {
    pub const THETA_TRUE: f64 = 0.2;
}

impl ParametricModel for RotationQubit {
    fn kraus_at(&self, theta: f64) -> Result<KrausFamily> {
        if theta.abs() >= 1.0 {
            return Err(Error::OutOfDomain { theta, lo: -1.0, hi: 1.0, margin: 0.0 });
        }
        let a = (1.0 - theta * theta).sqrt();
        let b = (1.0 - self.lambda).sqrt();
        let (s, co) = theta.sin_cos();
        // columns: image of |0_S⟩ and |1_S⟩
        let k0 = CMat::from_row_slice(2, 2, &[c(co * a, 0.0), c(0.0, s * b), c(0.0, s * a), c(co * b, 0.0)]);
        let k1 = CMat::from_row_slice(
            2,
            2,
            &[ZERO, C64::from_polar(self.lambda.sqrt(), self.phi), c(theta, 0.0), ZERO],
        );
        KrausFamily::new(k0, k1)
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, 0.9)
    }
}

/// `K_0 = diag(1, √(1−p))`, `K_1 = √p |0⟩⟨1|`.
pub fn amplitude_damping(p: f64) -> KrausFamily {
    let k0 = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), ZERO, ZERO, c((1.0 - p).sqrt(), 0.0)]);
    let k1 = CMat::from_row_slice(2, 2, &[ZERO, c(p.sqrt(), 0.0), ZERO, ZERO]);
    KrausFamily::new(k0, k1).expect("amplitude damping is complete")
}

/// A model that ignores θ.
#[derive(Debug, Clone)]
pub struct ConstantModel {
    pub kraus: KrausFamily,
    pub domain: (f64, f64),
}

impl ParametricModel for ConstantModel {
    fn kraus_at(&self, _theta: f64) -> Result<KrausFamily> {
        Ok(self.kraus.clone())
    }
    fn domain(&self) -> (f64, f64) {
        self.domain
    }
}

/// Kraus operators read off a unitary on system ⊗ noise (noise index least
/// significant): `⟨s'|K_i|s⟩ = ⟨s' i|U|s 0⟩`.
pub fn kraus_from_unitary(u: &CMat, d: usize) -> Result<KrausFamily> {
    let ops = (0..2)
        .map(|i| CMat::from_fn(d, d, |sp, s| u[(sp * 2 + i, s * 2)]))
        .collect();
    KrausFamily::from_ops(ops)
}

/// `U_θ = exp(iθH) U_0` for a seeded random Hermitian `H` and Haar-like `U_0`.
#[derive(Debug, Clone)]
pub struct RandomUnitaryModel {
    d: usize,
    base: CMat,
    generator: CMat,
}

impl RandomUnitaryModel {
    pub fn new(d: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2 * d;
        let gauss = |rng: &mut ChaCha8Rng| {
            CMat::from_fn(n, n, |_, _| {
                c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
            })
        };
        let a = gauss(&mut rng);
        let base = a.qr().q();
        let g = gauss(&mut rng);
        let generator = (&g + g.adjoint()) * c(0.5, 0.0);
        Self { d, base, generator }
    }

    /// First model in the seeded sequence whose channel at `theta` is primitive.
    pub fn primitive(d: usize, seed: u64, theta: f64) -> Self {
        let mut s = seed;
        loop {
            let m = Self::new(d, s);
            if let Ok(k) = m.kraus_at(theta) {
                let ok = crate::qmc::spectral_gap(&k).map(|g| g > 0.05).unwrap_or(false)
                    && crate::qmc::stationary_state(&k)
                        .map(|r| linalg::hermitian_eigen(r.matrix()).0.last().copied().unwrap_or(0.0) > 1e-3)
                        .unwrap_or(false);
                if ok {
                    return m;
                }
            }
            s = s.wrapping_add(0x9E37_79B9_7F4A_7C15);
        }
    }
}

impl ParametricModel for RandomUnitaryModel {
    fn kraus_at(&self, theta: f64) -> Result<KrausFamily> {
        let u = linalg::expi_hermitian(&(&self.generator * c(theta, 0.0))) * &self.base;
        kraus_from_unitary(&u, self.d)
    }
    fn domain(&self) -> (f64, f64) {
        (-10.0, 10.0)
    }
}

/// One row of a Kraus table: θ and the two operators in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausTableEntry {
    pub theta: f64,
    /// `[re, im]` pairs, row-major, for `K_0`.
    pub k0: Vec<[f64; 2]>,
    pub k1: Vec<[f64; 2]>,
}

/// User-supplied Kraus operators on a θ grid. Entries are interpolated with
/// Catmull–Rom splines and the result is re-normalised by
/// `K_i ↦ K_i (Σ K†K)^{-1/2}` so every interpolated family is complete.
#[derive(Debug, Clone)]
pub struct TabulatedModel {
    d: usize,
    thetas: Vec<f64>,
    tables: Vec<[CMat; 2]>,
}

impl TabulatedModel {
    pub fn new(d: usize, mut entries: Vec<KrausTableEntry>) -> Result<Self> {
        if entries.len() < 4 {
            return Err(Error::Config("Kraus table needs at least 4 grid points".into()));
        }
        entries.sort_by(|a, b| a.theta.total_cmp(&b.theta));
        let to_mat = |v: &[[f64; 2]]| -> Result<CMat> {
            if v.len() != d * d {
                return Err(Error::DimensionMismatch { expected: d * d, got: v.len() });
            }
            Ok(CMat::from_row_iterator(d, d, v.iter().map(|p| c(p[0], p[1]))))
        };
        let mut thetas = Vec::new();
        let mut tables = Vec::new();
        for e in &entries {
            let k0 = to_mat(&e.k0)?;
            let k1 = to_mat(&e.k1)?;
            KrausFamily::new(k0.clone(), k1.clone())?;
            thetas.push(e.theta);
            tables.push([k0, k1]);
        }
        if thetas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("duplicate θ in Kraus table".into()));
        }
        Ok(Self { d, thetas, tables })
    }

    /// Samples another model onto a grid (useful for tests and file export).
    pub fn sample<M: ParametricModel>(model: &M, grid: &[f64]) -> Result<Vec<KrausTableEntry>> {
        grid.iter()
            .map(|&t| {
                let k = model.kraus_at(t)?;
                let flat = |m: &CMat| {
                    (0..m.nrows())
                        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
                        .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
                        .collect()
                };
                Ok(KrausTableEntry { theta: t, k0: flat(k.k0()), k1: flat(k.k1()) })
            })
            .collect()
    }
}

impl ParametricModel for TabulatedModel {
    fn kraus_at(&self, theta: f64) -> Result<KrausFamily> {
        let (lo, hi) = self.domain();
        if !(theta >= lo && theta <= hi) {
            return Err(Error::OutOfDomain { theta, lo, hi, margin: 0.0 });
        }
        let n = self.thetas.len();
        let seg = match self.thetas.iter().position(|&t| t > theta) {
            Some(0) => 0,
            Some(i) => i - 1,
            None => n - 2,
        }
        .min(n - 2);
        let (t0, t1) = (self.thetas[seg], self.thetas[seg + 1]);
        let s = (theta - t0) / (t1 - t0);
        let idx = |i: isize| i.clamp(0, n as isize - 1) as usize;
        let p = [idx(seg as isize - 1), seg, seg + 1, idx(seg as isize + 2)];
        // Catmull–Rom basis on the local segment.
        let w = [
            0.5 * (-s * s * s + 2.0 * s * s - s),
            0.5 * (3.0 * s * s * s - 5.0 * s * s + 2.0),
            0.5 * (-3.0 * s * s * s + 4.0 * s * s + s),
            0.5 * (s * s * s - s * s),
        ];
        let mut ops = Vec::with_capacity(2);
        for i in 0..2 {
            let mut m = CMat::zeros(self.d, self.d);
            for (pi, wi) in p.iter().zip(w) {
                m += &self.tables[*pi][i] * c(wi, 0.0);
            }
            ops.push(m);
        }
        let mut gram = CMat::zeros(self.d, self.d);
        for k in &ops {
            gram += k.adjoint() * k;
        }
        let inv_sqrt = linalg::psd_sqrt(&gram)
            .try_inverse()
            .ok_or_else(|| Error::NumericalDegeneracy("singular Kraus Gram matrix".into()))?;
        let ops = ops.into_iter().map(|k| k * &inv_sqrt).collect();
        KrausFamily::from_ops(ops)
    }

    fn domain(&self) -> (f64, f64) {
        (self.thetas[0], *self.thetas.last().unwrap())
    }
}

/// Model selection in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    RotationQubit {
        #[serde(default = "default_lambda")]
        lambda: f64,
        #[serde(default = "default_phi")]
        phi: f64,
    },
    KrausTable { dim: usize, entries: Vec<KrausTableEntry> },
}

fn default_lambda() -> f64 {
    RotationQubit::default().lambda
}

fn default_phi() -> f64 {
    RotationQubit::default().phi
}

impl Default for ModelSpec {
    fn default() -> Self {
        let p = RotationQubit::default();
        ModelSpec::RotationQubit { lambda: p.lambda, phi: p.phi }
    }
}

impl ModelSpec {
    pub fn build(&self) -> Result<AnyModel> {
        match self {
            ModelSpec::RotationQubit { lambda, phi } => {
                if !(0.0..=1.0).contains(lambda) || !phi.is_finite() {
                    return Err(Error::Config(format!("bad rotation-qubit parameters λ={lambda}, φ={phi}")));
                }
                Ok(AnyModel::Rotation(RotationQubit { lambda: *lambda, phi: *phi }))
            }
            ModelSpec::KrausTable { dim, entries } => Ok(AnyModel::Table(TabulatedModel::new(*dim, entries.clone())?)),
        }
    }
}

/// Either built-in model behind one type.
#[derive(Debug, Clone)]
pub enum AnyModel {
    Rotation(RotationQubit),
    Table(TabulatedModel),
}

impl ParametricModel for AnyModel {
    fn kraus_at(&self, theta: f64) -> Result<KrausFamily> {
        match self {
            AnyModel::Rotation(m) => m.kraus_at(theta),
            AnyModel::Table(m) => m.kraus_at(theta),
        }
    }

    fn domain(&self) -> (f64, f64) {
        match self {
            AnyModel::Rotation(m) => m.domain(),
            AnyModel::Table(m) => m.domain(),
        }
    }

    fn fd_step(&self) -> f64 {
        match self {
            AnyModel::Rotation(m) => m.fd_step(),
            AnyModel::Table(m) => m.fd_step(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_spec_json() {
        let spec: ModelSpec = serde_json::from_str(r#"{"kind":"rotation-qubit"}"#).unwrap();
        assert_eq!(spec, ModelSpec::default());
        let m = spec.build().unwrap();
        assert_eq!(m.kraus_at(0.2).unwrap(), RotationQubit::default().kraus_at(0.2).unwrap());
        let table = TabulatedModel::sample(&RotationQubit::default(), &[0.1, 0.15, 0.2, 0.25, 0.3]).unwrap();
        let spec = ModelSpec::KrausTable { dim: 2, entries: table };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<ModelSpec>(&text).unwrap(), spec);
        assert!(serde_json::from_str::<ModelSpec>(r#"{"kind":"rotation-qubit","lambda":2.0}"#).unwrap().build().is_err());
    }

    #[test]
    fn rotation_qubit_is_complete_across_domain() {
        let m = RotationQubit::default();
        for i in 1..90 {
            let k = m.kraus_at(i as f64 * 0.01).unwrap();
            assert!(k.completeness_residual() < 1e-12);
        }
    }

    #[test]
    fn random_models_are_unitary_dilations() {
        for seed in 0..5 {
            let m = RandomUnitaryModel::new(2, seed);
            assert!(m.kraus_at(0.3).unwrap().completeness_residual() < 1e-12);
        }
    }

    #[test]
    fn tabulated_model_tracks_source() {
        let src = RotationQubit::default();
        let grid: Vec<f64> = (0..=80).map(|i| 0.05 + i as f64 * 0.005).collect();
        let table = TabulatedModel::new(2, TabulatedModel::sample(&src, &grid).unwrap()).unwrap();
        let a = table.kraus_at(0.2013).unwrap();
        let b = src.kraus_at(0.2013).unwrap();
        assert!(linalg::norm(&(a.k0() - b.k0())) < 1e-6);
        assert!(a.completeness_residual() < 1e-10);
    }
}
