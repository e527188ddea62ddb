//! Two-stage estimator: counting-rate preliminary estimate, displaced
//! absorber, pattern counting.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::absorber::{joint_parametric, Completion};
use crate::config::{DEFAULT_EPSILON, DEFAULT_FD_STEP_SECOND, DEFAULT_GAMMA};
use crate::error::{Error, Result};
use crate::fisher::{qfi_rate, ModeCalculator};
use crate::patterns::{default_separation, extract, Pattern};
use crate::qmc::{stationary_state, KrausFamily, ParametricModel, Resolvent};
use crate::stats;
use crate::trajectory::{count_ones_sequential, trajectory_rng, InitialState, JumpSampler};

/// Where the Fisher information entering `û` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FisherPoint {
    /// `4 λ_tot` at the absorber parameter.
    #[default]
    ThetaAbs,
    /// QFI rate at the preliminary estimate.
    ThetaTilde,
}

/// How the shorter second stage `n' = n − ñ` is accounted for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageTwoScaling {
    /// `f` multiplied by `n'/n`; `√n` used in the displacement and in `θ̂`.
    #[default]
    ScaledFisher,
    /// `f` unscaled; `√n'` used in the displacement and in `θ̂`.
    RootStageTwo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Total number of samples.
    pub n: usize,
    /// Exponent used to derive `ñ = ⌈n^{1−ε}⌉` and `τ = n^{3ε}`.
    pub epsilon: f64,
    /// Explicit stage-one length.
    pub stage_one: Option<usize>,
    /// Explicit displacement τ.
    pub tau: Option<f64>,
    pub gamma: f64,
    /// Skip stage one and use the true parameter as the preliminary estimate.
    pub ideal_stage_one: bool,
    pub completion: Completion,
    pub fisher_point: FisherPoint,
    pub scaling: StageTwoScaling,
    /// Allows τ = 0.
    pub diagnostic: bool,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            n: 100_000,
            epsilon: DEFAULT_EPSILON,
            stage_one: None,
            tau: None,
            gamma: DEFAULT_GAMMA,
            ideal_stage_one: false,
            completion: Completion::default(),
            fisher_point: FisherPoint::default(),
            scaling: StageTwoScaling::default(),
            diagnostic: false,
        }
    }
}

impl ProtocolConfig {
    pub fn stage_one_len(&self) -> usize {
        if self.ideal_stage_one {
            return 0;
        }
        self.stage_one
            .unwrap_or_else(|| (self.n as f64).powf(1.0 - self.epsilon).ceil() as usize)
    }

    pub fn stage_two_len(&self) -> usize {
        self.n - self.stage_one_len()
    }

    pub fn tau(&self) -> f64 {
        self.tau.unwrap_or_else(|| (self.n as f64).powf(3.0 * self.epsilon))
    }

    /// `n` used in `δ = τ/√n` and `θ̂ = θ̃ + û/√n`.
    pub fn root_n(&self) -> f64 {
        match self.scaling {
            StageTwoScaling::ScaledFisher => (self.n as f64).sqrt(),
            StageTwoScaling::RootStageTwo => (self.stage_two_len() as f64).sqrt(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config("n must be at least 2".into()));
        }
        if self.stage_one.is_none() && self.tau.is_none() && !(self.epsilon > 0.0 && self.epsilon < 1.0 / 6.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1/6), got {}", self.epsilon)));
        }
        if self.stage_one_len() >= self.n {
            return Err(Error::Config("stage one must be shorter than n".into()));
        }
        if !self.ideal_stage_one && self.stage_one_len() == 0 {
            return Err(Error::Config("stage one is empty".into()));
        }
        let tau = self.tau();
        if !(tau.is_finite() && tau >= 0.0) || (tau == 0.0 && !self.diagnostic) {
            return Err(Error::Config(format!("tau must be positive, got {tau}")));
        }
        default_separation(self.stage_two_len(), self.gamma)?;
        Ok(())
    }
}

/// `Tr(ρ_ss K_1†K_1)`, the stationary probability of a one.
pub fn click_rate<M: ParametricModel + ?Sized>(model: &M, theta: f64) -> Result<f64> {
    let k = model.kraus_at(theta)?;
    click_rate_kraus(&k)
}

fn click_rate_kraus(k: &KrausFamily) -> Result<f64> {
    let rho = stationary_state(k)?;
    Ok(rho.expect(&(k.k1().adjoint() * k.k1())).re)
}

/// Stationary click rate tabulated on a grid, inverted by grid search plus
/// golden-section refinement.
#[derive(Debug, Clone)]
pub struct RateCurve<M> {
    model: M,
    grid: Vec<(f64, f64)>,
}

pub const RATE_GRID_POINTS: usize = 201;

impl<M: ParametricModel> RateCurve<M> {
    pub fn new(model: M) -> Result<Self> {
        let (lo, hi) = model.domain();
        let h = (hi - lo) / (RATE_GRID_POINTS + 1) as f64;
        let grid = (1..=RATE_GRID_POINTS)
            .map(|i| {
                let t = lo + h * i as f64;
                Ok((t, click_rate(&model, t)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { model, grid })
    }

    pub fn grid(&self) -> &[(f64, f64)] {
        &self.grid
    }

    fn spacing(&self) -> f64 {
        self.grid[1].0 - self.grid[0].0
    }

    /// The θ whose stationary click rate is closest to `rate`.
    pub fn invert(&self, rate: f64) -> Result<f64> {
        let dist: Vec<f64> = self.grid.iter().map(|(_, c)| (c - rate).abs()).collect();
        let (best, &min) = dist
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty grid");
        let tol = 1e-12 * rate.abs().max(1.0);
        let close: Vec<f64> = self
            .grid
            .iter()
            .zip(&dist)
            .filter(|(_, d)| **d <= min + tol)
            .map(|((t, _), _)| *t)
            .collect();
        let diameter = close.last().unwrap() - close.first().unwrap();
        if diameter > self.spacing() * 1.000_001 {
            return Err(Error::NonIdentifiable);
        }
        let lo = self.grid[best.saturating_sub(1)].0;
        let hi = self.grid[(best + 1).min(self.grid.len() - 1)].0;
        let objective = |t: f64| click_rate(&self.model, t).map(|c| (c - rate).abs());
        golden_section(objective, lo, hi, 1e-10)
    }
}

fn golden_section(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Preliminary estimate from a stage-one click fraction.
pub fn preliminary_estimate<M: ParametricModel>(curve: &RateCurve<M>, ones: u64, len: usize) -> Result<f64> {
    if len == 0 {
        return Err(Error::Empty);
    }
    curve.invert(ones as f64 / len as f64)
}

/// Classical Fisher information per sample of the click-fraction estimator,
/// `c'(θ)² / σ²` with `σ²` the asymptotic variance of the click fraction
/// (including correlations between outcomes).
pub fn stage_one_fisher<M: ParametricModel + ?Sized>(model: &M, theta: f64) -> Result<f64> {
    let h = model.fd_step().max(1e-6) * 10.0;
    let slope = (click_rate(model, theta + h)? - click_rate(model, theta - h)?) / (2.0 * h);
    let k = model.kraus_at(theta)?;
    let rho = stationary_state(&k)?;
    let e1 = k.k1().adjoint() * k.k1();
    let p = rho.expect(&e1).re;
    let d = k.dim();
    let sigma = k.k1() * rho.matrix() * k.k1().adjoint() - rho.matrix() * crate::linalg::c(p, 0.0);
    let centred = &e1 - crate::linalg::identity(d) * crate::linalg::c(p, 0.0);
    let r = Resolvent::new(&k, rho)?.apply(&centred)?;
    let var = p * (1.0 - p) + 2.0 * crate::linalg::trace_product(&sigma, &r).re;
    Ok(slope * slope / var)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Displacement {
    pub theta_abs: f64,
    pub tau: f64,
    /// τ = 0: the counts carry no sign information.
    pub non_identifiability_risk: bool,
}

pub fn set_displacement<M: ParametricModel + ?Sized>(
    config: &ProtocolConfig,
    model: &M,
    theta_tilde: f64,
) -> Result<Displacement> {
    let tau = config.tau();
    if tau == 0.0 && !config.diagnostic {
        return Err(Error::Config("tau = 0 is only allowed in diagnostic mode".into()));
    }
    let theta_abs = theta_tilde - tau / config.root_n();
    if !model.contains(theta_abs, 2.0 * DEFAULT_FD_STEP_SECOND) {
        return Err(Error::DomainExit(theta_abs));
    }
    Ok(Displacement { theta_abs, tau, non_identifiability_risk: tau == 0.0 })
}

/// `û = 2N/(fτ) − τ/2`.
pub fn u_hat(total: u64, tau: f64, f: f64) -> Result<f64> {
    if !(f > 0.0) {
        return Err(Error::BadFisher(f));
    }
    if !(tau > 0.0) {
        return Err(Error::Config(format!("tau must be positive, got {tau}")));
    }
    Ok(2.0 * total as f64 / (f * tau) - tau / 2.0)
}

pub fn theta_hat(theta_tilde: f64, u_hat: f64, n: f64) -> f64 {
    theta_tilde + u_hat / n.sqrt()
}

/// `1 / (n · mean((θ̂ − θ)²))`; infinite when every estimate is exact.
pub fn effective_fisher(estimates: &[f64], theta_true: f64, n: f64) -> Result<f64> {
    if estimates.len() < 2 {
        return Err(Error::Empty);
    }
    let mse = estimates.iter().map(|t| (t - theta_true).powi(2)).sum::<f64>() / estimates.len() as f64;
    Ok(if mse == 0.0 { f64::INFINITY } else { 1.0 / (n * mse) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationReport {
    pub index: u64,
    pub theta_tilde: f64,
    pub theta_abs: f64,
    pub tau: f64,
    pub stage_one_len: usize,
    pub stage_two_len: usize,
    pub separation: usize,
    pub total_count: u64,
    pub f_used: f64,
    pub u_hat: f64,
    pub theta_hat: f64,
    #[serde(skip)]
    pub counts: BTreeMap<Pattern, u64>,
}

/// One protocol run on trajectory stream `index`.
pub fn run_protocol<M: ParametricModel + Clone>(
    model: &M,
    curve: Option<&RateCurve<M>>,
    theta_true: f64,
    config: &ProtocolConfig,
    master_seed: u64,
    index: u64,
) -> Result<EstimationReport> {
    config.validate()?;
    let mut rng = trajectory_rng(master_seed, index);
    let n1 = config.stage_one_len();
    let theta_tilde = if config.ideal_stage_one {
        theta_true
    } else {
        let curve = curve.ok_or_else(|| Error::Config("stage one needs a rate curve".into()))?;
        let k = model.kraus_at(theta_true)?;
        let initial = InitialState::Mixed(stationary_state(&k)?);
        let ones = count_ones_sequential(&k, &initial, n1, &mut rng)?;
        preliminary_estimate(curve, ones, n1)?
    };
    let disp = set_displacement(config, model, theta_tilde)?;
    let jp = joint_parametric(model.clone(), disp.theta_abs, config.completion)?;
    let f = match config.fisher_point {
        FisherPoint::ThetaAbs => 4.0 * ModeCalculator::new(&jp.local()?)?.lambda_tot()?.value(),
        FisherPoint::ThetaTilde => qfi_rate(model, theta_tilde)?,
    };
    let n2 = config.stage_two_len();
    let f_used = match config.scaling {
        StageTwoScaling::ScaledFisher => f * n2 as f64 / config.n as f64,
        StageTwoScaling::RootStageTwo => f,
    };
    let kraus = jp.kraus_at(theta_true)?;
    let traj = JumpSampler::new(&kraus, n2)?.sample(&InitialState::Pure(jp.joint().chi().clone()), &mut rng)?;
    let s = default_separation(n2, config.gamma)?;
    let pc = extract(&traj, s);
    let total = pc.total();
    let u = u_hat(total, disp.tau, f_used)?;
    let root_n = config.root_n();
    Ok(EstimationReport {
        index,
        theta_tilde,
        theta_abs: disp.theta_abs,
        tau: disp.tau,
        stage_one_len: n1,
        stage_two_len: n2,
        separation: s,
        total_count: total,
        f_used,
        u_hat: u,
        theta_hat: theta_tilde + u / root_n,
        counts: pc.counts().clone(),
    })
}

/// Serialised ensemble summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub theta_true: f64,
    pub n: usize,
    #[serde(rename = "N_traj")]
    pub n_traj: usize,
    /// `None` when stage one is skipped or exact.
    #[serde(rename = "F_eff_stage1")]
    pub f_eff_stage1: Option<f64>,
    #[serde(rename = "F_eff_final")]
    pub f_eff_final: Option<f64>,
    pub mean_theta_hat: f64,
    pub var_theta_hat: f64,
    pub qfi_rate: f64,
}

#[derive(Debug, Clone)]
pub struct Ensemble {
    pub reports: Vec<EstimationReport>,
    pub summary: EnsembleSummary,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// `n_traj` independent protocol runs on streams `0..n_traj`. Results are
/// in stream order and do not depend on the number of worker threads.
pub fn run_ensemble<M: ParametricModel + Clone>(
    model: &M,
    theta_true: f64,
    config: &ProtocolConfig,
    n_traj: usize,
    master_seed: u64,
    workers: Option<usize>,
) -> Result<Ensemble> {
    config.validate()?;
    if n_traj < 2 {
        return Err(Error::Config("need at least two trajectories".into()));
    }
    let curve = if config.ideal_stage_one { None } else { Some(RateCurve::new(model.clone())?) };
    let run = || -> Result<Vec<EstimationReport>> {
        (0..n_traj as u64)
            .into_par_iter()
            .map(|i| run_protocol(model, curve.as_ref(), theta_true, config, master_seed, i))
            .collect()
    };
    let reports = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    let hats: Vec<f64> = reports.iter().map(|r| r.theta_hat).collect();
    let f_eff_stage1 = if config.ideal_stage_one {
        None
    } else {
        let tildes: Vec<f64> = reports.iter().map(|r| r.theta_tilde).collect();
        finite(effective_fisher(&tildes, theta_true, config.stage_one_len() as f64)?)
    };
    let summary = EnsembleSummary {
        theta_true,
        n: config.n,
        n_traj,
        f_eff_stage1,
        f_eff_final: finite(effective_fisher(&hats, theta_true, config.n as f64)?),
        mean_theta_hat: stats::mean(&hats),
        var_theta_hat: stats::variance(&hats),
        qfi_rate: qfi_rate(model, theta_true)?,
    };
    Ok(Ensemble { reports, summary })
}

impl Ensemble {
    pub fn write_reports_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        for r in &self.reports {
            wr.serialize(r)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn write_summary_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, &self.summary)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{amplitude_damping, ConstantModel, RotationQubit};

    #[test]
    fn u_hat_formula() {
        assert_eq!(u_hat(0, 3.0, 13.0).unwrap(), -1.5);
        assert_eq!(u_hat(4, 2.0, 4.0).unwrap(), 0.0);
        assert!(matches!(u_hat(4, 2.0, 0.0), Err(Error::BadFisher(_))));
    }

    #[test]
    fn theta_hat_formula() {
        assert_eq!(theta_hat(0.2, 0.0, 6e5), 0.2);
        assert_eq!(theta_hat(0.2, -3.5, 6e5), 0.2 - 3.5 / 6e5f64.sqrt());
    }

    #[test]
    fn effective_fisher_edge_cases() {
        assert!(effective_fisher(&[0.2, 0.2], 0.2, 10.0).unwrap().is_infinite());
        assert!(matches!(effective_fisher(&[0.2], 0.2, 10.0), Err(Error::Empty)));
        let f = effective_fisher(&[0.1, 0.3], 0.2, 100.0).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_rate_inverts_to_truth() {
        let m = RotationQubit::default();
        let curve = RateCurve::new(m).unwrap();
        let c = click_rate(&m, 0.2).unwrap();
        assert!((curve.invert(c).unwrap() - 0.2).abs() < 1e-8);
    }

    #[test]
    fn constant_rate_is_not_identifiable() {
        let m = ConstantModel { kraus: amplitude_damping(0.4), domain: (0.0, 1.0) };
        let curve = RateCurve::new(m).unwrap();
        assert!(matches!(curve.invert(0.1), Err(Error::NonIdentifiable)));
    }

    #[test]
    fn displacement_uses_explicit_tau() {
        let cfg = ProtocolConfig { n: 600_000, tau: Some(7.0), ideal_stage_one: true, ..Default::default() };
        let d = set_displacement(&cfg, &RotationQubit::default(), 0.2).unwrap();
        assert!((d.theta_abs - (0.2 - 7.0 / 6e5f64.sqrt())).abs() < 1e-15);
        let zero = ProtocolConfig { tau: Some(0.0), ..cfg.clone() };
        assert!(set_displacement(&zero, &RotationQubit::default(), 0.2).is_err());
        let diag = ProtocolConfig { diagnostic: true, ..zero };
        assert!(set_displacement(&diag, &RotationQubit::default(), 0.2).unwrap().non_identifiability_risk);
        let far = ProtocolConfig { tau: Some(1e4), ..cfg };
        assert!(matches!(set_displacement(&far, &RotationQubit::default(), 0.2), Err(Error::DomainExit(_))));
    }

    #[test]
    fn summary_json_keys() {
        let s = EnsembleSummary {
            theta_true: 0.2,
            n: 10,
            n_traj: 2,
            f_eff_stage1: None,
            f_eff_final: Some(1.0),
            mean_theta_hat: 0.2,
            var_theta_hat: 0.0,
            qfi_rate: 13.4,
        };
        let v: serde_json::Value = serde_json::to_value(&s).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        keys.sort();
        assert_eq!(
            keys,
            ["F_eff_final", "F_eff_stage1", "N_traj", "mean_theta_hat", "n", "qfi_rate", "theta_true", "var_theta_hat"]
        );
    }
}
