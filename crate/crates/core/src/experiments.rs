//! Study drivers: preset configurations, ensemble runs and result bundles
//! with provenance.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::absorber::{joint_parametric, Completion};
use crate::config::DEFAULT_GAMMA;
use crate::error::{Error, Result};
use crate::estimator::{run_ensemble, Ensemble, FisherPoint, ProtocolConfig, StageTwoScaling};
use crate::fisher::ModeCalculator;
use crate::models::{AnyModel, ModelSpec};
use crate::patterns::{default_separation, extract, Pattern};
use crate::qmc::ParametricModel;
use crate::stats::{self, Histogram, KsTest};
use crate::trajectory::{trajectory_rng, InitialState, JumpSampler};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "QMC_OUTPUT_DIR";
const FALLBACK_OUTPUT_DIR: &str = "qmc-output";

/// Separation exponent of the estimation presets.
pub const PRESET_ESTIMATION_GAMMA: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Study {
    /// Pattern-count laws in the local model.
    Fig2,
    /// Second stage alone, preliminary estimate replaced by the true value.
    Fig3,
    /// Full two-stage protocol.
    #[default]
    Fig4,
    /// Pattern-count laws with every parameter given explicitly.
    CustomPoisson,
    /// Estimation ensemble with every parameter given explicitly.
    Custom,
}

/// Experiment description. Unset fields take the study presets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub study: Study,
    pub theta_true: f64,
    pub n: Option<usize>,
    pub stage_one: Option<usize>,
    #[serde(rename = "N_traj", alias = "n_traj")]
    pub n_traj: Option<usize>,
    pub tau: Option<f64>,
    pub epsilon: Option<f64>,
    pub u: Option<f64>,
    pub gamma: Option<f64>,
    pub ideal_stage_one: Option<bool>,
    pub patterns: Option<Vec<Pattern>>,
    pub completion: Completion,
    pub fisher_point: FisherPoint,
    pub scaling: StageTwoScaling,
    pub master_seed: u64,
    pub output_dir: Option<PathBuf>,
    pub worker_count: Option<usize>,
    /// Multiplies `n`, `ñ` and `N_traj` of the presets.
    pub scale_factor: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::default(),
            study: Study::default(),
            theta_true: 0.2,
            n: None,
            stage_one: None,
            n_traj: None,
            tau: None,
            epsilon: None,
            u: None,
            gamma: None,
            ideal_stage_one: None,
            patterns: None,
            completion: Completion::default(),
            fisher_point: FisherPoint::default(),
            scaling: StageTwoScaling::default(),
            master_seed: 2024,
            output_dir: None,
            worker_count: None,
            scale_factor: 1.0,
        }
    }
}

struct Preset {
    n: usize,
    stage_one: Option<usize>,
    n_traj: usize,
    tau: Option<f64>,
    u: Option<f64>,
    gamma: f64,
    ideal: bool,
}

fn preset(study: Study) -> Option<Preset> {
    match study {
        Study::Fig2 => Some(Preset {
            n: 600_000,
            stage_one: None,
            n_traj: 2000,
            tau: None,
            u: Some(2.0),
            gamma: DEFAULT_GAMMA,
            ideal: true,
        }),
        Study::Fig3 => Some(Preset {
            n: 600_000,
            stage_one: None,
            n_traj: 1000,
            tau: Some(7.0),
            u: None,
            gamma: PRESET_ESTIMATION_GAMMA,
            ideal: true,
        }),
        Study::Fig4 => Some(Preset {
            n: 6_600_000,
            stage_one: Some(400_000),
            n_traj: 1070,
            tau: Some(25.5),
            u: None,
            gamma: PRESET_ESTIMATION_GAMMA,
            ideal: false,
        }),
        Study::CustomPoisson | Study::Custom => None,
    }
}

fn scaled(x: usize, factor: f64) -> usize {
    ((x as f64 * factor).round() as usize).max(2)
}

/// `τ` for a preset run at `n · factor`, keeping `τ = n^{3ε}` with the ε
/// implied by the preset pair `(n, τ)`.
pub fn scaled_tau(tau: f64, n: usize, factor: f64) -> f64 {
    tau * factor.powf(tau.ln() / (n as f64).ln())
}

/// Default patterns of the pattern-count study.
pub fn default_patterns() -> Vec<Pattern> {
    ["1", "11", "101", "111"].iter().map(|s| s.parse().expect("valid pattern")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoissonPlan {
    pub theta: f64,
    pub theta_abs: f64,
    pub u: f64,
    pub n: usize,
    pub n_traj: usize,
    pub gamma: f64,
    pub separation: usize,
    pub patterns: Vec<Pattern>,
    pub completion: Completion,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsemblePlan {
    pub theta: f64,
    pub n_traj: usize,
    pub protocol: ProtocolConfig,
}

/// Fully resolved run.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Plan {
    Poisson(PoissonPlan),
    Ensemble(EnsemblePlan),
}

fn required<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("custom study needs `{name}`")))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("experiment config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Explicit `output_dir`, else the environment variable, else `qmc-output`.
    pub fn resolved_output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(FALLBACK_OUTPUT_DIR))
    }

    pub fn plan(&self) -> Result<Plan> {
        if !(self.scale_factor > 0.0 && self.scale_factor <= 1.0) {
            return Err(Error::Config(format!("scale_factor must lie in (0, 1], got {}", self.scale_factor)));
        }
        if self.worker_count == Some(0) {
            return Err(Error::Config("worker_count must be positive".into()));
        }
        let pre = preset(self.study);
        let f = self.scale_factor;
        let poisson = matches!(self.study, Study::Fig2 | Study::CustomPoisson);
        let n = match (&pre, self.n) {
            (_, Some(n)) => n,
            (Some(p), None) => scaled(p.n, f),
            (None, None) => required(None, "n")?,
        };
        let n_traj = match (&pre, self.n_traj) {
            (_, Some(v)) => v,
            (Some(p), None) => scaled(p.n_traj, f),
            (None, None) => required(None, "N_traj")?,
        };
        let gamma = self.gamma.or(pre.as_ref().map(|p| p.gamma)).unwrap_or(DEFAULT_GAMMA);
        if poisson {
            let u = self.u.or(pre.as_ref().and_then(|p| p.u)).map_or_else(|| required(None, "u"), Ok)?;
            let theta_abs = self.theta_true - u / (n as f64).sqrt();
            return Ok(Plan::Poisson(PoissonPlan {
                theta: self.theta_true,
                theta_abs,
                u,
                n,
                n_traj,
                gamma,
                separation: default_separation(n, gamma)?,
                patterns: self.patterns.clone().unwrap_or_else(default_patterns),
                completion: self.completion,
            }));
        }
        let stage_one = match (&pre, self.stage_one) {
            (_, Some(v)) => Some(v),
            (Some(p), None) => p.stage_one.map(|v| scaled(v, f)),
            (None, None) => None,
        };
        let tau = match (&pre, self.tau) {
            (_, Some(t)) => Some(t),
            (Some(p), None) => p.tau.map(|t| scaled_tau(t, p.n, f)),
            (None, None) => None,
        };
        let ideal = self.ideal_stage_one.or(pre.as_ref().map(|p| p.ideal)).unwrap_or(false);
        let protocol = ProtocolConfig {
            n,
            epsilon: self.epsilon.unwrap_or(ProtocolConfig::default().epsilon),
            stage_one,
            tau,
            gamma,
            ideal_stage_one: ideal,
            completion: self.completion,
            fisher_point: self.fisher_point,
            scaling: self.scaling,
            diagnostic: false,
        };
        protocol.validate()?;
        Ok(Plan::Ensemble(EnsemblePlan { theta: self.theta_true, n_traj, protocol }))
    }
}

/// Configuration echo attached to every bundle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub crate_version: &'static str,
    pub config: ExperimentConfig,
    pub plan: Plan,
    /// SHA-256 of the canonical JSON of `config` and `plan`.
    pub config_hash: String,
    pub master_seed: u64,
    pub binning: &'static str,
}

impl Provenance {
    fn new(config: &ExperimentConfig, plan: &Plan) -> Result<Self> {
        let canonical = serde_json::to_string(&(config, plan))?;
        let digest = Sha256::digest(canonical.as_bytes());
        let config_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        Ok(Self {
            crate_version: env!("CARGO_PKG_VERSION"),
            config: config.clone(),
            plan: plan.clone(),
            config_hash,
            master_seed: config.master_seed,
            binning: "freedman-diaconis",
        })
    }
}

/// Fit of one pattern's count law to `Poisson(λ_α u²)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternFit {
    pub pattern: Pattern,
    pub lambda: f64,
    pub poisson_mean: f64,
    pub mean_count: f64,
    pub var_count: f64,
    pub tv: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonOutcome {
    pub fits: Vec<PatternFit>,
    /// `counts[k][i]`: pattern `k` in trajectory `i`.
    pub counts: Vec<Vec<u64>>,
    pub total_patterns: Vec<u64>,
    pub lambda_tot: f64,
}

#[derive(Debug, Clone)]
pub struct EnsembleOutcome {
    pub ensemble: Ensemble,
    pub ks: KsTest,
    pub histogram: Histogram,
    pub reference_mean: f64,
    pub reference_sd: f64,
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Poisson(PoissonOutcome),
    Ensemble(EnsembleOutcome),
}

#[derive(Debug, Clone)]
pub struct ResultBundle {
    pub provenance: Provenance,
    pub outcome: Outcome,
}

fn in_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        Some(w) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(job)),
        None => Ok(job()),
    }
}

/// Samples `n_traj` local-model trajectories and compares each pattern's
/// count histogram with `Poisson(λ_α u²)`.
pub fn run_poisson_study<M: ParametricModel + Clone>(
    model: &M,
    plan: &PoissonPlan,
    master_seed: u64,
    workers: Option<usize>,
) -> Result<PoissonOutcome> {
    if plan.n_traj < 2 {
        return Err(Error::Config("need at least two trajectories".into()));
    }
    let jp = joint_parametric(model.clone(), plan.theta_abs, plan.completion)?;
    let modes = ModeCalculator::new(&jp.local()?)?;
    let lambda_tot = modes.lambda_tot()?.value();
    let kraus = jp.kraus_at(plan.theta)?;
    let sampler = JumpSampler::new(&kraus, plan.n)?;
    let initial = InitialState::Pure(jp.joint().chi().clone());
    let per_traj: Vec<(Vec<u64>, u64)> = in_pool(workers, || {
        (0..plan.n_traj as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = trajectory_rng(master_seed, i);
                let pc = extract(&sampler.sample(&initial, &mut rng)?, plan.separation);
                Ok((plan.patterns.iter().map(|p| pc.get(p)).collect(), pc.total()))
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let counts: Vec<Vec<u64>> =
        (0..plan.patterns.len()).map(|k| per_traj.iter().map(|(c, _)| c[k]).collect()).collect();
    let fits = plan
        .patterns
        .iter()
        .zip(&counts)
        .map(|(p, c)| {
            let lambda = modes.lambda(p);
            let poisson_mean = lambda * plan.u * plan.u;
            let xs: Vec<f64> = c.iter().map(|&v| v as f64).collect();
            Ok(PatternFit {
                pattern: p.clone(),
                lambda,
                poisson_mean,
                mean_count: stats::mean(&xs),
                var_count: stats::variance(&xs),
                tv: stats::tv_distance_poisson(c, poisson_mean)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PoissonOutcome { fits, counts, total_patterns: per_traj.iter().map(|(_, t)| *t).collect(), lambda_tot })
}

/// Runs the estimation ensemble and compares `θ̂` with
/// `Normal(θ, 1/(n f_θ))`.
pub fn run_estimation_study<M: ParametricModel + Clone>(
    model: &M,
    plan: &EnsemblePlan,
    master_seed: u64,
    workers: Option<usize>,
) -> Result<EnsembleOutcome> {
    let ensemble = run_ensemble(model, plan.theta, &plan.protocol, plan.n_traj, master_seed, workers)?;
    let reference_sd = 1.0 / (plan.protocol.n as f64 * ensemble.summary.qfi_rate).sqrt();
    let normal = Normal::new(plan.theta, reference_sd).map_err(|e| Error::NumericalDegeneracy(e.to_string()))?;
    let hats: Vec<f64> = ensemble.reports.iter().map(|r| r.theta_hat).collect();
    let ks = stats::ks_test(&hats, |x| normal.cdf(x))?;
    let histogram = Histogram::freedman_diaconis(&hats)?;
    Ok(EnsembleOutcome { ensemble, ks, histogram, reference_mean: plan.theta, reference_sd })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultBundle> {
    let plan = config.plan()?;
    let model: AnyModel = config.model.build()?;
    let provenance = Provenance::new(config, &plan)?;
    let outcome = match &plan {
        Plan::Poisson(p) => Outcome::Poisson(run_poisson_study(&model, p, config.master_seed, config.worker_count)?),
        Plan::Ensemble(p) => {
            Outcome::Ensemble(run_estimation_study(&model, p, config.master_seed, config.worker_count)?)
        }
    };
    Ok(ResultBundle { provenance, outcome })
}

fn create(dir: &Path, name: &str, written: &mut Vec<PathBuf>) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path)?;
    written.push(path);
    Ok(BufWriter::new(f))
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

#[derive(Serialize)]
struct FitSummary<'a> {
    ks_statistic: f64,
    ks_p_value: f64,
    reference_mean: f64,
    reference_sd: f64,
    binning: &'a str,
    bins: usize,
}

impl PoissonOutcome {
    /// Columns `pattern,lambda,poisson_mean,mean_count,var_count,tv`.
    pub fn write_fits_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv_writer(w);
        wr.write_record(["pattern", "lambda", "poisson_mean", "mean_count", "var_count", "tv"])?;
        for f in &self.fits {
            wr.write_record([
                f.pattern.to_string(),
                format!("{:.12e}", f.lambda),
                format!("{:.12e}", f.poisson_mean),
                format!("{:.12e}", f.mean_count),
                format!("{:.12e}", f.var_count),
                format!("{:.12e}", f.tv),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    /// One row per trajectory, one column per pattern plus the total.
    pub fn write_counts_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv_writer(w);
        let mut header = vec!["trajectory".to_string()];
        header.extend(self.fits.iter().map(|f| format!("n_{}", f.pattern)));
        header.push("total_patterns".into());
        wr.write_record(&header)?;
        for (i, total) in self.total_patterns.iter().enumerate() {
            let mut row = vec![i.to_string()];
            row.extend(self.counts.iter().map(|c| c[i].to_string()));
            row.push(total.to_string());
            wr.write_record(&row)?;
        }
        wr.flush()?;
        Ok(())
    }
}

impl ResultBundle {
    /// Writes every artefact into `dir` (created if missing) and returns the
    /// paths written.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut w = create(dir, "provenance.json", &mut written)?;
        serde_json::to_writer_pretty(&mut w, &self.provenance)?;
        w.write_all(b"\n")?;
        w.flush()?;
        match &self.outcome {
            Outcome::Poisson(o) => {
                let mut w = create(dir, "pattern_fits.csv", &mut written)?;
                o.write_fits_csv(&mut w)?;
                w.flush()?;
                let mut w = create(dir, "pattern_counts.csv", &mut written)?;
                o.write_counts_csv(&mut w)?;
                w.flush()?;
                for (f, c) in o.fits.iter().zip(&o.counts) {
                    let mut w = create(dir, &format!("count_histogram_{}.csv", f.pattern), &mut written)?;
                    stats::write_count_histogram(&mut w, c, f.poisson_mean)?;
                    w.flush()?;
                }
            }
            Outcome::Ensemble(o) => {
                let mut w = create(dir, "reports.csv", &mut written)?;
                o.ensemble.write_reports_csv(&mut w)?;
                w.flush()?;
                let mut w = create(dir, "summary.json", &mut written)?;
                o.ensemble.write_summary_json(&mut w)?;
                w.write_all(b"\n")?;
                w.flush()?;
                let normal = Normal::new(o.reference_mean, o.reference_sd)
                    .map_err(|e| Error::NumericalDegeneracy(e.to_string()))?;
                let mut w = create(dir, "theta_hat_histogram.csv", &mut written)?;
                o.histogram.write_csv(&mut w, |x| normal.pdf(x))?;
                w.flush()?;
                let mut w = create(dir, "fit.json", &mut written)?;
                let fit = FitSummary {
                    ks_statistic: o.ks.statistic,
                    ks_p_value: o.ks.p_value,
                    reference_mean: o.reference_mean,
                    reference_sd: o.reference_sd,
                    binning: o.histogram.rule,
                    bins: o.histogram.counts.len(),
                };
                serde_json::to_writer_pretty(&mut w, &fit)?;
                w.write_all(b"\n")?;
                w.flush()?;
            }
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_resolve() {
        let cfg = ExperimentConfig { study: Study::Fig4, ..Default::default() };
        let Plan::Ensemble(p) = cfg.plan().unwrap() else { panic!() };
        assert_eq!(p.protocol.n, 6_600_000);
        assert_eq!(p.protocol.stage_one_len(), 400_000);
        assert_eq!(p.protocol.tau(), 25.5);
        assert_eq!(p.n_traj, 1070);

        let cfg = ExperimentConfig { study: Study::Fig2, ..Default::default() };
        let Plan::Poisson(p) = cfg.plan().unwrap() else { panic!() };
        assert_eq!((p.n, p.n_traj, p.u, p.separation), (600_000, 2000, 2.0, 775));
    }

    #[test]
    fn scaling_keeps_tau_exponent() {
        let cfg = ExperimentConfig { study: Study::Fig4, scale_factor: 0.1, ..Default::default() };
        let Plan::Ensemble(p) = cfg.plan().unwrap() else { panic!() };
        assert_eq!(p.protocol.n, 660_000);
        assert_eq!(p.protocol.stage_one_len(), 40_000);
        assert_eq!(p.n_traj, 107);
        let eps3 = 25.5f64.ln() / 6.6e6f64.ln();
        assert!((p.protocol.tau() - 660_000f64.powf(eps3)).abs() < 1e-9);
        let explicit = ExperimentConfig { tau: Some(3.0), n_traj: Some(50), ..cfg };
        let Plan::Ensemble(p) = explicit.plan().unwrap() else { panic!() };
        assert_eq!((p.protocol.tau(), p.n_traj), (3.0, 50));
    }

    #[test]
    fn config_errors() {
        let bad = |json: &str| ExperimentConfig::from_json(json).and_then(|c| c.plan().map(|_| ()));
        assert!(bad(r#"{"study":"custom"}"#).unwrap_err().is_config_error());
        assert!(bad(r#"{"scale_factor":0}"#).unwrap_err().is_config_error());
        assert!(bad(r#"{"unknown":1}"#).unwrap_err().is_config_error());
        assert!(bad(r#"{"study":"fig2","gamma":1.5}"#).unwrap_err().is_config_error());
        assert!(bad(r#"{"study":"custom","n":1000,"N_traj":10,"stage_one":100,"tau":2.0}"#).is_ok());
    }

    #[test]
    fn provenance_hash_tracks_config() {
        let a = ExperimentConfig { study: Study::Fig3, ..Default::default() };
        let b = ExperimentConfig { master_seed: 7, ..a.clone() };
        let pa = Provenance::new(&a, &a.plan().unwrap()).unwrap();
        let pb = Provenance::new(&b, &b.plan().unwrap()).unwrap();
        assert_eq!(pa.config_hash.len(), 64);
        assert_ne!(pa.config_hash, pb.config_hash);
        assert_eq!(pa, Provenance::new(&a, &a.plan().unwrap()).unwrap());
    }

    #[test]
    fn small_bundles_write_and_repeat() {
        let dir = std::env::temp_dir().join(format!("qmc-exp-test-{}", std::process::id()));
        let cfg = ExperimentConfig {
            study: Study::Custom,
            n: Some(20_000),
            stage_one: Some(4_000),
            tau: Some(3.0),
            n_traj: Some(12),
            gamma: Some(0.3),
            worker_count: Some(2),
            ..Default::default()
        };
        let a = run_experiment(&cfg).unwrap();
        let files = a.write_to(&dir).unwrap();
        assert!(files.iter().any(|p| p.ends_with("summary.json")));
        let summary = std::fs::read_to_string(dir.join("summary.json")).unwrap();
        for key in ["theta_true", "\"n\"", "N_traj", "F_eff_stage1", "F_eff_final", "mean_theta_hat", "var_theta_hat", "qfi_rate"] {
            assert!(summary.contains(key), "{key}");
        }
        let b = run_experiment(&ExperimentConfig { worker_count: Some(1), ..cfg }).unwrap();
        let (Outcome::Ensemble(x), Outcome::Ensemble(y)) = (&a.outcome, &b.outcome) else { panic!() };
        assert_eq!(x.ensemble.summary, y.ensemble.summary);

        let pcfg = ExperimentConfig {
            study: Study::CustomPoisson,
            n: Some(5_000),
            n_traj: Some(20),
            u: Some(1.0),
            ..Default::default()
        };
        let bundle = run_experiment(&pcfg).unwrap();
        let files = bundle.write_to(&dir.join("poisson")).unwrap();
        assert_eq!(files.len(), 3 + default_patterns().len());
        let Outcome::Poisson(o) = &bundle.outcome else { panic!() };
        assert_eq!(o.counts.len(), 4);
        assert_eq!(o.counts[0].len(), 20);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
