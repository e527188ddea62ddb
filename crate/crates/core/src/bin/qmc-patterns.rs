use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qmc_patterns::absorber::{joint_parametric, Completion};
use qmc_patterns::estimator::{run_ensemble, ProtocolConfig};
use qmc_patterns::experiments::{run_experiment, ExperimentConfig, Outcome, ResultBundle, Study, OUTPUT_DIR_ENV};
use qmc_patterns::fisher::{mode_table, qfi_rate, ModeCalculator};
use qmc_patterns::models::{AnyModel, ModelSpec};
use qmc_patterns::patterns::{default_separation, extract, Pattern};
use qmc_patterns::qmc::{stationary_state, ParametricModel};
use qmc_patterns::tim::{self, FockSpec, TrendRow};
use qmc_patterns::trajectory::{trajectory_rng, InitialState, JumpSampler};
use qmc_patterns::{io, Error, Result};

#[derive(Parser)]
#[command(name = "qmc-patterns", version, about = "Pattern-counting estimation for quantum Markov chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON model description; defaults to the rotation qubit.
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// Output directory [env: QMC_OUTPUT_DIR, default qmc-output].
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true, default_value = "max-gap", value_parser = parse_completion)]
    completion: Completion,
}

#[derive(Subcommand)]
enum Command {
    /// QFI rate and the 4λ_tot consistency check.
    Qfi {
        #[arg(long, default_value_t = 0.2)]
        theta: f64,
        #[command(flatten)]
        common: Common,
    },
    /// μ_α / λ_α table.
    Modes {
        #[arg(long, default_value_t = 0.2)]
        theta: f64,
        #[arg(long, default_value_t = 12)]
        truncation: usize,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Sample one trajectory, of the system chain or of the absorber output.
    Sample {
        #[arg(long, default_value_t = 0.2)]
        theta: f64,
        /// Absorber parameter; without it the bare system chain is sampled.
        #[arg(long)]
        theta_abs: Option<f64>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(long, value_enum, default_value_t = Format::Packed)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Pattern counts of a trajectory file.
    Extract {
        input: PathBuf,
        #[arg(long)]
        separation: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        /// Input format; guessed from the extension when omitted.
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Ensemble of two-stage protocol runs.
    Estimate {
        #[arg(long, default_value_t = 0.2)]
        theta: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        stage_one: Option<usize>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long)]
        ideal_stage_one: bool,
        #[arg(long, default_value_t = 100)]
        n_traj: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Exact translation-invariant mode expectations against their limits.
    VerifyTim {
        #[arg(long, default_value_t = 0.2)]
        theta_abs: f64,
        #[arg(long, default_value_t = 0.5)]
        u: f64,
        #[arg(long, value_delimiter = ',', default_value = "4,6,8,10,12,14,16,64,256,1024")]
        lengths: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1,11,101")]
        patterns: Vec<Pattern>,
        #[command(flatten)]
        common: Common,
    },
    /// Pattern-count histograms against their Poisson limits.
    VerifyPoisson {
        #[arg(long, default_value_t = 0.2)]
        theta: f64,
        #[arg(long, default_value_t = 600_000)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        u: f64,
        #[arg(long, default_value_t = 2000)]
        n_traj: usize,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,11,101,111")]
        patterns: Vec<Pattern>,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a study from a JSON configuration; flags override file fields.
    Experiment {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_parser = parse_study)]
        study: Option<Study>,
        #[arg(long)]
        scale_factor: Option<f64>,
        #[arg(long)]
        n_traj: Option<usize>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Packed,
    Csv,
}

fn parse_kebab<T: serde::de::DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn parse_completion(s: &str) -> std::result::Result<Completion, String> {
    parse_kebab(s)
}

fn parse_study(s: &str) -> std::result::Result<Study, String> {
    parse_kebab(s)
}

impl Common {
    fn model_spec(&self) -> Result<ModelSpec> {
        match &self.model {
            None => Ok(ModelSpec::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str(&text).map_err(|e| Error::Config(format!("model file: {e}")))
            }
        }
    }

    fn build_model(&self) -> Result<AnyModel> {
        self.model_spec()?.build()
    }

    fn dir(&self) -> Result<PathBuf> {
        let dir = self
            .output_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("qmc-output"));
        std::fs::create_dir_all(&dir)?;
        Ok(dir)
    }

    fn target(&self, explicit: Option<PathBuf>, name: &str) -> Result<PathBuf> {
        match explicit {
            Some(p) => Ok(p),
            None => Ok(self.dir()?.join(name)),
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn cmd_qfi(theta: f64, common: &Common) -> Result<()> {
    let model = common.build_model()?;
    let f = qfi_rate(&model, theta)?;
    let jp = joint_parametric(model, theta, common.completion)?;
    let lt = ModeCalculator::new(&jp.local()?)?.lambda_tot()?;
    let gap = 4.0 * lt.value() - f;
    println!("theta = {theta}");
    println!("f_theta = {f:.10}");
    println!("lambda_tot = {:.10}", lt.value());
    println!("4*lambda_tot - f = {gap:.3e}");
    println!("lambda_tot form discrepancy = {:.3e}", lt.discrepancy());
    if gap.abs() > 1e-5 {
        return Err(Error::InternalInconsistency(format!("4 lambda_tot - f = {gap:e}")));
    }
    Ok(())
}

fn cmd_modes(theta: f64, truncation: usize, output: Option<PathBuf>, common: &Common) -> Result<()> {
    let jp = joint_parametric(common.build_model()?, theta, common.completion)?;
    let table = mode_table(&jp.local()?, truncation)?;
    let path = common.target(output, "modes.csv")?;
    let mut w = create(&path)?;
    table.write_csv(&mut w)?;
    w.flush()?;
    println!("lambda_tot = {:.10}", table.lambda_tot.value());
    println!("truncation residual = {:.3e}", table.residual());
    println!("wrote {}", path.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    theta: f64,
    theta_abs: Option<f64>,
    n: usize,
    seed: u64,
    index: u64,
    format: Format,
    output: Option<PathBuf>,
    common: &Common,
) -> Result<()> {
    let model = common.build_model()?;
    let (kraus, initial) = match theta_abs {
        Some(ta) => {
            let jp = joint_parametric(model, ta, common.completion)?;
            (jp.kraus_at(theta)?, InitialState::Pure(jp.joint().chi().clone()))
        }
        None => {
            let k = model.kraus_at(theta)?;
            let rho = stationary_state(&k)?;
            (k, InitialState::Mixed(rho))
        }
    };
    let mut rng = trajectory_rng(seed, index);
    let traj = JumpSampler::new(&kraus, n)?.sample(&initial, &mut rng)?;
    let name = match format {
        Format::Packed => "trajectory.bin",
        Format::Csv => "trajectory.csv",
    };
    let path = common.target(output, name)?;
    let mut w = create(&path)?;
    match format {
        Format::Packed => io::write_packed(&traj, &mut w)?,
        Format::Csv => io::write_csv(&traj, &mut w)?,
    }
    w.flush()?;
    println!("ones = {} of {n}", traj.count_ones());
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_extract(
    input: &Path,
    separation: Option<usize>,
    gamma: f64,
    format: Option<Format>,
    output: Option<PathBuf>,
    common: &Common,
) -> Result<()> {
    let format = format.unwrap_or(match input.extension().and_then(|e| e.to_str()) {
        Some("csv") => Format::Csv,
        _ => Format::Packed,
    });
    let r = BufReader::new(File::open(input)?);
    let traj = match format {
        Format::Packed => io::read_packed(r)?,
        Format::Csv => io::read_csv(r)?,
    };
    let s = match separation {
        Some(0) => return Err(Error::Config("separation must be positive".into())),
        Some(s) => s,
        None => default_separation(traj.len(), gamma)?,
    };
    let pc = extract(&traj, s);
    let path = common.target(output, "pattern_counts.csv")?;
    let mut w = create(&path)?;
    pc.write_csv(&mut w)?;
    w.flush()?;
    println!("separation = {s}");
    println!("total patterns = {}", pc.total());
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_verify_tim(theta_abs: f64, u: f64, lengths: &[usize], patterns: &[Pattern], common: &Common) -> Result<()> {
    let jp = joint_parametric(common.build_model()?, theta_abs, common.completion)?;
    let modes = ModeCalculator::new(&jp.local()?)?;
    let s2 = std::f64::consts::SQRT_2;
    let mut rows = Vec::new();
    let fock = [FockSpec::new([("1".parse()?, 2)]), FockSpec::new([("11".parse()?, 1)])];
    for &n in lengths {
        let kraus = jp.kraus_local(u, n as f64)?;
        let rho = stationary_state(&kraus)?;
        for alpha in patterns {
            if alpha.len() > n {
                continue;
            }
            let (amp, number) = tim::transfer_mode_moments(&kraus, rho.matrix(), n, alpha)?;
            let mu = modes.mu(alpha);
            rows.push(TrendRow { n, quantity: format!("N[{alpha}]"), exact: number, limit: u * u * mu.norm_sqr() });
            rows.push(TrendRow { n, quantity: format!("Q[{alpha}]"), exact: s2 * amp.re, limit: s2 * u * mu.re });
            rows.push(TrendRow { n, quantity: format!("P[{alpha}]"), exact: s2 * amp.im, limit: -s2 * u * mu.im });
            if n <= tim::MAX_OPERATOR_LEN.min(12) {
                for op in [tim::quadrature_q(alpha, n)?, tim::quadrature_p(alpha, n)?, tim::number_operator(alpha, n)?] {
                    let defect = op.hermiticity_defect();
                    if defect > 1e-12 {
                        return Err(Error::InternalInconsistency(format!("mode operator not hermitian: {defect:e}")));
                    }
                }
            }
        }
        if n <= tim::MAX_STATE_LEN {
            rows.push(TrendRow { n, quantity: "gram".into(), exact: tim::gram_deviation(&fock, n)?, limit: 0.0 });
        }
    }
    let path = common.dir()?.join("tim_trend.csv");
    let mut w = create(&path)?;
    tim::write_trend_csv(&rows, &mut w)?;
    w.flush()?;
    for r in &rows {
        println!("{:>5} {:<10} {:>14.6} {:>14.6}", r.n, r.quantity, r.exact, r.limit);
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn write_bundle(bundle: &ResultBundle, dir: &Path) -> Result<()> {
    for p in bundle.write_to(dir)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Qfi { theta, common } => cmd_qfi(theta, &common),
        Command::Modes { theta, truncation, output, common } => cmd_modes(theta, truncation, output, &common),
        Command::Sample { theta, theta_abs, n, seed, index, format, output, common } => {
            cmd_sample(theta, theta_abs, n, seed, index, format, output, &common)
        }
        Command::Extract { input, separation, gamma, format, output, common } => {
            cmd_extract(&input, separation, gamma, format, output, &common)
        }
        Command::Estimate {
            theta,
            n,
            stage_one,
            tau,
            epsilon,
            gamma,
            ideal_stage_one,
            n_traj,
            seed,
            workers,
            common,
        } => {
            let config = ProtocolConfig {
                n,
                epsilon,
                stage_one,
                tau,
                gamma,
                ideal_stage_one,
                completion: common.completion,
                ..Default::default()
            };
            let model = common.build_model()?;
            let ens = run_ensemble(&model, theta, &config, n_traj, seed, workers)?;
            let dir = common.dir()?;
            let mut w = create(&dir.join("reports.csv"))?;
            ens.write_reports_csv(&mut w)?;
            w.flush()?;
            let mut w = create(&dir.join("summary.json"))?;
            ens.write_summary_json(&mut w)?;
            w.write_all(b"\n")?;
            w.flush()?;
            println!("{}", serde_json::to_string_pretty(&ens.summary)?);
            Ok(())
        }
        Command::VerifyTim { theta_abs, u, lengths, patterns, common } => {
            cmd_verify_tim(theta_abs, u, &lengths, &patterns, &common)
        }
        Command::VerifyPoisson { theta, n, u, n_traj, gamma, patterns, seed, workers, common } => {
            let config = ExperimentConfig {
                model: common.model_spec()?,
                study: Study::CustomPoisson,
                theta_true: theta,
                n: Some(n),
                n_traj: Some(n_traj),
                u: Some(u),
                gamma: Some(gamma),
                patterns: Some(patterns),
                completion: common.completion,
                master_seed: seed,
                worker_count: workers,
                ..Default::default()
            };
            let bundle = run_experiment(&config)?;
            if let Outcome::Poisson(o) = &bundle.outcome {
                for f in &o.fits {
                    println!("{:<6} poisson mean {:.4}  observed mean {:.4}  tv {:.4}", f.pattern, f.poisson_mean, f.mean_count, f.tv);
                }
            }
            write_bundle(&bundle, &common.dir()?)
        }
        Command::Experiment { config, study, scale_factor, n_traj, gamma, seed, workers, common } => {
            let mut cfg = match &config {
                Some(path) => ExperimentConfig::from_file(path)?,
                None => ExperimentConfig::default(),
            };
            if common.model.is_some() {
                cfg.model = common.model_spec()?;
            }
            if let Some(s) = study {
                cfg.study = s;
            }
            if let Some(f) = scale_factor {
                cfg.scale_factor = f;
            }
            if n_traj.is_some() {
                cfg.n_traj = n_traj;
            }
            if gamma.is_some() {
                cfg.gamma = gamma;
            }
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if workers.is_some() {
                cfg.worker_count = workers;
            }
            if common.output_dir.is_some() {
                cfg.output_dir = common.output_dir.clone();
            }
            let bundle = run_experiment(&cfg)?;
            match &bundle.outcome {
                Outcome::Ensemble(o) => {
                    println!("{}", serde_json::to_string_pretty(&o.ensemble.summary)?);
                    println!("ks p-value = {:.4}", o.ks.p_value);
                }
                Outcome::Poisson(o) => {
                    for f in &o.fits {
                        println!("{:<6} tv {:.4}", f.pattern, f.tv);
                    }
                }
            }
            let dir = cfg.resolved_output_dir();
            write_bundle(&bundle, &dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
