//! Pattern-count laws against Poisson(λ_α u²): exact event probabilities
//! and a sampled ensemble.

use qmc_patterns::absorber::{joint_parametric, Completion};
use qmc_patterns::experiments::{run_poisson_study, PoissonPlan};
use qmc_patterns::fisher::ModeCalculator;
use qmc_patterns::models::RotationQubit;
use qmc_patterns::patterns::{default_separation, Pattern};
use qmc_patterns::qmc::stationary_state;
use qmc_patterns::trajectory::pattern_event_probability;

fn main() -> qmc_patterns::Result<()> {
    let model = RotationQubit::default();
    let jp = joint_parametric(model, 0.2, Completion::default())?;
    let modes = ModeCalculator::new(&jp.local()?)?;
    let lt = modes.lambda_tot()?.value();
    let one: Pattern = "1".parse()?;
    for n in [200, 2000, 20_000] {
        let k = jp.kraus_local(1.0, n as f64)?;
        let rho = stationary_state(&k)?;
        let s = default_separation(n, 0.3)?;
        let p = pattern_event_probability(&k, &rho, n, &[(one.clone(), 1)], s, 1000)?;
        let limit = (-lt).exp() * modes.lambda(&one);
        println!("n {n:>6}: P(only one isolated click) = {p:.5}, limit {limit:.5}, ratio {:.3}", p / limit);
    }

    let n = 600_000;
    let plan = PoissonPlan {
        theta: 0.2,
        theta_abs: 0.2 - 2.0 / (n as f64).sqrt(),
        u: 2.0,
        n,
        n_traj: 500,
        gamma: 0.5,
        separation: default_separation(n, 0.5)?,
        patterns: vec!["1".parse()?, "11".parse()?, "111".parse()?],
        completion: Completion::default(),
    };
    let out = run_poisson_study(&model, &plan, 11, None)?;
    for f in &out.fits {
        println!("{:>4}: mean {:.3} vs {:.3}, tv {:.3}", f.pattern, f.mean_count, f.poisson_mean, f.tv);
    }
    Ok(())
}
