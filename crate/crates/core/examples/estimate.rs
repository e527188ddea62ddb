//! Two-stage estimation on a small ensemble.

use qmc_patterns::estimator::{run_ensemble, stage_one_fisher, ProtocolConfig};
use qmc_patterns::models::RotationQubit;

fn main() -> qmc_patterns::Result<()> {
    let model = RotationQubit::default();
    let config = ProtocolConfig { n: 400_000, stage_one: Some(40_000), tau: Some(12.0), gamma: 0.2, ..Default::default() };
    let ens = run_ensemble(&model, 0.2, &config, 200, 7, None)?;
    for r in ens.reports.iter().take(5) {
        println!("theta_tilde {:.5}  N {:>4}  u_hat {:+.3}  theta_hat {:.5}", r.theta_tilde, r.total_count, r.u_hat, r.theta_hat);
    }
    println!("stage-one Fisher rate (analytic): {:.3}", stage_one_fisher(&model, 0.2)?);
    ens.write_summary_json(std::io::stdout().lock())?;
    println!();
    Ok(())
}
