//! Translation-invariant modes on short chains.

use qmc_patterns::absorber::{joint_parametric, Completion};
use qmc_patterns::fisher::ModeCalculator;
use qmc_patterns::models::RotationQubit;
use qmc_patterns::patterns::Pattern;
use qmc_patterns::qmc::stationary_state;
use qmc_patterns::tim::{exact_mode_expectations, fock_overlap, gram_deviation, transfer_mode_moments, FockSpec};

fn main() -> qmc_patterns::Result<()> {
    let one: Pattern = "1".parse()?;
    let pair: Pattern = "11".parse()?;
    let specs = [FockSpec::new([(one.clone(), 2)]), FockSpec::new([(pair.clone(), 1)])];
    for n in [8, 12, 16] {
        let norm = fock_overlap(&specs[1], &specs[1], n)?.re;
        println!("n {n:>2}: gram deviation {:.4}  <11|11> {norm:.4}", gram_deviation(&specs, n)?);
    }

    let jp = joint_parametric(RotationQubit::default(), 0.2, Completion::default())?;
    let lambda = ModeCalculator::new(&jp.local()?)?.lambda(&one);
    let u = 0.5;
    for n in [10, 16] {
        let e = exact_mode_expectations(&jp, u, n, &one)?;
        println!("n {n:>5}: <N_1>/u^2 = {:.4}   (lambda_1 = {lambda:.4})", e.number / (u * u));
    }
    for n in [100, 1000, 10_000] {
        let k = jp.kraus_local(u, n as f64)?;
        let (_, number) = transfer_mode_moments(&k, stationary_state(&k)?.matrix(), n, &one)?;
        println!("n {n:>5}: <N_1>/u^2 = {:.4}", number / (u * u));
    }
    Ok(())
}
