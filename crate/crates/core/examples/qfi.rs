//! QFI rate of the rotation qubit and the 4λ_tot identity.

use qmc_patterns::absorber::{joint_parametric, Completion};
use qmc_patterns::fisher::{qfi_rate, ModeCalculator};
use qmc_patterns::models::RotationQubit;

fn main() -> qmc_patterns::Result<()> {
    let model = RotationQubit::default();
    for theta in [0.1, 0.2, 0.3] {
        let f = qfi_rate(&model, theta)?;
        let jp = joint_parametric(model, theta, Completion::default())?;
        let lt = ModeCalculator::new(&jp.local()?)?.lambda_tot()?;
        println!("theta {theta:.2}  f {f:.6}  4*lambda_tot {:.6}  forms differ by {:.1e}", 4.0 * lt.value(), lt.discrepancy());
    }
    Ok(())
}
