//! Coherent absorber for the rotation qubit: unitary residuals, absorber
//! identities and the spectral radius left after removing the fixed point.

use qmc_patterns::absorber::{joint_parametric, Completion};
use qmc_patterns::fisher::ModeCalculator;
use qmc_patterns::models::RotationQubit;

fn main() -> qmc_patterns::Result<()> {
    for completion in [Completion::GramSchmidt, Completion::Polar, Completion::MaxGap] {
        let jp = joint_parametric(RotationQubit::default(), 0.2, completion)?;
        let [a, b, c, d] = jp.joint().identity_residuals();
        let calc = ModeCalculator::new(&jp.local()?)?;
        println!(
            "{completion:?}: unitarity {:.1e}, identities {a:.1e} {b:.1e} {c:.1e} {d:.1e}, radius {:.4}, lambda_tot {:.6}",
            jp.absorber().unitarity_residual(),
            calc.restricted_radius(),
            calc.lambda_tot()?.value()
        );
    }
    Ok(())
}
