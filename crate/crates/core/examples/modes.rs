//! Mode intensities λ_α by pattern length and the truncation residual.

use qmc_patterns::absorber::{joint_parametric, Completion};
use qmc_patterns::fisher::mode_table;
use qmc_patterns::models::RotationQubit;

fn main() -> qmc_patterns::Result<()> {
    let jp = joint_parametric(RotationQubit::default(), 0.2, Completion::default())?;
    let table = mode_table(&jp.local()?, 12)?;
    let tot = table.lambda_tot.value();
    println!("lambda_tot = {tot:.6}");
    for e in table.entries.iter().filter(|e| e.pattern.len() <= 4) {
        println!("{:>6}  mu = {:+.5}{:+.5}i  lambda = {:.6}", e.pattern, e.mu.re, e.mu.im, e.lambda);
    }
    for len in [1, 2, 4, 8, 12] {
        println!("length <= {len:>2}: captured {:.5}", table.partial_sum_up_to(len) / tot);
    }
    table.write_csv(std::io::stdout().lock())?;
    Ok(())
}
