//! Pattern extraction at several separations.

use qmc_patterns::patterns::{default_separation, extract};
use qmc_patterns::trajectory::Trajectory;

fn main() -> qmc_patterns::Result<()> {
    let bits: Vec<bool> = "0000010000011000001010000001".chars().map(|c| c == '1').collect();
    let t = Trajectory::from_bits(&bits);
    for s in [1, 2, 4, 6, 7] {
        let pc = extract(&t, s);
        let shown: Vec<String> = pc.counts().iter().map(|(p, c)| format!("{p}:{c}")).collect();
        println!("s = {s}: {{{}}} total {}", shown.join(", "), pc.total());
    }
    assert_eq!(extract(&t, 4).resynthesize(), t);
    println!("default separation at n = 6e5, gamma = 0.5: {}", default_separation(600_000, 0.5)?);
    Ok(())
}
