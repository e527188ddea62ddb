//! Trajectories of the bare chain and of the absorber output, written in
//! both on-disk formats.

use qmc_patterns::absorber::{joint_parametric, Completion};
use qmc_patterns::io;
use qmc_patterns::models::RotationQubit;
use qmc_patterns::qmc::{stationary_state, ParametricModel};
use qmc_patterns::trajectory::{sample_trajectory, trajectory_rng, InitialState, JumpSampler};

fn main() -> qmc_patterns::Result<()> {
    let model = RotationQubit::default();
    let k = model.kraus_at(0.2)?;
    let bare = sample_trajectory(&k, &InitialState::Mixed(stationary_state(&k)?), 10_000, &mut trajectory_rng(1, 0))?;
    println!("bare chain: {} ones in {}", bare.count_ones(), bare.len());

    let n = 600_000;
    let jp = joint_parametric(model, 0.2 - 2.0 / (n as f64).sqrt(), Completion::default())?;
    let sampler = JumpSampler::new(&jp.kraus_at(0.2)?, n)?;
    let chi = InitialState::Pure(jp.joint().chi().clone());
    for i in 0..3 {
        let t = sampler.sample(&chi, &mut trajectory_rng(1, i))?;
        println!("absorber output {i}: ones at {:?}", &t.ones()[..t.count_ones().min(8)]);
    }

    let dir = std::env::temp_dir();
    let t = sampler.sample(&chi, &mut trajectory_rng(1, 0))?;
    io::write_packed(&t, std::fs::File::create(dir.join("example.bin"))?)?;
    io::write_csv(&bare, std::fs::File::create(dir.join("example.csv"))?)?;
    let back = io::read_packed(std::fs::File::open(dir.join("example.bin"))?)?;
    assert_eq!(back, t);
    println!("packed file: {} bytes", std::fs::metadata(dir.join("example.bin"))?.len());
    Ok(())
}
