use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qmc_patterns::patterns::{extract, total_patterns, Pattern};
use qmc_patterns::trajectory::Trajectory;

fn trajectory() -> impl Strategy<Value = Trajectory> {
    (1usize..400, 0.0f64..0.6).prop_flat_map(|(len, p)| {
        prop::collection::vec(prop::bool::weighted(p), len).prop_map(|bits| Trajectory::from_bits(&bits))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn resynthesis_round_trip(t in trajectory(), s in 1usize..30) {
        prop_assert_eq!(extract(&t, s).resynthesize(), t);
    }

    #[test]
    fn merging_only_reduces_pattern_count(t in trajectory(), s1 in 1usize..20, extra in 0usize..20) {
        let a = total_patterns(&extract(&t, s1));
        let b = total_patterns(&extract(&t, s1 + extra));
        prop_assert!(b <= a);
    }

    #[test]
    fn recorded_patterns_respect_separation(t in trajectory(), s in 1usize..30) {
        for p in extract(&t, s).counts().keys() {
            prop_assert!(p.bits()[0] && *p.bits().last().unwrap());
            prop_assert!(p.max_gap() < s);
        }
    }

    #[test]
    fn pattern_string_round_trip(value in 1u64..(1 << 40)) {
        let p = Pattern::from_value(value | 1).unwrap();
        let back: Pattern = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn ones_are_conserved_on_ten_thousand_trajectories() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..10_000 {
        let len = rng.gen_range(1..600);
        let p = rng.gen_range(0.0..0.5);
        let bits: Vec<bool> = (0..len).map(|_| rng.gen_bool(p)).collect();
        let t = Trajectory::from_bits(&bits);
        let s = 1 + i % 17;
        let pc = extract(&t, s);
        let ones: u64 = pc.counts().iter().map(|(p, c)| p.ones() as u64 * c).sum();
        assert_eq!(ones as usize, t.count_ones());
    }
}
