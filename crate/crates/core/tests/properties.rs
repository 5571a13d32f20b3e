use proptest::prelude::*;

use nisqlab::algorithms::{binomial_tv, majority_vote, solve_noisy_parity_bruteforce, NoisyParityInstance};
use nisqlab::harness::circuit_id;
use nisqlab::oracles::PauliString;
use nisqlab::qsim::random::random_circuit;
use nisqlab::qsim::{exact_output_distribution, sample_shots, trajectory_rng, NoiseRate, NoisyCircuit, OracleBindings};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exact_distribution_is_normalized(n in 1usize..=5, depth in 0usize..=5, lambda in 0.0f64..=1.0, seed: u64) {
        let c = random_circuit(n, depth, NoiseRate::new(lambda).unwrap(), &mut trajectory_rng(seed, 0)).unwrap();
        let d = exact_output_distribution(&c, &OracleBindings::new()).unwrap();
        let total: f64 = d.iter().map(|(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sampling_is_reproducible(n in 1usize..=4, depth in 1usize..=4, seed: u64) {
        let c = random_circuit(n, depth, NoiseRate::new(0.2).unwrap(), &mut trajectory_rng(seed, 1)).unwrap();
        let b = OracleBindings::new();
        prop_assert_eq!(sample_shots(&c, &b, 50, seed).unwrap(), sample_shots(&c, &b, 50, seed).unwrap());
    }

    #[test]
    fn circuit_json_round_trip_keeps_id(n in 1usize..=4, depth in 0usize..=4, seed: u64) {
        let c = random_circuit(n, depth, NoiseRate::new(0.1).unwrap(), &mut trajectory_rng(seed, 2)).unwrap();
        let back = NoisyCircuit::from_json(&c.to_json()).unwrap();
        prop_assert_eq!(circuit_id(&back), circuit_id(&c));
    }

    #[test]
    fn binomial_tv_is_a_distance(n in 0usize..=60, a in 0.0f64..=1.0, b in 0.0f64..=1.0, c in 0.0f64..=1.0) {
        let (ab, bc, ac) = (binomial_tv(n, a, b), binomial_tv(n, b, c), binomial_tv(n, a, c));
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&ab));
        prop_assert!((ab - binomial_tv(n, b, a)).abs() < 1e-12);
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn majority_of_copies_is_the_copy(x in 0u64..1 << 12, copies in 1usize..=9) {
        prop_assert_eq!(majority_vote(&vec![x; copies], 12), x);
    }

    #[test]
    fn pauli_string_text_round_trip(ops in proptest::collection::vec(0u8..4, 1..10)) {
        let p = PauliString::new(ops).unwrap();
        let back: PauliString = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn noiseless_parity_is_recovered(bits in proptest::collection::btree_set(0usize..5, 0..=2), seed: u64) {
        let n = 10;
        let s = bits.iter().fold(0u64, |s, &i| s | 1 << (n - 1 - i));
        let inst = NoisyParityInstance::synthetic(n, s, 0.0, 120, 5, 2, seed);
        prop_assert_eq!(solve_noisy_parity_bruteforce(&inst, 5, 2).unwrap().estimate, Some(s));
    }
}
