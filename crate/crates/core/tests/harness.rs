use approx::assert_abs_diff_eq;

use nisqlab::algorithms::{grover_template, lifted_simon_template, LIFTED_SIMON_ORACLE, GROVER_ORACLE, STATE_ORACLE};
use nisqlab::algorithms::per_query_trace_norm;
use nisqlab::harness::{
    exact_leaf_distribution, lecam_advantage, perturbation_check, run_controller, BvController,
    FixedCircuitController, LeCamMode, OracleAccess, RunConfig,
};
use nisqlab::oracles::{
    lift_to_unitary, make_bv, make_grover_phase, make_lifted_simon, make_simon, ClassicalOracle, GroverOracle,
    PauliString, SimonSpec, StateOracle,
};
use nisqlab::qsim::{DensityMatrix, NoiseRate, NoisyCircuit, OracleBindings};
use std::sync::Arc;

fn rate(l: f64) -> NoiseRate {
    NoiseRate::new(l).unwrap()
}

fn lifted_access(o: &ClassicalOracle) -> OracleAccess {
    OracleAccess::quantum(OracleBindings::new().with(LIFTED_SIMON_ORACLE, lift_to_unitary(o)))
}

#[test]
fn grover_mixture_after_one_query_is_below_threshold() {
    let ctl = FixedCircuitController::new(vec![grover_template(8, 1).unwrap()]);
    let access = |i: u64| {
        OracleAccess::quantum(
            OracleBindings::new().with(GROVER_ORACLE, make_grover_phase(&GroverOracle::new(8, i).unwrap())),
        )
    };
    let family1: Vec<OracleAccess> = (1..=8).map(access).collect();
    let r = lecam_advantage(&ctl, &[access(0)], &family1, LeCamMode::Exact, &RunConfig::new(NoiseRate::ZERO, 0))
        .unwrap();
    assert!(r.below_threshold, "{r:?}");
    // A single marked oracle, on the other hand, is easy to tell apart.
    let single = lecam_advantage(&ctl, &[access(0)], &[access(3)], LeCamMode::Exact, &RunConfig::new(NoiseRate::ZERO, 0))
        .unwrap();
    assert!(single.tv > 0.5);
}

#[test]
fn sampled_lecam_tracks_exact() {
    let f = make_simon(&SimonSpec::new(2, 0b11, 1).unwrap()).unwrap();
    let ctl = FixedCircuitController::new(vec![lifted_simon_template(2, NoiseRate::ZERO, 1).unwrap()]);
    let id = ClassicalOracle::new("id", 4, 2, |_| 0).unwrap();
    let fam0 = [lifted_access(&id)];
    let fam1 = [lifted_access(&make_lifted_simon(&f).unwrap())];
    let cfg = RunConfig::new(rate(0.1), 4);
    let exact = lecam_advantage(&ctl, &fam0, &fam1, LeCamMode::Exact, &cfg).unwrap();
    let sampled = lecam_advantage(&ctl, &fam0, &fam1, LeCamMode::Sampled { trials: 20_000 }, &cfg).unwrap();
    // The controller answers with its whole outcome, so answer TV is leaf TV.
    assert_abs_diff_eq!(exact.tv, exact.answer_tv, epsilon = 1e-12);
    assert!((sampled.tv - exact.tv).abs() < 0.05, "{} vs {}", sampled.tv, exact.tv);
}

#[test]
fn lifted_to_identity_substitution_two_queries() {
    let f = make_simon(&SimonSpec::new(2, 0b10, 3).unwrap()).unwrap();
    let template = lifted_simon_template(2, NoiseRate::ZERO, 1).unwrap();
    let ctl = FixedCircuitController::new(vec![template.clone(), template]);
    let id = ClassicalOracle::new("id", 4, 2, |_| 0).unwrap();
    let r = perturbation_check(
        &ctl,
        &lifted_access(&make_lifted_simon(&f).unwrap()),
        &lifted_access(&id),
        &RunConfig::new(rate(0.5), 0),
    )
    .unwrap();
    assert_eq!(r.depth, 2);
    assert!(r.holds && r.leaf_tv <= 2.0 * r.epsilon + 1e-9, "{r:?}");
    assert!(r.epsilon > 0.0);
}

#[test]
fn per_node_epsilon_is_the_per_query_trace_distance() {
    for (ps, lambda) in [("Z", 0.2), ("ZZ", 0.3), ("ZIZ", 0.1)] {
        let p: PauliString = ps.parse().unwrap();
        let n = p.len();
        let mut c = NoisyCircuit::new(n, NoiseRate::ZERO).unwrap();
        c.oracle(STATE_ORACLE, (0..n).collect()).unwrap();
        let ctl = FixedCircuitController::new(vec![c]);
        let bind = |o: StateOracle| OracleAccess::quantum(OracleBindings::new().with(STATE_ORACLE, Arc::new(o)));
        let r = perturbation_check(
            &ctl,
            &bind(StateOracle::pauli(1, p.clone()).unwrap()),
            &bind(StateOracle::maximally_mixed(n).unwrap()),
            &RunConfig::new(rate(lambda), 0),
        )
        .unwrap();
        let mut sigma = DensityMatrix::new(n).unwrap();
        sigma.depolarize_all(rate(lambda));
        let norm = per_query_trace_norm(&p, rate(lambda), &sigma).unwrap();
        assert_abs_diff_eq!(r.epsilon, 0.5 * norm, epsilon = 1e-12);
    }
}

#[test]
fn bv_controller_matches_exact_tree() {
    let o = make_bv(0b101, 3).unwrap();
    let ctl = BvController::new(3, 1).unwrap();
    let cfg = RunConfig::new(NoiseRate::ZERO, 0);
    let d = exact_leaf_distribution(&ctl, &BvController::access(&o), &cfg).unwrap();
    assert_eq!(d.len(), 1);
    assert_abs_diff_eq!(d.answer_distribution()[&0b101], 1.0, epsilon = 1e-12);
    let r = run_controller(&ctl, &BvController::access(&o), &cfg).unwrap();
    assert_eq!((r.answer, r.queries, r.query_time), (0b101, 1, 4 * 3));
}
