//! Noisy versions of the query algorithms, and the experiments built on them.

mod bv;
mod grover;
mod lifted_simon;
mod parity;
mod shadow;
mod zalka;

pub use bv::{
    bv_bit_bound, bv_bit_success, bv_circuit, bv_exact_bit_success, bv_repetitions, bv_samples, bv_secret,
    majority_vote, random_secret, run_noisy_bv, BvOutcome, BvRepetitions, BvRunConfig, BV_ORACLE, GUARANTEED_LAMBDA_LIMIT,
};
pub use grover::{
    exact_grover_success, grover_circuit, grover_closed_form, multi_controlled_z, run_noisy_grover, schedule_asap,
    GroverResult, GROVER_ORACLE,
};
pub use lifted_simon::{
    lifted_simon_bound, lifted_simon_template, lifted_simon_tv, lifted_simon_tv_for, LiftedSimonReport,
    LIFTED_SIMON_ORACLE,
};
pub use parity::{
    generate_noisy_parity, solve_noisy_parity_bruteforce, NoisyParityInstance, ParityRecovery, ParitySource,
    MAX_CANDIDATES,
};
pub use shadow::{
    binomial_tv, per_query_trace_norm, shadow_circuit, shadow_distinguish, DistinguishResult, ShadowMode,
    ShadowStrategy, MAX_EXACT_QUBITS, STATE_ORACLE,
};
pub use zalka::{check_zalka_sum, grover_template, random_query_template};
