//! `nisqlab simulate`: output distribution of a circuit read from JSON.

use anyhow::{Context, Result};

use nisqlab::qsim::{exact_output_distribution, sample_distribution, NoisyCircuit, OracleBindings, OutcomeDistribution};

use crate::config::{usage, Backend, Params};
use crate::output::Table;
use crate::row;

pub const ACCEPTS: &[&str] = &["circuit", "lambda", "backend", "shots"];

pub struct Simulation {
    pub table: Table,
    pub seed: Option<u64>,
}

/// Oracle-free circuits only: the file carries no oracle definitions.
pub fn simulate(p: &Params) -> Result<Simulation> {
    let path = p.circuit.as_ref().ok_or_else(|| usage("simulate needs --circuit <file.json>"))?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut circuit = NoisyCircuit::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    match p.lambdas(&[]).as_slice() {
        [] => {}
        [lambda] => circuit.set_lambda(*lambda),
        _ => return Err(usage("simulate takes a single --lambda")),
    }
    let bindings = OracleBindings::new();
    let (dist, seed): (OutcomeDistribution, _) = match p.backend.unwrap_or(Backend::Exact) {
        Backend::Exact => (exact_output_distribution(&circuit, &bindings)?, p.seed),
        Backend::Trajectory => {
            let seed = p.require_seed("simulate with the trajectory backend")?;
            let shots = p.shots.unwrap_or(10_000);
            if shots == 0 {
                return Err(usage("--shots must be positive"));
            }
            (sample_distribution(&circuit, &bindings, shots, seed)?, Some(seed))
        }
    };
    let mut table = Table::new(&["outcome", "probability"]);
    for (label, prob) in dist.to_labeled() {
        table.push(row![label, prob]);
    }
    Ok(Simulation { table, seed })
}
