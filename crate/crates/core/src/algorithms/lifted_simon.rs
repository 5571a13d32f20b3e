use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracles::{lift_to_unitary, make_lifted_simon, make_simon, ClassicalOracle, SimonSpec};
use crate::qsim::{exact_output_distribution, CircuitStep, Gate, NoiseRate, NoisyCircuit, OracleBindings};

/// Oracle id used by [`lifted_simon_template`].
pub const LIFTED_SIMON_ORACLE: &str = "lifted_simon";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftedSimonReport {
    pub n: usize,
    pub lambda: f64,
    pub queries: usize,
    /// Exact TV between outputs under the lifted oracle and under the identity.
    pub tv: f64,
    /// `4 N exp(-lambda n / 4)`.
    pub bound: f64,
    pub holds: bool,
}

pub fn lifted_simon_bound(n: usize, lambda: f64, queries: usize) -> f64 {
    4.0 * queries as f64 * (-lambda * n as f64 / 4.0).exp()
}

/// Simon-style template on `3n` qubits with `queries` oracle calls.
///
/// Qubits `0..n` feed the original function, `n..2n` are the padding that the
/// lifted function requires to be zero, `2n..3n` hold the output. Only the
/// first block is put in superposition, so noise on the padding is what the
/// lifted function punishes.
pub fn lifted_simon_template(n: usize, lambda: NoiseRate, queries: usize) -> Result<NoisyCircuit> {
    if n == 0 {
        return Err(Error::invalid("lifted Simon needs n >= 1"));
    }
    let mut c = NoisyCircuit::new(3 * n, lambda)?;
    let h: Vec<Gate> = (0..n).map(Gate::h).collect();
    for _ in 0..queries {
        c.layer(h.clone())?;
        c.oracle(LIFTED_SIMON_ORACLE, (0..3 * n).collect())?;
    }
    c.layer(h)?;
    Ok(c)
}

/// Exact TV between `template` run with the lifting of `f` and with the identity oracle.
pub fn lifted_simon_tv(f: &ClassicalOracle, template: &NoisyCircuit) -> Result<LiftedSimonReport> {
    let n = f.n_in();
    let lifted = make_lifted_simon(f)?;
    let identity = ClassicalOracle::new("identity", 2 * n, n, |_| 0)?;
    let dist = |o: &ClassicalOracle| {
        exact_output_distribution(template, &OracleBindings::new().with(LIFTED_SIMON_ORACLE, lift_to_unitary(o)))
    };
    let tv = dist(&lifted)?.tv(&dist(&identity)?)?;
    let queries = template
        .steps()
        .iter()
        .filter(|s| matches!(s, CircuitStep::Oracle(c) if c.id == LIFTED_SIMON_ORACLE))
        .count();
    let lambda = template.lambda().value();
    let bound = lifted_simon_bound(n, lambda, queries);
    Ok(LiftedSimonReport {
        n,
        lambda,
        queries,
        tv,
        bound,
        holds: tv <= bound + 1e-12,
    })
}

/// [`lifted_simon_tv`] for a seeded Simon function with the standard template.
pub fn lifted_simon_tv_for(n: usize, lambda: NoiseRate, queries: usize, secret: u64, seed: u64) -> Result<LiftedSimonReport> {
    let f = make_simon(&SimonSpec::new(n, secret, seed)?)?;
    lifted_simon_tv(&f, &lifted_simon_template(n, lambda, queries)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rate(l: f64) -> NoiseRate {
        NoiseRate::new(l).unwrap()
    }

    #[test]
    fn noiseless_outputs_differ() {
        let r = lifted_simon_tv_for(2, NoiseRate::ZERO, 1, 0b11, 1).unwrap();
        assert!(r.tv > 0.5, "{r:?}");
    }

    #[test]
    fn damping_respects_bound_and_decreases() {
        for lambda in [0.5, 0.6] {
            let a = lifted_simon_tv_for(2, rate(lambda), 1, 0b11, 0).unwrap();
            let b = lifted_simon_tv_for(3, rate(lambda), 1, 0b111, 0).unwrap();
            assert!(a.holds && b.holds);
            assert!(b.tv < a.tv, "{a:?} {b:?}");
        }
        let r = lifted_simon_tv_for(2, rate(0.3), 2, 0b10, 5).unwrap();
        assert_eq!(r.queries, 2);
        assert!(r.holds);
    }

    #[test]
    fn capacity_is_reported() {
        let err = lifted_simon_tv_for(4, rate(0.5), 1, 1, 0).unwrap_err();
        assert!(err.is_capacity(), "{err}");
    }
}
