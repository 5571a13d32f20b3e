use std::collections::HashSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{information, trace_norm, CheckReport, SubsetSelector};
use crate::error::{Error, Result};
use crate::qsim::random::random_pure_state;
use crate::qsim::{
    evolve_density, exact_output_distribution, CircuitStep, DensityMatrix, NoiseRate, NoisyCircuit, OracleBindings,
    PureState, QuantumOracle,
};

const SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InfoDecayRow {
    /// Number of noise layers applied so far.
    pub t: usize,
    pub information: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InfoDecayReport {
    pub rows: Vec<InfoDecayRow>,
    /// `lhs` is the largest `information - bound` over all layers.
    pub report: CheckReport,
}

/// Tracks `I(rho_t)` against `(1 - lambda)^t n` after every noise layer.
pub fn check_info_decay(circuit: &NoisyCircuit, bindings: &OracleBindings) -> Result<InfoDecayReport> {
    let n = circuit.n_qubits() as f64;
    let keep = 1.0 - circuit.lambda().value();
    let mut rows = vec![InfoDecayRow {
        t: 0,
        information: n,
        bound: n,
    }];
    evolve_density(circuit, bindings, |t, rho| {
        rows.push(InfoDecayRow {
            t,
            information: information(rho).value,
            bound: keep.powi(t as i32) * n,
        });
    })?;
    let worst = rows
        .iter()
        .map(|r| r.information - r.bound)
        .fold(f64::NEG_INFINITY, f64::max);
    let report = CheckReport::le("information <= (1-lambda)^t n at every layer", worst, 0.0, SLACK);
    Ok(InfoDecayReport { rows, report })
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&q| m >> (n - 1 - q) & 1 == 1).collect())
        .collect()
}

/// Average information of `k`-qubit marginals against `(k/n) I(sigma)`.
pub fn check_subsystem_averaging(sigma: &DensityMatrix, k: usize) -> Result<CheckReport> {
    let n = sigma.n_qubits();
    if n > 6 {
        return Err(Error::Capacity {
            backend: "subsystem averaging",
            max: 6,
            requested: n,
        });
    }
    if k >= n {
        return Err(Error::invalid(format!("subset size {k} must be below {n}")));
    }
    let all = subsets(n, k);
    let avg = if k == 0 {
        0.0
    } else {
        let mut total = 0.0;
        for s in &all {
            let sel = SubsetSelector::new(n, s.clone())?;
            total += information(&super::restrict(sigma, &sel)?).value;
        }
        total / all.len() as f64
    };
    let rhs = k as f64 / n as f64 * information(sigma).value;
    Ok(CheckReport::le("average k-subset information <= (k/n) I(sigma)", avg, rhs, SLACK))
}

/// `max_a Pr[a with each bit flipped w.p. lambda/2 lands in omega]`.
pub fn classical_landing_probability(omega: &[u64], n: usize, lambda: f64) -> f64 {
    let p = lambda / 2.0;
    let weights: Vec<f64> = (0..=n).map(|d| p.powi(d as i32) * (1.0 - p).powi((n - d) as i32)).collect();
    let omega: Vec<u64> = omega.iter().copied().collect::<HashSet<_>>().into_iter().collect();
    (0..1u64 << n)
        .map(|a| omega.iter().map(|&x| weights[(a ^ x).count_ones() as usize]).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `Tr(Pi_omega D^n[psi])` against the classical bit-flip bound.
pub fn check_projection_bound(psi: &PureState, omega: &[u64], lambda: NoiseRate) -> Result<CheckReport> {
    let n = psi.n_qubits();
    if n > 8 {
        return Err(Error::Capacity {
            backend: "projection bound",
            max: 8,
            requested: n,
        });
    }
    if let Some(&x) = omega.iter().find(|&&x| x >> n != 0) {
        return Err(Error::invalid(format!("string {x} does not fit in {n} bits")));
    }
    let mut rho = DensityMatrix::from_pure(psi)?;
    rho.depolarize_all(lambda);
    let diag = rho.diagonal();
    let unique: HashSet<u64> = omega.iter().copied().collect();
    let lhs: f64 = unique.iter().map(|&x| diag[x as usize]).sum();
    let rhs = classical_landing_probability(omega, n, lambda.value());
    Ok(CheckReport::le(
        "Tr(Pi D[psi]) <= max_a Pr[flipped a in Omega]",
        lhs,
        rhs,
        SLACK,
    ))
}

/// Smallest Hamming distance between two distinct entries, `None` for fewer
/// than two strings.
pub fn min_pairwise_distance(strings: &[u64]) -> Option<u32> {
    let mut best = None;
    for (i, a) in strings.iter().enumerate() {
        for b in &strings[i + 1..] {
            let d = (a ^ b).count_ones();
            best = Some(best.map_or(d, |v: u32| v.min(d)));
        }
    }
    best
}

/// Fraction of random `s`-subsets of `{0,1}^m` whose minimum distance falls
/// below `(m/2)(1 - sqrt(2 log2(s^2/delta) / m))`.
pub fn check_random_subset_separation(m: usize, s: usize, delta: f64, trials: usize, seed: u64) -> Result<CheckReport> {
    if !(1..=24).contains(&m) {
        return Err(Error::invalid(format!("M = {m} outside 1..=24")));
    }
    if s == 0 || s > 1 << (m - 1) {
        return Err(Error::invalid(format!("S = {s} outside 1..=2^(M-1)")));
    }
    if !(delta > 0.0 && delta < 1.0) || trials == 0 {
        return Err(Error::invalid("need 0 < delta < 1 and trials > 0"));
    }
    let bound = m as f64 / 2.0 * (1.0 - (2.0 * ((s * s) as f64 / delta).log2() / m as f64).sqrt());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    for _ in 0..trials {
        let mut set = HashSet::with_capacity(s);
        let mut strings = Vec::with_capacity(s);
        while strings.len() < s {
            let x = rng.random::<u64>() & ((1u64 << m) - 1);
            if set.insert(x) {
                strings.push(x);
            }
        }
        if let Some(d) = min_pairwise_distance(&strings) {
            if (d as f64) < bound {
                violations += 1;
            }
        }
    }
    let rate = violations as f64 / trials as f64;
    let slack = 3.0 * (delta * (1.0 - delta) / trials as f64).sqrt();
    Ok(CheckReport::le("violation rate <= delta + 3 sigma", rate, delta + slack, 0.0)
        .with_note(format!("distance bound {bound:.4}, {trials} trials")))
}

/// Inputs for [`check_hybrid_bound`].
pub struct HybridBoundInput<'a> {
    /// Circuit calling the compared channels under `oracle_id`.
    pub template: &'a NoisyCircuit,
    pub oracle_id: &'a str,
    pub e0: Arc<dyn QuantumOracle>,
    pub e1: Arc<dyn QuantumOracle>,
    /// Bindings for any other oracle the template uses.
    pub others: &'a OracleBindings,
    /// Number of random pure states used to estimate the per-query bound.
    pub trials: usize,
    pub seed: u64,
    /// Known analytic per-query bound, if any.
    pub analytic_epsilon: Option<f64>,
}

/// Output TV of two channels plugged into a template against `epsilon * T`.
///
/// `epsilon` is the largest `||D^n[(E0 - E1)(sigma)]||_1` over random pure
/// states, the states actually reaching each call, and `analytic_epsilon`.
pub fn check_hybrid_bound(input: &HybridBoundInput<'_>) -> Result<CheckReport> {
    let c = input.template;
    let n = c.n_qubits();
    let lambda = c.lambda();
    let b0 = input.others.clone().with(input.oracle_id, input.e0.clone());
    let b1 = input.others.clone().with(input.oracle_id, input.e1.clone());
    let tv = exact_output_distribution(c, &b0)?.tv(&exact_output_distribution(c, &b1)?)?;

    let per_query = |sigma: &DensityMatrix, wires: &[usize]| -> Result<f64> {
        let mut a = sigma.clone();
        let mut b = sigma.clone();
        input.e0.apply_density(&mut a, wires)?;
        input.e1.apply_density(&mut b, wires)?;
        let mut diff = a.sub(&b)?;
        diff.depolarize_all(lambda);
        Ok(trace_norm(&diff))
    };

    let mut call_wires: Vec<Vec<usize>> = Vec::new();
    let mut eps: f64 = 0.0;
    // states entering each call in the hybrid where earlier calls used E1
    let mut rho = DensityMatrix::new(n)?;
    rho.depolarize_all(lambda);
    for step in c.steps() {
        match step {
            CircuitStep::Layer { gates } => rho.apply_layer(gates)?,
            CircuitStep::Oracle(call) => {
                if call.id == input.oracle_id {
                    eps = eps.max(per_query(&rho, &call.wires)?);
                    if !call_wires.contains(&call.wires) {
                        call_wires.push(call.wires.clone());
                    }
                }
                b1.get(&call.id)?.apply_density(&mut rho, &call.wires)?;
            }
        }
        rho.depolarize_all(lambda);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(input.seed);
    for _ in 0..input.trials {
        let sigma = DensityMatrix::from_pure(&random_pure_state(n, &mut rng)?)?;
        for wires in &call_wires {
            eps = eps.max(per_query(&sigma, wires)?);
        }
    }
    let note = match input.analytic_epsilon {
        Some(a) => {
            eps = eps.max(a);
            format!("sampled bound over {} states combined with analytic epsilon {a}", input.trials)
        }
        None => format!("sampled bound over {} states", input.trials),
    };
    let queries = c
        .steps()
        .iter()
        .filter(|s| matches!(s, CircuitStep::Oracle(o) if o.id == input.oracle_id))
        .count();
    Ok(CheckReport::le("TV(p0, p1) <= epsilon T", tv, eps * queries as f64, SLACK)
        .with_note(format!("{note}; epsilon = {eps}, T = {queries}")))
}
