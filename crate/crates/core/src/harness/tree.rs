use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{circuit_id, prepare, run_controller, Action, Controller, Edge, OracleAccess, RunConfig, Transcript};
use crate::error::{Error, Result};
use crate::qsim::{exact_output_distribution, trajectory_rng, OutcomeDistribution};

/// Largest number of leaves an exact enumeration may produce.
pub const MAX_LEAVES: usize = 1_000_000;
/// Le Cam threshold below which no constant-advantage test exists.
pub const LECAM_THRESHOLD: f64 = 1.0 / 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Leaf {
    pub prob: f64,
    pub answer: u64,
}

/// Probability of every transcript the controller can end on.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LeafDistribution {
    leaves: BTreeMap<Transcript, Leaf>,
}

impl LeafDistribution {
    pub fn leaves(&self) -> &BTreeMap<Transcript, Leaf> {
        &self.leaves
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.leaves.values().map(|l| l.prob).sum()
    }

    pub fn prob(&self, t: &Transcript) -> f64 {
        self.leaves.get(t).map_or(0.0, |l| l.prob)
    }

    fn add(&mut self, t: Transcript, prob: f64, answer: u64) {
        self.leaves.entry(t).or_insert(Leaf { prob: 0.0, answer }).prob += prob;
    }

    /// Total variation over transcripts.
    pub fn tv(&self, other: &LeafDistribution) -> f64 {
        let keys: BTreeSet<&Transcript> = self.leaves.keys().chain(other.leaves.keys()).collect();
        0.5 * keys.into_iter().map(|t| (self.prob(t) - other.prob(t)).abs()).sum::<f64>()
    }

    /// Distribution of the controller's answer.
    pub fn answer_distribution(&self) -> BTreeMap<u64, f64> {
        let mut out = BTreeMap::new();
        for l in self.leaves.values() {
            *out.entry(l.answer).or_insert(0.0) += l.prob;
        }
        out
    }

    /// Probability of each first edge.
    pub fn first_edge_marginal(&self) -> BTreeMap<Edge, f64> {
        let mut out = BTreeMap::new();
        for (t, l) in &self.leaves {
            if let Some(e) = t.edges().first() {
                *out.entry(e.clone()).or_insert(0.0) += l.prob;
            }
        }
        out
    }

    /// Uniform mixture.
    pub fn mixture(parts: &[LeafDistribution]) -> LeafDistribution {
        let w = 1.0 / parts.len().max(1) as f64;
        let mut out = LeafDistribution::default();
        for p in parts {
            for (t, l) in &p.leaves {
                out.add(t.clone(), w * l.prob, l.answer);
            }
        }
        out
    }

    fn from_counts(counts: BTreeMap<Transcript, (usize, u64)>, trials: usize) -> Self {
        let leaves = counts
            .into_iter()
            .map(|(t, (k, answer))| {
                (
                    t,
                    Leaf {
                        prob: k as f64 / trials as f64,
                        answer,
                    },
                )
            })
            .collect();
        LeafDistribution { leaves }
    }
}

fn tv_maps(a: &BTreeMap<u64, f64>, b: &BTreeMap<u64, f64>) -> f64 {
    let keys: BTreeSet<&u64> = a.keys().chain(b.keys()).collect();
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

/// Walks the learning tree of one controller against several oracles at
/// once, so branches and per-node child distributions line up.
struct Explorer<'a> {
    c: &'a dyn Controller,
    accesses: &'a [&'a OracleAccess],
    cfg: &'a RunConfig,
    caches: Vec<HashMap<String, OutcomeDistribution>>,
    out: Vec<LeafDistribution>,
    leaves: usize,
    /// Largest child-distribution TV between the first two oracles.
    epsilon: f64,
    max_edges: usize,
}

impl<'a> Explorer<'a> {
    fn new(c: &'a dyn Controller, accesses: &'a [&'a OracleAccess], cfg: &'a RunConfig) -> Self {
        Explorer {
            c,
            accesses,
            cfg,
            caches: vec![HashMap::new(); accesses.len()],
            out: vec![LeafDistribution::default(); accesses.len()],
            leaves: 0,
            epsilon: 0.0,
            max_edges: 0,
        }
    }

    fn visit(&mut self, t: Transcript, probs: Vec<f64>) -> Result<()> {
        if t.len() >= self.cfg.step_budget {
            return Err(Error::BudgetExhausted(self.cfg.step_budget));
        }
        match self.c.next_action(&t, self.cfg.controller_seed)? {
            Action::Output(answer) => {
                self.leaves += 1;
                if self.leaves > MAX_LEAVES {
                    return Err(Error::Capacity {
                        backend: "learning tree",
                        max: MAX_LEAVES,
                        requested: self.leaves,
                    });
                }
                self.max_edges = self.max_edges.max(t.len());
                for (d, &p) in self.out.iter_mut().zip(&probs) {
                    if p > 0.0 {
                        d.add(t.clone(), p, answer);
                    }
                }
                Ok(())
            }
            Action::ClassicalQuery(x) => {
                let ys = self.accesses.iter().map(|a| a.answer(x)).collect::<Result<Vec<_>>>()?;
                if ys.len() >= 2 && ys[0] != ys[1] && probs[0] > 0.0 && probs[1] > 0.0 {
                    self.epsilon = 1.0;
                }
                let distinct: BTreeSet<u64> = ys.iter().copied().collect();
                for y in distinct {
                    let p: Vec<f64> = probs.iter().zip(&ys).map(|(&p, &yi)| if yi == y { p } else { 0.0 }).collect();
                    if p.iter().any(|&v| v > 0.0) {
                        self.visit(t.extended(Edge::Classical { x, y }), p)?;
                    }
                }
                Ok(())
            }
            Action::RunCircuit(circuit) => {
                let circuit = prepare(circuit, self.cfg)?;
                let id = circuit_id(&circuit);
                let mut dists = Vec::with_capacity(self.accesses.len());
                for (k, a) in self.accesses.iter().enumerate() {
                    if !self.caches[k].contains_key(&id) {
                        let d = exact_output_distribution(&circuit, &a.bindings)?;
                        self.caches[k].insert(id.clone(), d);
                    }
                    dists.push(self.caches[k][&id].clone());
                }
                if dists.len() >= 2 && probs[0] > 0.0 && probs[1] > 0.0 {
                    self.epsilon = self.epsilon.max(dists[0].tv(&dists[1])?);
                }
                let outcomes: BTreeSet<u64> = dists.iter().flat_map(|d| d.iter().map(|(s, _)| s)).collect();
                for s in outcomes {
                    let p: Vec<f64> = probs.iter().zip(&dists).map(|(&p, d)| p * d.prob(s)).collect();
                    if p.iter().any(|&v| v > 0.0) {
                        self.visit(
                            t.extended(Edge::Circuit {
                                circuit_id: id.clone(),
                                outcome: s,
                            }),
                            p,
                        )?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Enumerates the learning tree exactly with density-matrix circuit outputs.
pub fn exact_leaf_distribution(c: &dyn Controller, access: &OracleAccess, cfg: &RunConfig) -> Result<LeafDistribution> {
    let accesses = [access];
    let mut ex = Explorer::new(c, &accesses, cfg);
    ex.visit(Transcript::new(), vec![1.0])?;
    Ok(ex.out.pop().expect("one access"))
}

/// Empirical leaf frequencies over `trials` sampled runs; trial `t` uses
/// master seed `trajectory_rng(cfg.seed, t).next_u64()`.
pub fn sampled_leaf_distribution(
    c: &dyn Controller,
    access: &OracleAccess,
    cfg: &RunConfig,
    trials: usize,
) -> Result<LeafDistribution> {
    let runs = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut trial = *cfg;
            trial.seed = trajectory_rng(cfg.seed, t).next_u64();
            run_controller(c, access, &trial)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut counts: BTreeMap<Transcript, (usize, u64)> = BTreeMap::new();
    for r in runs {
        counts.entry(r.transcript).or_insert((0, r.answer)).0 += 1;
    }
    Ok(LeafDistribution::from_counts(counts, trials))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum LeCamMode {
    Exact,
    Sampled { trials: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeCamReport {
    pub mode: LeCamMode,
    /// Exact: TV between the mixture leaf distributions. Sampled: empirical
    /// TV between the answer distributions.
    pub tv: f64,
    /// TV between the answer distributions (never larger than the leaf TV in exact mode).
    pub answer_tv: f64,
    pub threshold: f64,
    pub below_threshold: bool,
}

/// Le Cam two-point quantity for oracles drawn uniformly from each family.
pub fn lecam_advantage(
    c: &dyn Controller,
    family0: &[OracleAccess],
    family1: &[OracleAccess],
    mode: LeCamMode,
    cfg: &RunConfig,
) -> Result<LeCamReport> {
    if family0.is_empty() || family1.is_empty() {
        return Err(Error::invalid("Le Cam needs two nonempty families"));
    }
    let (tv, answer_tv) = match mode {
        LeCamMode::Exact => {
            let mix = |fam: &[OracleAccess]| -> Result<LeafDistribution> {
                let parts = fam
                    .iter()
                    .map(|a| exact_leaf_distribution(c, a, cfg))
                    .collect::<Result<Vec<_>>>()?;
                Ok(LeafDistribution::mixture(&parts))
            };
            let (m0, m1) = (mix(family0)?, mix(family1)?);
            (m0.tv(&m1), tv_maps(&m0.answer_distribution(), &m1.answer_distribution()))
        }
        LeCamMode::Sampled { trials } => {
            if trials == 0 {
                return Err(Error::invalid("sampled Le Cam needs trials > 0"));
            }
            let answers = |fam: &[OracleAccess], side: u64| -> Result<BTreeMap<u64, f64>> {
                let runs = (0..trials as u64)
                    .into_par_iter()
                    .map(|t| {
                        let mut rng = trajectory_rng(cfg.seed ^ side.wrapping_mul(0x9e37_79b9_7f4a_7c15), t);
                        let pick = rng.random_range(0..fam.len());
                        let mut trial = *cfg;
                        trial.seed = rng.next_u64();
                        run_controller(c, &fam[pick], &trial).map(|r| r.answer)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mut h = BTreeMap::new();
                for a in runs {
                    *h.entry(a).or_insert(0.0) += 1.0 / trials as f64;
                }
                Ok(h)
            };
            let v = tv_maps(&answers(family0, 0)?, &answers(family1, 1)?);
            (v, v)
        }
    };
    Ok(LeCamReport {
        mode,
        tv,
        answer_tv,
        threshold: LECAM_THRESHOLD,
        below_threshold: tv < LECAM_THRESHOLD,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationReport {
    /// Largest TV between corresponding child distributions.
    pub epsilon: f64,
    /// Number of edges on the longest path.
    pub depth: usize,
    pub leaf_tv: f64,
    /// `epsilon * depth`.
    pub bound: f64,
    pub holds: bool,
}

/// Compares the trees of `c` run against `access` and against `substitute`.
pub fn perturbation_check(
    c: &dyn Controller,
    access: &OracleAccess,
    substitute: &OracleAccess,
    cfg: &RunConfig,
) -> Result<PerturbationReport> {
    let accesses = [access, substitute];
    let mut ex = Explorer::new(c, &accesses, cfg);
    ex.visit(Transcript::new(), vec![1.0, 1.0])?;
    let leaf_tv = ex.out[0].tv(&ex.out[1]);
    let bound = ex.epsilon * ex.max_edges as f64;
    Ok(PerturbationReport {
        epsilon: ex.epsilon,
        depth: ex.max_edges,
        leaf_tv,
        bound,
        holds: leaf_tv <= bound + 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{FixedCircuitController, RandomDepth2Controller};
    use crate::qsim::{Gate, NoiseRate, NoisyCircuit, OracleBindings};

    fn cfg(lambda: f64) -> RunConfig {
        RunConfig::new(NoiseRate::new(lambda).unwrap(), 11)
    }

    #[test]
    fn deterministic_circuit_gives_one_leaf() {
        let mut c = NoisyCircuit::new(2, NoiseRate::ZERO).unwrap();
        c.layer(vec![Gate::x(0)]).unwrap();
        let ctl = FixedCircuitController::new(vec![c]);
        let d = exact_leaf_distribution(&ctl, &OracleAccess::default(), &cfg(0.0)).unwrap();
        assert_eq!(d.len(), 1);
        let (_, leaf) = d.leaves().iter().next().unwrap();
        assert_eq!((leaf.prob, leaf.answer), (1.0, 0b10));
    }

    #[test]
    fn random_trees_sum_to_one_and_match_first_circuit() {
        for seed in 0..4 {
            let ctl = RandomDepth2Controller::new(3, 2, 1);
            let access = ctl.random_access(seed).unwrap();
            let mut cf = cfg(0.2);
            cf.controller_seed = seed;
            let d = exact_leaf_distribution(&ctl, &access, &cf).unwrap();
            assert!((d.total() - 1.0).abs() < 1e-9);
            let first = ctl.circuit(&Transcript::new(), seed).unwrap().with_lambda(cf.lambda);
            let exact = exact_output_distribution(&first, &access.bindings).unwrap();
            for (e, p) in d.first_edge_marginal() {
                let Edge::Circuit { outcome, .. } = e else { panic!() };
                assert!((p - exact.prob(outcome)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sampled_leaves_converge() {
        let ctl = RandomDepth2Controller::new(2, 2, 1);
        let access = ctl.random_access(5).unwrap();
        let mut cf = cfg(0.3);
        cf.controller_seed = 5;
        let exact = exact_leaf_distribution(&ctl, &access, &cf).unwrap();
        let trials = 20_000;
        let sampled = sampled_leaf_distribution(&ctl, &access, &cf, trials).unwrap();
        let tv = exact.tv(&sampled);
        assert!(tv <= 3.0 * (exact.len() as f64 / trials as f64).sqrt(), "{tv}");
    }

    #[test]
    fn identical_families_and_identity_substitution() {
        let ctl = RandomDepth2Controller::new(2, 2, 2);
        let access = ctl.random_access(2).unwrap();
        let fam = vec![access.clone()];
        let r = lecam_advantage(&ctl, &fam, &fam, LeCamMode::Exact, &cfg(0.1)).unwrap();
        assert!(r.tv < 1e-15 && r.below_threshold);
        let p = perturbation_check(&ctl, &access, &access, &cfg(0.1)).unwrap();
        assert!(p.epsilon < 1e-15 && p.leaf_tv < 1e-15 && p.holds);
    }

    #[test]
    fn zero_probability_branches_are_skipped() {
        let ctl = |t: &Transcript, _: u64| -> Result<Action> {
            if t.is_empty() {
                let mut c = NoisyCircuit::new(1, NoiseRate::ZERO)?;
                c.layer(vec![Gate::h(0)])?;
                Ok(Action::RunCircuit(c))
            } else {
                Ok(Action::Output(t.outcomes()[0]))
            }
        };
        let d = exact_leaf_distribution(&ctl, &OracleAccess::quantum(OracleBindings::new()), &cfg(0.0)).unwrap();
        assert_eq!(d.len(), 2);
        assert!(d.leaves().values().all(|l| (l.prob - 0.5).abs() < 1e-12));
    }
}
