//! Property suites run by `nisqlab verify`. Every check yields a
//! [`CheckReport`]; a check that errors counts as failed.

use serde::Serialize;

use nisqlab::algorithms::{
    bv_bit_bound, bv_exact_bit_success, bv_repetitions, bv_secret, check_zalka_sum, exact_grover_success, generate_noisy_parity,
    grover_closed_form, grover_template, lifted_simon_bound, lifted_simon_template, lifted_simon_tv, lifted_simon_tv_for,
    run_noisy_bv, shadow_distinguish, solve_noisy_parity_bruteforce, BvRunConfig, ParitySource, ShadowMode,
    ShadowStrategy, LIFTED_SIMON_ORACLE,
};
use nisqlab::codes::{code_lemma_checks, BaseCode};
use nisqlab::error::Result;
use nisqlab::harness::{
    exact_leaf_distribution, lecam_advantage, perturbation_check, run_controller, BvController, FixedCircuitController,
    LeCamMode, OracleAccess, RandomDepth2Controller, RunConfig,
};
use nisqlab::metrics::{
    check_info_decay, check_projection_bound, check_random_subset_separation, check_subsystem_averaging, CheckReport,
};
use nisqlab::oracles::{lift_to_unitary, make_bv, make_lifted_simon, make_simon, ClassicalOracle, GroverOracle, PauliString, SimonSpec};
use nisqlab::qsim::random::{random_circuit, random_density, random_pure_state};
use nisqlab::qsim::{exact_output_distribution, sample_distribution, trajectory_rng, NoiseRate, OracleBindings};

#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub suite: &'static str,
    #[serde(flatten)]
    pub report: CheckReport,
}

pub struct Recorder {
    suite: &'static str,
    pub entries: Vec<Entry>,
}

impl Recorder {
    fn check(&mut self, claim: &str, f: impl FnOnce() -> Result<CheckReport>) {
        let report = f().unwrap_or_else(|e| CheckReport::boolean(claim, false).with_note(format!("error: {e}")));
        self.entries.push(Entry {
            suite: self.suite,
            report,
        });
    }
}

pub struct Suite {
    pub name: &'static str,
    run: fn(&mut Recorder),
}

pub const SUITES: &[Suite] = &[
    Suite { name: "qsim", run: qsim },
    Suite { name: "metrics", run: metrics },
    Suite { name: "oracles", run: oracles },
    Suite { name: "codes", run: codes },
    Suite { name: "algorithms", run: algorithms },
    Suite { name: "harness", run: harness },
];

pub fn run_suite(suite: &Suite) -> Vec<Entry> {
    let mut rec = Recorder {
        suite: suite.name,
        entries: Vec::new(),
    };
    (suite.run)(&mut rec);
    rec.entries
}

fn rate(l: f64) -> NoiseRate {
    NoiseRate::new(l).expect("constant rate")
}

fn qsim(r: &mut Recorder) {
    let empty = OracleBindings::new();
    r.check("exact distributions are normalized", || {
        let mut worst: f64 = 0.0;
        for i in 0..6u64 {
            let c = random_circuit(2 + i as usize % 3, 4, rate([0.2, 0.5][i as usize % 2]), &mut trajectory_rng(11, i))?;
            let d = exact_output_distribution(&c, &empty)?;
            let total: f64 = d.iter().map(|(_, p)| p).sum();
            let negative = d.iter().map(|(_, p)| (-p).max(0.0)).fold(0.0, f64::max);
            worst = worst.max((total - 1.0).abs()).max(negative);
        }
        Ok(CheckReport::le("exact distributions are normalized", worst, 0.0, 1e-9))
    });
    r.check("trajectory sampling matches the exact distribution", || {
        let mut worst: f64 = 0.0;
        for i in 0..4u64 {
            let c = random_circuit(3, 4, rate([0.2, 0.5][i as usize % 2]), &mut trajectory_rng(12, i))?;
            let exact = exact_output_distribution(&c, &empty)?;
            let sampled = sample_distribution(&c, &empty, 20_000, i)?;
            worst = worst.max(exact.tv(&sampled)?);
        }
        Ok(CheckReport::le("trajectory sampling matches the exact distribution", worst, 0.03, 0.0)
            .with_note("4 circuits, 3 qubits, 2*10^4 shots"))
    });
    r.check("lambda = 1 gives the uniform distribution", || {
        let c = random_circuit(3, 3, rate(1.0), &mut trajectory_rng(13, 0))?;
        let d = exact_output_distribution(&c, &empty)?;
        let tv = 0.5 * (0..8u64).map(|x| (d.prob(x) - 0.125).abs()).sum::<f64>();
        Ok(CheckReport::le("lambda = 1 gives the uniform distribution", tv, 0.0, 1e-9))
    });
}

fn metrics(r: &mut Recorder) {
    let empty = OracleBindings::new();
    r.check("information decays as (1 - lambda)^t n", || {
        let mut worst = f64::NEG_INFINITY;
        for i in 0..8u64 {
            let c = random_circuit(1 + i as usize % 4, 6, rate([0.2, 0.5][i as usize % 2]), &mut trajectory_rng(21, i))?;
            worst = worst.max(check_info_decay(&c, &empty)?.report.lhs);
        }
        Ok(CheckReport::le("information decays as (1 - lambda)^t n", worst, 0.0, 1e-9)
            .with_note("lhs is the largest I(rho_t) - bound"))
    });
    r.check("subsystem averaging", || {
        let sigma = random_density(4, 2, &mut trajectory_rng(22, 0))?;
        check_subsystem_averaging(&sigma, 2)
    });
    r.check("projection bound", || {
        let psi = random_pure_state(4, &mut trajectory_rng(23, 0))?;
        check_projection_bound(&psi, &[0b0000, 0b0111, 0b1011], rate(0.3))
    });
    r.check("random subset separation", || check_random_subset_separation(12, 8, 0.1, 500, 24));
}

fn oracles(r: &mut Recorder) {
    r.check("BV oracle exposes its secret as a linear form", || {
        let s = 0b1011_0110;
        Ok(CheckReport::boolean(
            "BV oracle exposes its secret as a linear form",
            bv_secret(&make_bv(s, 8)?) == Some(s),
        ))
    });
    r.check("Simon function is two-to-one with period s", || {
        let (n, s) = (4, 0b0110);
        let f = make_simon(&SimonSpec::new(n, s, 31)?)?;
        let periodic = (0..1u64 << n).all(|x| f.peek(x) == f.peek(x ^ s));
        let images: std::collections::BTreeSet<u64> = (0..1u64 << n).map(|x| f.peek(x)).collect();
        Ok(CheckReport::boolean(
            "Simon function is two-to-one with period s",
            periodic && images.len() == 1 << (n - 1),
        ))
    });
    r.check("lifted oracle is f on zero padding and zero elsewhere", || {
        let n = 3;
        let f = make_simon(&SimonSpec::new(n, 0b101, 32)?)?;
        let g = make_lifted_simon(&f)?;
        let ok = (0..1u64 << n).all(|x| {
            g.peek(x << n) == f.peek(x) && (1..1u64 << n).all(|y| g.peek(x << n | y) == 0)
        });
        Ok(CheckReport::boolean("lifted oracle is f on zero padding and zero elsewhere", ok))
    });
}

fn codes(r: &mut Recorder) {
    match code_lemma_checks(&BaseCode::hamming_7_4(), 2000, 41) {
        Ok(reports) => {
            for report in reports {
                r.check("", || Ok(report));
            }
        }
        Err(e) => r.check("code lemma checks", || Err(e)),
    }
}

fn algorithms(r: &mut Recorder) {
    r.check("shadow per-query trace distance is (1 - lambda)^|P|", || {
        let mut worst: f64 = 0.0;
        for n in 1..=4 {
            for lambda in [0.1, 0.3] {
                let p: PauliString = "Z".repeat(n).parse()?;
                let d = shadow_distinguish(&p, rate(lambda), 1, ShadowStrategy::PauliParity, ShadowMode::Exact, 0)?;
                worst = worst.max((d.trace_distance_per_query - (1.0f64 - lambda).powi(n as i32)).abs());
            }
        }
        Ok(CheckReport::le("shadow per-query trace distance is (1 - lambda)^|P|", worst, 0.0, 1e-10))
    });
    r.check("noiseless Grover matches the closed form", || {
        let mut worst: f64 = 0.0;
        for n in [4u64, 8, 16] {
            for t in 1..=3 {
                let exact = exact_grover_success(&GroverOracle::new(n, 1)?, NoiseRate::ZERO, t)?;
                worst = worst.max((exact - grover_closed_form(n, t)).abs());
            }
        }
        Ok(CheckReport::le("noiseless Grover matches the closed form", worst, 0.0, 1e-9))
    });
    r.check("noise lowers Grover success", || {
        let mut worst = f64::NEG_INFINITY;
        for n in [8u64, 16] {
            for t in 1..=2 {
                let g = GroverOracle::new(n, 1)?;
                let gap = exact_grover_success(&g, rate(0.1), t)? - exact_grover_success(&g, NoiseRate::ZERO, t)?;
                worst = worst.max(gap);
            }
        }
        Ok(CheckReport::le("noise lowers Grover success", worst, -1e-6, 0.0)
            .with_note("lhs is the largest noisy minus noiseless success"))
    });
    r.check("BV per-bit success is at least (1 - lambda)^6", || {
        let lambda = 0.1;
        let worst = bv_exact_bit_success(&make_bv(0b1011, 4)?, rate(lambda))?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        Ok(CheckReport::le("BV per-bit success is at least (1 - lambda)^6", bv_bit_bound(lambda), worst, 1e-12))
    });
    r.check("BV repetitions grow by a constant per doubling of n", || {
        let m = |n| {
            bv_repetitions(&BvRunConfig {
                n,
                lambda: rate(0.05),
                delta: 0.01,
                m: 0,
            })
            .map(|r| r.m as f64)
        };
        let (a, b, c) = (m(8)?, m(16)?, m(32)?);
        Ok(CheckReport::le("BV repetitions grow by a constant per doubling of n", ((c - b) - (b - a)).abs(), 1.0, 0.0))
    });
    r.check("noisy BV recovers the secret", || {
        let s = 0b1100_1010;
        let cfg = BvRunConfig {
            n: 8,
            lambda: rate(0.02),
            delta: 0.01,
            m: 0,
        };
        let hits = (0..20).filter_map(|seed| run_noisy_bv(&cfg, &make_bv(s, 8).ok()?, seed).ok()).filter(|o| o.estimate == s).count();
        Ok(CheckReport::le("noisy BV recovers the secret", 19.0, hits as f64, 0.0).with_note("20 seeds"))
    });
    r.check("lifted Simon distance obeys 4 exp(-lambda n / 4)", || {
        let mut worst = f64::NEG_INFINITY;
        for n in [2, 3] {
            let rep = lifted_simon_tv_for(n, rate(0.6), 1, (1 << n) - 1, 0)?;
            worst = worst.max(rep.tv - lifted_simon_bound(n, 0.6, 1));
        }
        Ok(CheckReport::le("lifted Simon distance obeys 4 exp(-lambda n / 4)", worst, 0.0, 1e-12))
    });
    r.check("Grover template satisfies the 4 T^2 bound", || {
        let mut worst = f64::NEG_INFINITY;
        for t in 1..=3 {
            let rep = check_zalka_sum(&grover_template(8, t)?, nisqlab::algorithms::GROVER_ORACLE, 8)?;
            worst = worst.max(rep.lhs - rep.rhs);
        }
        Ok(CheckReport::le("Grover template satisfies the 4 T^2 bound", worst, 0.0, 1e-9))
    });
    r.check("noisy parity recovery", || {
        let (n, k, w_max) = (10, 5, 2);
        let s = 0b10_1000_0000;
        let inst = generate_noisy_parity(&ParitySource::Bv(make_bv(s, n)?), s, rate(0.05), k, w_max, 1000, 51)?;
        let rec = solve_noisy_parity_bruteforce(&inst, k, w_max)?;
        Ok(CheckReport::boolean("noisy parity recovery", rec.estimate == Some(s))
            .with_note(format!("eta = {:.4}", inst.eta.unwrap_or(f64::NAN))))
    });
}

fn harness(r: &mut Recorder) {
    r.check("Le Cam distance equals the direct lifted Simon distance", || {
        let lambda = rate(0.6);
        let f = make_simon(&SimonSpec::new(2, 0b11, 0)?)?;
        let direct = lifted_simon_tv(&f, &lifted_simon_template(2, lambda, 1)?)?;
        let access =
            |o: &ClassicalOracle| OracleAccess::quantum(OracleBindings::new().with(LIFTED_SIMON_ORACLE, lift_to_unitary(o)));
        let identity = ClassicalOracle::new("identity", 4, 2, |_| 0)?;
        let ctl = FixedCircuitController::new(vec![lifted_simon_template(2, NoiseRate::ZERO, 1)?]);
        let rep = lecam_advantage(
            &ctl,
            &[access(&identity)],
            &[access(&make_lifted_simon(&f)?)],
            LeCamMode::Exact,
            &RunConfig::new(lambda, 0),
        )?;
        Ok(CheckReport::eq("Le Cam distance equals the direct lifted Simon distance", rep.tv, direct.tv, 1e-9))
    });
    r.check("leaf TV is at most epsilon N", || {
        let mut worst = f64::NEG_INFINITY;
        for seed in 0..3u64 {
            let ctl = RandomDepth2Controller::new(3, 3, 1 + (seed % 2) as usize);
            let mut cfg = RunConfig::new(rate(0.1), 0);
            cfg.controller_seed = seed;
            let rep = perturbation_check(&ctl, &ctl.random_access(seed)?, &ctl.perturbed_access(seed, 0.3)?, &cfg)?;
            worst = worst.max(rep.leaf_tv - rep.bound);
        }
        Ok(CheckReport::le("leaf TV is at most epsilon N", worst, 0.0, 1e-9))
    });
    r.check("leaf probabilities sum to 1", || {
        let ctl = RandomDepth2Controller::new(3, 3, 2);
        let mut cfg = RunConfig::new(rate(0.2), 0);
        cfg.controller_seed = 5;
        let d = exact_leaf_distribution(&ctl, &ctl.random_access(5)?, &cfg)?;
        Ok(CheckReport::eq("leaf probabilities sum to 1", d.total(), 1.0, 1e-9))
    });
    r.check("BV controller reproduces the standalone run", || {
        let lambda = rate(0.05);
        let o = make_bv(0b10_1101, 6)?;
        let cfg = BvRunConfig {
            n: 6,
            lambda,
            delta: 0.01,
            m: 7,
        };
        let standalone = run_noisy_bv(&cfg, &o, 3)?;
        let rec = run_controller(&BvController::new(6, 7)?, &BvController::access(&o), &RunConfig::new(lambda, 3))?;
        Ok(CheckReport::boolean(
            "BV controller reproduces the standalone run",
            rec.answer == standalone.estimate && rec.queries == standalone.queries,
        ))
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes() {
        for suite in SUITES {
            for e in run_suite(suite) {
                assert!(e.report.holds, "{}: {:?}", suite.name, e.report);
            }
        }
    }
}
