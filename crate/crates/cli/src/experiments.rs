//! The named experiments. Each returns a table, an optional plot and the list
//! of invariant violations it observed.

use anyhow::Result;
use rand::seq::index::sample;
use rand::RngCore;

use nisqlab::algorithms::{
    bv_bit_bound, bv_repetitions, exact_grover_success, generate_noisy_parity, grover_circuit, grover_closed_form,
    grover_template, lifted_simon_template, lifted_simon_tv, lifted_simon_tv_for, random_query_template, random_secret,
    run_noisy_bv, run_noisy_grover, shadow_distinguish, solve_noisy_parity_bruteforce, check_zalka_sum, BvRunConfig,
    ParitySource, ShadowMode, ShadowStrategy, GROVER_ORACLE, LIFTED_SIMON_ORACLE,
};
use nisqlab::codes::{code_lemma_checks, BaseCode};
use nisqlab::harness::{lecam_advantage, FixedCircuitController, LeCamMode, OracleAccess, RunConfig};
use nisqlab::metrics::{check_info_decay, check_random_subset_separation};
use nisqlab::oracles::{
    lift_to_unitary, make_bv, make_grover_phase, make_lifted_simon, make_simon, ClassicalOracle, GroverOracle,
    PauliString, SimonSpec,
};
use nisqlab::qsim::random::random_circuit;
use nisqlab::qsim::{trajectory_rng, NoiseRate, OracleBindings};

use crate::config::{usage, Backend, Params};
use crate::output::{Plot, Series, Table};
use crate::row;

pub struct ExperimentOutput {
    pub table: Table,
    pub plot: Option<Plot>,
    pub failures: Vec<String>,
    /// Seed recorded in the CSV metadata.
    pub seed: Option<u64>,
}

pub struct Experiment {
    pub name: &'static str,
    pub summary: &'static str,
    pub accepts: &'static [&'static str],
    pub run: fn(&Params) -> Result<ExperimentOutput>,
}

pub const EXPERIMENTS: &[Experiment] = &[
    Experiment {
        name: "bv-scaling",
        summary: "noisy Bernstein-Vazirani: automatic repetitions and recovery rate versus n",
        accepts: &["n", "lambda", "delta", "trials"],
        run: bv_scaling,
    },
    Experiment {
        name: "grover-degradation",
        summary: "Grover success under noise against the noiseless closed form",
        accepts: &["n", "t", "lambda", "shots", "backend"],
        run: grover_degradation,
    },
    Experiment {
        name: "shadow-decay",
        summary: "per-query trace distance of the Pauli shadow task versus weight",
        accepts: &["n", "lambda", "queries", "shots", "backend"],
        run: shadow_decay,
    },
    Experiment {
        name: "lifted-simon-tv",
        summary: "output distance between the lifted Simon oracle and the identity",
        accepts: &["n", "lambda", "queries"],
        run: lifted_simon,
    },
    Experiment {
        name: "info-decay",
        summary: "information of the state after each noise layer of random circuits",
        accepts: &["n", "lambda", "depth", "trials"],
        run: info_decay,
    },
    Experiment {
        name: "noisy-parity",
        summary: "noisy parity samples from BV circuits and brute-force recovery",
        accepts: &["n", "lambda", "k", "w-max", "shots", "trials"],
        run: noisy_parity,
    },
    Experiment {
        name: "codes-verify",
        summary: "structural checks of the concatenated Hamming code sets",
        accepts: &["trials"],
        run: codes_verify,
    },
    Experiment {
        name: "lecam",
        summary: "Le Cam two-point distances from exact learning-tree enumeration",
        accepts: &["n", "lambda", "queries"],
        run: lecam,
    },
    Experiment {
        name: "zalka",
        summary: "sum of squared query perturbations against 4 T^2",
        accepts: &["n", "t", "trials"],
        run: zalka,
    },
    Experiment {
        name: "subset-separation",
        summary: "minimum distance of random subsets of the hypercube",
        accepts: &["n", "size", "delta", "trials"],
        run: subset_separation,
    },
];

pub fn find(name: &str) -> Result<&'static Experiment> {
    EXPERIMENTS.iter().find(|e| e.name == name).ok_or_else(|| {
        let names: Vec<_> = EXPERIMENTS.iter().map(|e| e.name).collect();
        usage(format!("unknown experiment `{name}`; available: {}", names.join(", ")))
    })
}

/// Independent seed for sub-run `index` of a master seed.
fn sub_seed(seed: u64, index: u64) -> u64 {
    trajectory_rng(seed, index).next_u64()
}

fn ones(n: usize) -> u64 {
    if n >= 64 { u64::MAX } else { (1u64 << n) - 1 }
}

/// A register of `n + 1` qubits has to fit the 64-bit outcome word.
const BV_MAX_SIMULATED_N: usize = 63;

fn bv_scaling(p: &Params) -> Result<ExperimentOutput> {
    let seed = p.require_seed("bv-scaling")?;
    let delta = p.delta.unwrap_or(0.01);
    let trials = p.trials.unwrap_or(200);
    let mut table = Table::new(&[
        "n", "lambda", "delta", "M", "M_formula", "guaranteed_regime", "trials", "successes", "success_rate", "min_rate",
        "bit_bound", "queries_per_trial", "holds",
    ]);
    let (mut failures, mut series) = (Vec::new(), Vec::new());
    let mut index = 0u64;
    for lambda in p.lambdas(&[0.05]) {
        let (mut m_points, mut formula_points) = (Vec::new(), Vec::new());
        for n in p.ns(&[8, 16, 32]) {
            let cfg = BvRunConfig { n, lambda, delta, m: 0 };
            let reps = bv_repetitions(&cfg)?;
            let gap = bv_bit_bound(lambda.value()) - 0.5;
            let formula = (n as f64 / delta).ln() / (2.0 * gap * gap);
            m_points.push((n as f64, reps.m as f64));
            formula_points.push((n as f64, formula));
            let mut stream = trajectory_rng(seed, index);
            index += 1;
            let simulated = trials > 0 && n <= BV_MAX_SIMULATED_N;
            let mut successes = None;
            let mut queries = None;
            if simulated {
                let mut hits = 0usize;
                for _ in 0..trials {
                    let secret = random_secret(n, stream.next_u64());
                    let out = run_noisy_bv(&cfg, &make_bv(secret, n)?, stream.next_u64())?;
                    hits += (out.estimate == secret) as usize;
                    queries = Some(out.queries);
                }
                successes = Some(hits);
            }
            let rate = successes.map(|s| s as f64 / trials as f64);
            // The per-trial guarantee only applies in the guaranteed regime; allow 3 sigma of sampling noise.
            let min_rate = (reps.guaranteed_regime && simulated)
                .then(|| (1.0 - delta) - 3.0 * (delta * (1.0 - delta) / trials as f64).sqrt());
            let holds = match (rate, min_rate) {
                (Some(r), Some(m)) => r >= m,
                _ => true,
            };
            if !holds {
                failures.push(format!("bv-scaling n={n} lambda={}: success rate {rate:?} below {min_rate:?}", lambda.value()));
            }
            table.push(row![
                n,
                lambda.value(),
                delta,
                reps.m,
                formula,
                reps.guaranteed_regime,
                if simulated { trials } else { 0 },
                successes,
                rate,
                min_rate,
                bv_bit_bound(lambda.value()),
                queries,
                holds
            ]);
        }
        series.push(Series::measured(format!("M, lambda={}", lambda.value()), m_points));
        series.push(Series::bound(format!("ln(n/delta)/2g^2, lambda={}", lambda.value()), formula_points));
    }
    Ok(ExperimentOutput {
        table,
        plot: Some(Plot {
            title: "BV repetitions versus n".into(),
            x_label: "n".into(),
            y_label: "M".into(),
            series,
        }),
        failures,
        seed: Some(seed),
    })
}

fn grover_degradation(p: &Params) -> Result<ExperimentOutput> {
    let backend = p.backend.unwrap_or(Backend::Trajectory);
    let shots = p.shots.unwrap_or(10_000);
    let seed = match backend {
        Backend::Trajectory => Some(p.require_seed("grover-degradation with the trajectory backend")?),
        Backend::Exact => p.seed,
    };
    if backend == Backend::Trajectory && shots == 0 {
        return Err(usage("--shots must be positive"));
    }
    let mut table = Table::new(&[
        "N", "T", "lambda", "backend", "marked", "shots", "success", "std_error", "closed_form", "exact", "depth",
        "queries_per_shot", "total_queries",
    ]);
    let (mut failures, mut series) = (Vec::new(), Vec::new());
    let mut index = 0u64;
    let ts = p.ts(&[1, 2, 3]);
    for n_search in p.ns(&[4, 8, 16]) {
        let closed: Vec<(f64, f64)> = ts.iter().map(|&t| (t as f64, grover_closed_form(n_search as u64, t))).collect();
        for lambda in p.lambdas(&[0.0, 0.1]) {
            let mut points = Vec::new();
            for &t in &ts {
                let run_seed = seed.map(|s| sub_seed(s, index));
                index += 1;
                let marked = run_seed.map_or(1, |s| 1 + s % n_search as u64);
                let g = GroverOracle::new(n_search as u64, marked)?;
                let exact = exact_grover_success(&g, lambda, t)?;
                let closed_form = grover_closed_form(n_search as u64, t);
                let (success, std_error, depth, total, used_shots) = match (backend, run_seed) {
                    (Backend::Trajectory, Some(s)) => {
                        let r = run_noisy_grover(&g, lambda, t, shots, s)?;
                        (r.success, r.std_error, r.depth, Some(r.queries), Some(shots))
                    }
                    _ => (exact, 0.0, grover_circuit(&g, t, lambda)?.depth(), None, None),
                };
                if lambda.value() == 0.0 {
                    let sigma = match backend {
                        Backend::Trajectory => (closed_form * (1.0 - closed_form) / shots as f64).sqrt(),
                        Backend::Exact => 0.0,
                    };
                    if (success - closed_form).abs() > 3.0 * sigma + 1e-9 {
                        failures.push(format!("grover N={n_search} T={t}: noiseless success {success} vs {closed_form}"));
                    }
                }
                points.push((t as f64, success));
                table.push(row![
                    n_search,
                    t,
                    lambda.value(),
                    backend.to_string(),
                    marked,
                    used_shots,
                    success,
                    std_error,
                    closed_form,
                    exact,
                    depth,
                    t,
                    total
                ]);
            }
            series.push(Series::measured(format!("N={n_search}, lambda={}", lambda.value()), points));
        }
        series.push(Series::bound(format!("closed form, N={n_search}"), closed));
    }
    Ok(ExperimentOutput {
        table,
        plot: Some(Plot {
            title: "Grover success versus iterations".into(),
            x_label: "T".into(),
            y_label: "success probability".into(),
            series,
        }),
        failures,
        seed,
    })
}

fn shadow_decay(p: &Params) -> Result<ExperimentOutput> {
    let backend = p.backend.unwrap_or(Backend::Exact);
    let queries = p.queries.unwrap_or(1);
    let (mode, seed) = match backend {
        Backend::Exact => (ShadowMode::Exact, p.seed),
        Backend::Trajectory => (
            ShadowMode::Sampled {
                shots: p.shots.unwrap_or(10_000),
            },
            Some(p.require_seed("shadow-decay with the trajectory backend")?),
        ),
    };
    let mut table = Table::new(&[
        "n", "pauli", "weight", "lambda", "trace_distance", "bound", "abs_error", "q1", "q0", "queries", "advantage",
    ]);
    let (mut failures, mut series) = (Vec::new(), Vec::new());
    for lambda in p.lambdas(&[0.1]) {
        let (mut measured, mut bound) = (Vec::new(), Vec::new());
        for n in p.ns(&[1, 2, 3, 4, 5, 6]) {
            if n == 0 {
                return Err(usage("shadow-decay needs n >= 1"));
            }
            let pauli: PauliString = "Z".repeat(n).parse()?;
            let r = shadow_distinguish(&pauli, lambda, queries, ShadowStrategy::PauliParity, mode, seed.unwrap_or(0))?;
            let expect = (1.0 - lambda.value()).powi(n as i32);
            let err = (r.trace_distance_per_query - expect).abs();
            if err > 1e-10 {
                failures.push(format!("shadow n={n} lambda={}: {} vs {expect}", lambda.value(), r.trace_distance_per_query));
            }
            measured.push((n as f64, r.trace_distance_per_query));
            bound.push((n as f64, expect));
            table.push(row![
                n,
                pauli.to_string(),
                n,
                lambda.value(),
                r.trace_distance_per_query,
                expect,
                err,
                r.q1,
                r.q0,
                queries,
                r.advantage
            ]);
        }
        series.push(Series::measured(format!("measured, lambda={}", lambda.value()), measured));
        series.push(Series::bound(format!("(1-lambda)^n, lambda={}", lambda.value()), bound));
    }
    Ok(ExperimentOutput {
        table,
        plot: Some(Plot {
            title: "Per-query trace distance versus Pauli weight".into(),
            x_label: "weight |P| = n".into(),
            y_label: "trace distance".into(),
            series,
        }),
        failures,
        seed,
    })
}

fn lifted_simon(p: &Params) -> Result<ExperimentOutput> {
    // The seed picks the Simon function; the distance itself is exact.
    let seed = p.seed.unwrap_or(0);
    let queries = p.queries.unwrap_or(1);
    let mut table = Table::new(&["n", "lambda", "queries", "secret", "tv", "bound", "holds"]);
    let (mut failures, mut series) = (Vec::new(), Vec::new());
    for lambda in p.lambdas(&[0.3, 0.6]) {
        let (mut measured, mut bound) = (Vec::new(), Vec::new());
        for n in p.ns(&[2, 3]) {
            let r = lifted_simon_tv_for(n, lambda, queries, ones(n), seed)?;
            if !r.holds {
                failures.push(format!("lifted simon n={n} lambda={}: tv {} > {}", lambda.value(), r.tv, r.bound));
            }
            measured.push((n as f64, r.tv));
            bound.push((n as f64, r.bound));
            table.push(row![n, lambda.value(), queries, format!("{:0n$b}", ones(n)), r.tv, r.bound, r.holds]);
        }
        series.push(Series::measured(format!("TV, lambda={}", lambda.value()), measured));
        series.push(Series::bound(format!("bound, lambda={}", lambda.value()), bound));
    }
    Ok(ExperimentOutput {
        table,
        plot: Some(Plot {
            title: "Lifted Simon versus identity".into(),
            x_label: "n".into(),
            y_label: "total variation".into(),
            series,
        }),
        failures,
        seed: Some(seed),
    })
}

fn info_decay(p: &Params) -> Result<ExperimentOutput> {
    let seed = p.require_seed("info-decay")?;
    let depth = p.depth.unwrap_or(8);
    let circuits = p.trials.unwrap_or(10);
    let mut table = Table::new(&["circuit", "n", "lambda", "depth", "t", "information", "bound", "holds"]);
    let (mut failures, mut series) = (Vec::new(), Vec::new());
    let empty = OracleBindings::new();
    let mut index = 0u64;
    for n in p.ns(&[3]) {
        for lambda in p.lambdas(&[0.2, 0.5]) {
            for i in 0..circuits {
                let c = random_circuit(n, depth, lambda, &mut trajectory_rng(seed, index))?;
                index += 1;
                let r = check_info_decay(&c, &empty)?;
                for row in &r.rows {
                    let holds = row.information <= row.bound + 1e-9;
                    if !holds {
                        failures.push(format!("info decay circuit {i} n={n} lambda={} t={}", lambda.value(), row.t));
                    }
                    table.push(row![i, n, lambda.value(), depth, row.t, row.information, row.bound, holds]);
                }
                if i == 0 {
                    let label = format!("n={n}, lambda={}", lambda.value());
                    series.push(Series::measured(
                        format!("I, {label}"),
                        r.rows.iter().map(|x| (x.t as f64, x.information)).collect(),
                    ));
                    series.push(Series::bound(
                        format!("bound, {label}"),
                        r.rows.iter().map(|x| (x.t as f64, x.bound)).collect(),
                    ));
                }
            }
        }
    }
    Ok(ExperimentOutput {
        table,
        plot: Some(Plot {
            title: "Information after t noise layers (first circuit)".into(),
            x_label: "t".into(),
            y_label: "information".into(),
            series,
        }),
        failures,
        seed: Some(seed),
    })
}

fn noisy_parity(p: &Params) -> Result<ExperimentOutput> {
    let seed = p.require_seed("noisy-parity")?;
    let k = p.k.unwrap_or(6);
    let w_max = p.w_max.unwrap_or(2);
    let samples = p.shots.unwrap_or(2000);
    let instances = p.trials.unwrap_or(20);
    if w_max == 0 || w_max > k {
        return Err(usage(format!("need 1 <= w-max <= k, got w-max = {w_max}, k = {k}")));
    }
    let mut table = Table::new(&[
        "instance", "n", "k", "w_max", "lambda", "samples", "secret", "eta", "estimate", "recovered", "margin",
    ]);
    let mut failures = Vec::new();
    let mut index = 0u64;
    for n in p.ns(&[12]) {
        if k > n || n > 63 {
            return Err(usage(format!("need k <= n <= 63, got k = {k}, n = {n}")));
        }
        for lambda in p.lambdas(&[0.1]) {
            for i in 0..instances {
                let mut rng = trajectory_rng(seed, index);
                index += 1;
                let weight = 1 + (rng.next_u64() % w_max as u64) as usize;
                let secret = sample(&mut rng, k, weight).iter().fold(0u64, |s, pos| s | 1 << (n - 1 - pos));
                let inst = generate_noisy_parity(
                    &ParitySource::Bv(make_bv(secret, n)?),
                    secret,
                    lambda,
                    k,
                    w_max,
                    samples,
                    rng.next_u64(),
                )?;
                let eta = inst.eta.unwrap_or(0.5);
                if 1.0 - 2.0 * eta <= 0.0 {
                    failures.push(format!("noisy parity instance {i}: eta = {eta}"));
                }
                let rec = solve_noisy_parity_bruteforce(&inst, k, w_max)?;
                table.push(row![
                    i,
                    n,
                    k,
                    w_max,
                    lambda.value(),
                    samples,
                    format!("{secret:0n$b}"),
                    eta,
                    rec.estimate.map(|s| format!("{s:0n$b}")),
                    rec.estimate == Some(secret),
                    rec.best_agreement - rec.runner_up_agreement
                ]);
            }
        }
    }
    Ok(ExperimentOutput {
        table,
        plot: None,
        failures,
        seed: Some(seed),
    })
}

fn codes_verify(p: &Params) -> Result<ExperimentOutput> {
    let seed = p.require_seed("codes-verify")?;
    let reports = code_lemma_checks(&BaseCode::hamming_7_4(), p.trials.unwrap_or(10_000), seed)?;
    let mut table = Table::new(&["check", "lhs", "rhs", "tolerance", "holds", "note"]);
    let mut failures = Vec::new();
    for r in reports {
        if !r.holds {
            failures.push(format!("codes: {}", r.claim));
        }
        table.push(row![r.claim, r.lhs, r.rhs, r.tolerance, r.holds, r.note]);
    }
    Ok(ExperimentOutput {
        table,
        plot: None,
        failures,
        seed: Some(seed),
    })
}

/// Size of the Grover search space used by the `lecam` experiment.
const LECAM_GROVER_N: u64 = 8;

fn lecam(p: &Params) -> Result<ExperimentOutput> {
    let seed = p.seed.unwrap_or(0);
    let queries = p.queries.unwrap_or(1);
    let mut table = Table::new(&[
        "task", "size", "lambda", "queries", "lecam_tv", "answer_tv", "reference_tv", "threshold", "below_threshold",
    ]);
    let mut failures = Vec::new();
    let lifted_access =
        |o: &ClassicalOracle| OracleAccess::quantum(OracleBindings::new().with(LIFTED_SIMON_ORACLE, lift_to_unitary(o)));
    let grover_access = |i: u64| -> Result<OracleAccess> {
        let g = GroverOracle::new(LECAM_GROVER_N, i)?;
        Ok(OracleAccess::quantum(OracleBindings::new().with(GROVER_ORACLE, make_grover_phase(&g))))
    };
    for lambda in p.lambdas(&[0.0, 0.6]) {
        let cfg = RunConfig::new(lambda, 0);
        for n in p.ns(&[2]) {
            let f = make_simon(&SimonSpec::new(n, ones(n), seed)?)?;
            let identity = ClassicalOracle::new("identity", 2 * n, n, |_| 0)?;
            let ctl = FixedCircuitController::new(vec![lifted_simon_template(n, NoiseRate::ZERO, queries)?]);
            let r = lecam_advantage(
                &ctl,
                &[lifted_access(&identity)],
                &[lifted_access(&make_lifted_simon(&f)?)],
                LeCamMode::Exact,
                &cfg,
            )?;
            let direct = lifted_simon_tv(&f, &lifted_simon_template(n, lambda, queries)?)?.tv;
            if (r.tv - direct).abs() > 1e-9 {
                failures.push(format!("lecam lifted simon n={n}: {} vs direct {direct}", r.tv));
            }
            table.push(row![
                "lifted-simon",
                n,
                lambda.value(),
                queries,
                r.tv,
                r.answer_tv,
                direct,
                r.threshold,
                r.below_threshold
            ]);
        }
        let ctl = FixedCircuitController::new(vec![grover_template(LECAM_GROVER_N, queries)?]);
        let family1 = (1..=LECAM_GROVER_N).map(grover_access).collect::<Result<Vec<_>>>()?;
        let r = lecam_advantage(&ctl, &[grover_access(0)?], &family1, LeCamMode::Exact, &cfg)?;
        table.push(row![
            "grover-mixture",
            LECAM_GROVER_N,
            lambda.value(),
            queries,
            r.tv,
            r.answer_tv,
            None::<f64>,
            r.threshold,
            r.below_threshold
        ]);
    }
    Ok(ExperimentOutput {
        table,
        plot: None,
        failures,
        seed: Some(seed),
    })
}

fn zalka(p: &Params) -> Result<ExperimentOutput> {
    let random_templates = p.trials.unwrap_or(20);
    let seed = if random_templates > 0 {
        Some(p.require_seed("zalka with random templates")?)
    } else {
        p.seed
    };
    let mut table = Table::new(&["template", "N", "T", "qubits", "sum", "bound", "holds"]);
    let mut failures = Vec::new();
    let mut index = 0u64;
    for n_search in p.ns(&[8]) {
        let wires = GroverOracle::new(n_search as u64, 0)?.wires();
        for t in p.ts(&[1, 2, 3]) {
            let mut templates = vec![("grover".to_string(), grover_template(n_search as u64, t)?)];
            if let Some(s) = seed {
                let mut rng = trajectory_rng(s, index);
                index += 1;
                for i in 0..random_templates {
                    templates.push((format!("random-{i}"), random_query_template(n_search as u64, wires + i % 2, t, &mut rng)?));
                }
            }
            for (name, c) in templates {
                let r = check_zalka_sum(&c, GROVER_ORACLE, n_search as u64)?;
                if !r.holds {
                    failures.push(format!("zalka {name} N={n_search} T={t}: {} > {}", r.lhs, r.rhs));
                }
                table.push(row![name, n_search, t, c.n_qubits(), r.lhs, r.rhs, r.holds]);
            }
        }
    }
    Ok(ExperimentOutput {
        table,
        plot: None,
        failures,
        seed,
    })
}

fn subset_separation(p: &Params) -> Result<ExperimentOutput> {
    let seed = p.require_seed("subset-separation")?;
    let s = p.size.unwrap_or(8);
    let delta = p.delta.unwrap_or(0.1);
    let trials = p.trials.unwrap_or(1000);
    let mut table = Table::new(&["M", "S", "delta", "trials", "violation_rate", "allowed", "distance_bound", "holds"]);
    let (mut failures, mut measured, mut allowed) = (Vec::new(), Vec::new(), Vec::new());
    for (i, m) in p.ns(&[20, 22, 24]).into_iter().enumerate() {
        let r = check_random_subset_separation(m, s, delta, trials, sub_seed(seed, i as u64))?;
        let bound = m as f64 / 2.0 * (1.0 - (2.0 * ((s * s) as f64 / delta).log2() / m as f64).sqrt());
        if !r.holds {
            failures.push(format!("subset separation M={m}: rate {} > {}", r.lhs, r.rhs));
        }
        measured.push((m as f64, r.lhs));
        allowed.push((m as f64, r.rhs));
        table.push(row![m, s, delta, trials, r.lhs, r.rhs, bound, r.holds]);
    }
    Ok(ExperimentOutput {
        table,
        plot: Some(Plot {
            title: format!("Random {s}-subsets: distance violations"),
            x_label: "M".into(),
            y_label: "violation rate".into(),
            series: vec![
                Series::measured("violation rate", measured),
                Series::bound("delta + 3 sigma", allowed),
            ],
        }),
        failures,
        seed: Some(seed),
    })
}
