//! Parameter resolution: command-line flags override the JSON config file,
//! which overrides per-experiment defaults. `NISQLAB_SEED` supplies the seed
//! only when neither flags nor the file do.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use serde::Deserialize;

use nisqlab::qsim::NoiseRate;

pub const SEED_ENV: &str = "NISQLAB_SEED";

/// Bad invocation: unknown names, malformed values, missing seed.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Trajectory,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Trajectory => "trajectory",
        })
    }
}

/// Flags shared by `simulate` and `experiment`.
#[derive(Args, Clone, Debug, Default)]
pub struct ParamArgs {
    /// JSON file with any of these parameters; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed; falls back to the NISQLAB_SEED environment variable.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub shots: Option<usize>,
    /// Noise rate or comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Size parameter: single value, list "8,16" or inclusive range "1..6".
    #[arg(long)]
    pub n: Option<String>,
    /// Query count(s); same syntax as --n.
    #[arg(long)]
    pub t: Option<String>,
    /// Output directory; without it the CSV goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub backend: Option<Backend>,
    /// Cap on worker threads.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub queries: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "w-max")]
    pub w_max: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub size: Option<usize>,
    /// Circuit JSON for `simulate`.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
}

/// A list-valued entry in the config file: a number, an array, or the same
/// text syntax the flags accept.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum ListValue {
    Number(f64),
    List(Vec<f64>),
    Text(String),
}

impl ListValue {
    fn into_text(self) -> String {
        match self {
            ListValue::Number(x) => x.to_string(),
            ListValue::List(xs) => xs.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
            ListValue::Text(s) => s,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    experiment: Option<String>,
    seed: Option<u64>,
    shots: Option<usize>,
    lambda: Option<ListValue>,
    n: Option<ListValue>,
    t: Option<ListValue>,
    out: Option<PathBuf>,
    backend: Option<Backend>,
    threads: Option<usize>,
    delta: Option<f64>,
    trials: Option<usize>,
    queries: Option<usize>,
    k: Option<usize>,
    w_max: Option<usize>,
    depth: Option<usize>,
    size: Option<usize>,
    circuit: Option<PathBuf>,
}

/// Fully merged parameters.
#[derive(Clone, Debug, Default)]
pub struct Params {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub shots: Option<usize>,
    pub lambda: Option<Vec<f64>>,
    pub n: Option<Vec<usize>>,
    pub t: Option<Vec<usize>>,
    pub out: Option<PathBuf>,
    pub backend: Option<Backend>,
    pub threads: Option<usize>,
    pub delta: Option<f64>,
    pub trials: Option<usize>,
    pub queries: Option<usize>,
    pub k: Option<usize>,
    pub w_max: Option<usize>,
    pub depth: Option<usize>,
    pub size: Option<usize>,
    pub circuit: Option<PathBuf>,
}

fn load_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))
}

fn parse_lambdas(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            let v: f64 = x.trim().parse().map_err(|_| usage(format!("bad lambda value `{x}`")))?;
            NoiseRate::new(v).map_err(|_| usage(format!("lambda {v} outside [0, 1]")))?;
            Ok(v)
        })
        .collect()
}

fn parse_int(x: &str, what: &str) -> Result<usize> {
    let x = x.trim();
    // Config arrays arrive as floats; accept "8" and "8.0" alike.
    if let Ok(v) = x.parse::<usize>() {
        return Ok(v);
    }
    match x.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v <= usize::MAX as f64 => Ok(v as usize),
        _ => Err(usage(format!("bad {what} value `{x}`"))),
    }
}

/// `"5"`, `"8,16,32"` or the inclusive range `"1..6"` (also `"1..=6"`).
pub fn parse_int_list(s: &str, what: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b) = (parse_int(a, what)?, parse_int(b, what)?);
        if a > b {
            return Err(usage(format!("empty {what} range `{s}`")));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| parse_int(x, what)).collect()
}

impl Params {
    pub fn resolve(args: &ParamArgs) -> Result<Params> {
        let file = match &args.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };
        let lambda_text = args.lambda.clone().or(file.lambda.map(ListValue::into_text));
        let n_text = args.n.clone().or(file.n.map(ListValue::into_text));
        let t_text = args.t.clone().or(file.t.map(ListValue::into_text));
        let seed = match args.seed.or(file.seed) {
            Some(s) => Some(s),
            None => match std::env::var(SEED_ENV) {
                Ok(v) => Some(v.trim().parse().map_err(|_| usage(format!("{SEED_ENV}=`{v}` is not a u64")))?),
                Err(_) => None,
            },
        };
        Ok(Params {
            experiment: file.experiment,
            seed,
            shots: args.shots.or(file.shots),
            lambda: lambda_text.as_deref().map(parse_lambdas).transpose()?,
            n: n_text.as_deref().map(|s| parse_int_list(s, "n")).transpose()?,
            t: t_text.as_deref().map(|s| parse_int_list(s, "t")).transpose()?,
            out: args.out.clone().or(file.out),
            backend: args.backend.or(file.backend),
            threads: args.threads.or(file.threads),
            delta: args.delta.or(file.delta),
            trials: args.trials.or(file.trials),
            queries: args.queries.or(file.queries),
            k: args.k.or(file.k),
            w_max: args.w_max.or(file.w_max),
            depth: args.depth.or(file.depth),
            size: args.size.or(file.size),
            circuit: args.circuit.clone().or(file.circuit),
        })
    }

    /// Names of the command-specific parameters that were set.
    pub fn present(&self) -> Vec<&'static str> {
        let flags = [
            ("shots", self.shots.is_some()),
            ("lambda", self.lambda.is_some()),
            ("n", self.n.is_some()),
            ("t", self.t.is_some()),
            ("backend", self.backend.is_some()),
            ("delta", self.delta.is_some()),
            ("trials", self.trials.is_some()),
            ("queries", self.queries.is_some()),
            ("k", self.k.is_some()),
            ("w-max", self.w_max.is_some()),
            ("depth", self.depth.is_some()),
            ("size", self.size.is_some()),
            ("circuit", self.circuit.is_some()),
        ];
        flags.into_iter().filter(|&(_, set)| set).map(|(name, _)| name).collect()
    }

    /// Rejects parameters the command would silently ignore.
    pub fn check_accepted(&self, command: &str, accepted: &[&str]) -> Result<()> {
        let extra: Vec<_> = self.present().into_iter().filter(|p| !accepted.contains(p)).collect();
        if extra.is_empty() {
            Ok(())
        } else {
            Err(usage(format!(
                "{command} does not take: {} (accepted: {})",
                extra.join(", "),
                if accepted.is_empty() { "none".into() } else { accepted.join(", ") }
            )))
        }
    }

    pub fn require_seed(&self, why: &str) -> Result<u64> {
        self.seed
            .ok_or_else(|| usage(format!("{why} is sampled: pass --seed, a config `seed`, or set {SEED_ENV}")))
    }

    pub fn lambdas(&self, default: &[f64]) -> Vec<NoiseRate> {
        let values = self.lambda.clone().unwrap_or_else(|| default.to_vec());
        values.into_iter().map(|l| NoiseRate::new(l).expect("validated when parsed")).collect()
    }

    pub fn ns(&self, default: &[usize]) -> Vec<usize> {
        self.n.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn ts(&self, default: &[usize]) -> Vec<usize> {
        self.t.clone().unwrap_or_else(|| default.to_vec())
    }
}
