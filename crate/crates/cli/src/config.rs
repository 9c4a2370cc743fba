//! Run configuration: defaults, optional TOML file, command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use accessgap_core::oracle::{DEFAULT_EDGE_CAP, MAX_EDGE_CAP};
use accessgap_core::HeuristicKind;
use clap::Args;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SAMPLES: u32 = 10_000;
pub const DEFAULT_EVAL_EVERY: usize = 10;
pub const DEFAULT_REPS: u32 = 10;
pub const DEFAULT_SIGNATURE_PAIRS: usize = 100_000;
pub const DEFAULT_OUTPUT_DIR: &str = "out";

/// A value that failed validation; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: &'static str, message: impl Into<String>) -> Self {
        ConfigError {
            field,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum AlphaSetting {
    One(f64),
    Many(Vec<f64>),
}

/// Everything a config file may set. Unknown keys are rejected.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    input: Option<PathBuf>,
    alpha: Option<AlphaSetting>,
    samples: Option<u32>,
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
    exact: Option<bool>,
    edge_cap: Option<usize>,
    signature_pairs: Option<usize>,
    exact_signatures: Option<bool>,
    lcc: Option<bool>,
    raw_distributions: Option<bool>,
    k: Option<usize>,
    heuristic: Option<String>,
    eval_every: Option<usize>,
    reps: Option<u32>,
    nodes: Option<Vec<u64>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("reading config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| ConfigError::new("config", e.to_string()).into())
    }
}

/// Flags shared by every run-producing subcommand.
#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// Edge list: one "u v" pair of integer ids per line, '#' comments
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// TOML file with any of the options below; command-line flags win
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Transmission probability in (0, 1); a comma-separated list runs once
    /// per value into <output-dir>/alpha_<value>
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,

    /// Live-edge samples R [default: 10000]
    #[arg(long)]
    pub samples: Option<u32>,

    /// Base seed for sampling and heuristic randomness [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,

    /// Directory for outputs [default: out]
    #[arg(long)]
    pub output_dir: Option<PathBuf>,

    /// Exact probabilities by enumerating live-edge subgraphs (small graphs only)
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub exact: Option<bool>,

    /// Largest edge count accepted by exact mode [default: 20, max 30]
    #[arg(long)]
    pub edge_cap: Option<usize>,

    /// Signature distances over this many uniformly sampled pairs instead of
    /// all pairs [default: all pairs up to 2000 nodes, else 100000]
    #[arg(long)]
    pub signature_pairs: Option<usize>,

    /// Force all-pairs signature distances on large graphs
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub exact_signatures: Option<bool>,

    /// Keep the whole input graph instead of its largest connected component
    #[arg(long)]
    pub no_lcc: bool,

    /// Also write raw per-pair distributions as CSV
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub raw_distributions: Option<bool>,
}

/// Flags of `augment`.
#[derive(Args, Clone, Debug, Default)]
pub struct AugmentArgs {
    /// Edge budget; must be even for bc-both and diam-both [default: 0]
    #[arg(long)]
    pub k: Option<usize>,

    /// rand, bc-chord, bc-one, bc-both, infl, diam-chord or diam-both
    #[arg(long)]
    pub heuristic: Option<String>,

    /// Write a metrics bundle every this many added edges [default: 10]
    #[arg(long)]
    pub eval_every: Option<usize>,
}

/// Fully resolved configuration of one run, echoed into its manifest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub alpha: f64,
    pub samples: u32,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub exact: bool,
    pub edge_cap: usize,
    pub signature_pairs: Option<usize>,
    pub exact_signatures: bool,
    pub lcc: bool,
    pub raw_distributions: bool,
    pub k: usize,
    pub heuristic: HeuristicKind,
    pub eval_every: usize,
    pub reps: u32,
    pub nodes: Option<Vec<u64>>,
}

/// Command-specific values that do not come from [`CommonArgs`].
#[derive(Clone, Debug, Default)]
pub struct Extra {
    pub augment: AugmentArgs,
    pub reps: Option<u32>,
    pub nodes: Vec<u64>,
}

fn format_alpha(a: f64) -> String {
    format!("{a}")
}

/// Merges defaults, file and flags into one config per alpha value.
pub fn resolve(args: &CommonArgs, extra: &Extra) -> anyhow::Result<Vec<RunConfig>> {
    let file = match &args.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    Ok(resolve_with(args, extra, file)?)
}

pub fn resolve_with(
    args: &CommonArgs,
    extra: &Extra,
    file: FileConfig,
) -> Result<Vec<RunConfig>, ConfigError> {
    let input = args
        .input
        .clone()
        .or(file.input)
        .ok_or_else(|| ConfigError::new("input", "no input edge list given"))?;
    let alphas = if !args.alpha.is_empty() {
        args.alpha.clone()
    } else {
        match file.alpha {
            Some(AlphaSetting::One(a)) => vec![a],
            Some(AlphaSetting::Many(v)) => v,
            None => Vec::new(),
        }
    };
    if alphas.is_empty() {
        return Err(ConfigError::new("alpha", "no transmission probability given"));
    }
    for &a in &alphas {
        if !(a > 0.0 && a < 1.0) {
            return Err(ConfigError::new("alpha", format!("{a} is not in (0, 1)")));
        }
    }
    let samples = args.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(ConfigError::new("samples", "must be positive"));
    }
    let edge_cap = args.edge_cap.or(file.edge_cap).unwrap_or(DEFAULT_EDGE_CAP);
    if edge_cap > MAX_EDGE_CAP {
        return Err(ConfigError::new(
            "edge_cap",
            format!("{edge_cap} exceeds the hard limit {MAX_EDGE_CAP}"),
        ));
    }
    let signature_pairs = args.signature_pairs.or(file.signature_pairs);
    if signature_pairs == Some(0) {
        return Err(ConfigError::new("signature_pairs", "must be positive"));
    }
    let heuristic_name = extra
        .augment
        .heuristic
        .clone()
        .or(file.heuristic)
        .unwrap_or_else(|| "bc-chord".into());
    let heuristic: HeuristicKind = heuristic_name
        .parse()
        .map_err(|_| ConfigError::new("heuristic", format!("unknown heuristic {heuristic_name:?}")))?;
    let k = extra.augment.k.or(file.k).unwrap_or(0);
    heuristic
        .check_budget(k)
        .map_err(|_| ConfigError::new("k", format!("{heuristic} adds two edges per step, so k must be even (got {k})")))?;
    let eval_every = extra
        .augment
        .eval_every
        .or(file.eval_every)
        .unwrap_or(DEFAULT_EVAL_EVERY);
    if eval_every == 0 {
        return Err(ConfigError::new("eval_every", "must be positive"));
    }
    let reps = extra.reps.or(file.reps).unwrap_or(DEFAULT_REPS);
    if reps < 2 {
        return Err(ConfigError::new("reps", "needs at least two repetitions"));
    }
    let nodes = if extra.nodes.is_empty() {
        file.nodes
    } else {
        Some(extra.nodes.clone())
    };
    let output_dir = args
        .output_dir
        .clone()
        .or(file.output_dir)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    let lcc = if args.no_lcc {
        false
    } else {
        file.lcc.unwrap_or(true)
    };

    let many = alphas.len() > 1;
    Ok(alphas
        .into_iter()
        .map(|alpha| RunConfig {
            input: input.clone(),
            alpha,
            samples,
            seed: args.seed.or(file.seed).unwrap_or(0),
            output_dir: if many {
                output_dir.join(format!("alpha_{}", format_alpha(alpha)))
            } else {
                output_dir.clone()
            },
            exact: args.exact.or(file.exact).unwrap_or(false),
            edge_cap,
            signature_pairs,
            exact_signatures: args.exact_signatures.or(file.exact_signatures).unwrap_or(false),
            lcc,
            raw_distributions: args.raw_distributions.or(file.raw_distributions).unwrap_or(false),
            k,
            heuristic,
            eval_every,
            reps,
            nodes: nodes.clone(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args() -> CommonArgs {
        CommonArgs {
            input: Some("g.txt".into()),
            alpha: vec![0.4],
            ..Default::default()
        }
    }

    #[test]
    fn defaults() {
        let c = resolve_with(&args(), &Extra::default(), FileConfig::default()).unwrap();
        assert_eq!(c.len(), 1);
        let c = &c[0];
        assert_eq!((c.samples, c.seed, c.k, c.eval_every), (10_000, 0, 0, 10));
        assert!(c.lcc && !c.exact);
        assert_eq!(c.output_dir, PathBuf::from("out"));
    }

    #[test]
    fn flags_override_file() {
        let file: FileConfig = toml::from_str("alpha = [0.1, 0.2]\nsamples = 50\nseed = 3\nlcc = false").unwrap();
        let mut a = args();
        a.samples = Some(70);
        let c = resolve_with(&a, &Extra::default(), file.clone()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].alpha, c[0].samples, c[0].seed, c[0].lcc), (0.4, 70, 3, false));
        a.alpha.clear();
        let c = resolve_with(&a, &Extra::default(), file).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[1].output_dir, PathBuf::from("out/alpha_0.2"));
    }

    #[test]
    fn rejects_bad_values() {
        let mut a = args();
        a.alpha = vec![1.0];
        let e = resolve_with(&a, &Extra::default(), FileConfig::default()).unwrap_err();
        assert_eq!(e.field, "alpha");
        let mut extra = Extra::default();
        extra.augment.heuristic = Some("bc-both".into());
        extra.augment.k = Some(3);
        let e = resolve_with(&args(), &extra, FileConfig::default()).unwrap_err();
        assert_eq!(e.field, "k");
        assert!(e.to_string().contains("even"));
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
    }
}
