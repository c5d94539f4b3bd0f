use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

/// Every tunable of a run. Flags and config-file keys share these names
/// (`--grid-points` on the command line, `grid_points` in a file).
#[derive(Debug, Clone, Default, Args)]
pub struct Params {
    /// Flat `key = value` file; command-line flags override its entries.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Strike.
    #[arg(long = "K", global = true)]
    pub strike: Option<f64>,
    /// Spot.
    #[arg(long, global = true)]
    pub x: Option<f64>,
    /// Interest rate.
    #[arg(long, global = true)]
    pub r: Option<f64>,
    /// Volatility of the lognormal put model.
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    /// Lower volatility bound.
    #[arg(long, global = true)]
    pub sigma1: Option<f64>,
    /// Upper volatility bound.
    #[arg(long, global = true)]
    pub sigma2: Option<f64>,
    /// Horizon.
    #[arg(long = "T", global = true, allow_negative_numbers = true)]
    pub horizon: Option<f64>,
    /// Number of exponential stages.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub grid_points: Option<usize>,
    /// Root-finding tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub mc_paths: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub richardson_nodes: Option<Vec<usize>>,
    /// Binomial steps of the put oracle.
    #[arg(long, global = true)]
    pub tree_steps: Option<usize>,
    /// Stage counts for `rate`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub ns: Option<Vec<usize>>,
    /// Two-column `x h(x)` payoff file for `uvm`.
    #[arg(long, global = true, value_name = "PATH")]
    pub payoff: Option<PathBuf>,
    /// Payoff zero-level point; defaults to the last x where the file's h is 0.
    #[arg(long, global = true)]
    pub x0: Option<f64>,
    /// Initial convexity-switch guess.
    #[arg(long, global = true)]
    pub b0: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long, short, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Significant digits of computed numbers.
    #[arg(long, global = true)]
    pub digits: Option<usize>,
}

const KEYS: [&str; 21] = [
    "K", "x", "r", "sigma", "sigma1", "sigma2", "T", "n", "grid_points", "tol", "mc_paths", "seed",
    "richardson_nodes", "tree_steps", "ns", "payoff", "x0", "b0", "output", "format", "digits",
];

fn parse<V: std::str::FromStr>(key: &str, raw: &str, line: usize) -> Result<V, CliError> {
    raw.parse()
        .map_err(|_| CliError::Config(format!("line {line}: cannot parse `{raw}` for `{key}`")))
}

fn parse_list(key: &str, raw: &str, line: usize) -> Result<Vec<usize>, CliError> {
    raw.split(',').map(|s| parse(key, s.trim(), line)).collect()
}

impl Params {
    /// Reads a config file; blank lines and `#` comments are skipped.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut p = Params::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {line}: expected `key = value`")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "K" => p.strike = Some(parse(key, value, line)?),
                "x" => p.x = Some(parse(key, value, line)?),
                "r" => p.r = Some(parse(key, value, line)?),
                "sigma" => p.sigma = Some(parse(key, value, line)?),
                "sigma1" => p.sigma1 = Some(parse(key, value, line)?),
                "sigma2" => p.sigma2 = Some(parse(key, value, line)?),
                "T" => p.horizon = Some(parse(key, value, line)?),
                "n" => p.n = Some(parse(key, value, line)?),
                "grid_points" => p.grid_points = Some(parse(key, value, line)?),
                "tol" => p.tol = Some(parse(key, value, line)?),
                "mc_paths" => p.mc_paths = Some(parse(key, value, line)?),
                "seed" => p.seed = Some(parse(key, value, line)?),
                "richardson_nodes" => p.richardson_nodes = Some(parse_list(key, value, line)?),
                "tree_steps" => p.tree_steps = Some(parse(key, value, line)?),
                "ns" => p.ns = Some(parse_list(key, value, line)?),
                "payoff" => p.payoff = Some(PathBuf::from(value)),
                "x0" => p.x0 = Some(parse(key, value, line)?),
                "b0" => p.b0 = Some(parse(key, value, line)?),
                "output" => p.output = Some(PathBuf::from(value)),
                "format" => {
                    p.format = Some(Format::from_str(value, true).map_err(|_| {
                        CliError::Config(format!("line {line}: format must be csv or jsonl, got `{value}`"))
                    })?)
                }
                "digits" => p.digits = Some(parse(key, value, line)?),
                other => {
                    return Err(CliError::Config(format!(
                        "line {line}: unknown key `{other}` (known: {})",
                        KEYS.join(", ")
                    )))
                }
            }
        }
        Ok(p)
    }

    /// Entries of `over` win.
    pub fn overlay(self, over: Params) -> Params {
        Params {
            config: over.config.or(self.config),
            strike: over.strike.or(self.strike),
            x: over.x.or(self.x),
            r: over.r.or(self.r),
            sigma: over.sigma.or(self.sigma),
            sigma1: over.sigma1.or(self.sigma1),
            sigma2: over.sigma2.or(self.sigma2),
            horizon: over.horizon.or(self.horizon),
            n: over.n.or(self.n),
            grid_points: over.grid_points.or(self.grid_points),
            tol: over.tol.or(self.tol),
            mc_paths: over.mc_paths.or(self.mc_paths),
            seed: over.seed.or(self.seed),
            richardson_nodes: over.richardson_nodes.or(self.richardson_nodes),
            tree_steps: over.tree_steps.or(self.tree_steps),
            ns: over.ns.or(self.ns),
            payoff: over.payoff.or(self.payoff),
            x0: over.x0.or(self.x0),
            b0: over.b0.or(self.b0),
            output: over.output.or(self.output),
            format: over.format.or(self.format),
            digits: over.digits.or(self.digits),
        }
    }

    /// Range checks on whatever is present; presence is checked per command.
    pub fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("K", self.strike),
            ("x", self.x),
            ("sigma", self.sigma),
            ("sigma2", self.sigma2),
            ("T", self.horizon),
            ("tol", self.tol),
            ("b0", self.b0),
        ];
        for (key, v) in positive {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::Config(format!("{key} must be positive and finite, got {v}")));
                }
            }
        }
        for (key, v) in [("r", self.r), ("sigma1", self.sigma1)] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(CliError::Config(format!("{key} must be non-negative and finite, got {v}")));
                }
            }
        }
        if let (Some(s1), Some(s2)) = (self.sigma1, self.sigma2) {
            if s1 > s2 {
                return Err(CliError::Config(format!("sigma1 = {s1} exceeds sigma2 = {s2}")));
            }
        }
        if let Some(x0) = self.x0 {
            if !(x0 > 0.0 && x0 < 1.0) {
                return Err(CliError::Config(format!("x0 must lie in (0, 1), got {x0}")));
            }
        }
        if self.n == Some(0) {
            return Err(CliError::Config("n must be at least 1".into()));
        }
        if let Some(g) = self.grid_points {
            if g < randhorizon::numerics::MIN_NODES {
                return Err(CliError::Config(format!(
                    "grid_points must be at least {}, got {g}",
                    randhorizon::numerics::MIN_NODES
                )));
            }
        }
        if let Some(p) = self.mc_paths {
            if p < randhorizon::bounds::MIN_PATHS {
                return Err(CliError::Config(format!(
                    "mc_paths must be at least {}, got {p}",
                    randhorizon::bounds::MIN_PATHS
                )));
            }
        }
        if self.tree_steps == Some(0) {
            return Err(CliError::Config("tree_steps must be at least 1".into()));
        }
        if let Some(nodes) = &self.richardson_nodes {
            if nodes.len() < 2 || nodes.contains(&0) {
                return Err(CliError::Config("richardson_nodes needs at least two positive stage counts".into()));
            }
        }
        if let Some(ns) = &self.ns {
            if ns.len() < 3 || ns.contains(&0) {
                return Err(CliError::Config("ns needs at least three positive stage counts".into()));
            }
        }
        if let Some(d) = self.digits {
            if !(1..=17).contains(&d) {
                return Err(CliError::Config(format!("digits must be in 1..=17, got {d}")));
            }
        }
        Ok(())
    }
}

/// `Some` value or a config error naming the missing key.
pub fn need<V: Copy>(v: Option<V>, key: &str) -> Result<V, CliError> {
    v.ok_or_else(|| CliError::Config(format!("missing required parameter `{key}`")))
}
