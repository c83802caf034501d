use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use dlab_core::seqs::{regularize, DecaySequence, GrowthSequence};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    CuspGram,
    CuspRho,
    CuspGalerkin,
    EksyGrowth,
    EksyWindows,
    SeqDemo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    /// Piecewise-linear profile through the anchors `θ(δ^j) = ε_j δ^j`.
    Anchored,
    /// `θ(h) = h`.
    Lens,
}

/// Experiment parameters. Every field is optional; see [`Resolved`] for the
/// defaults. JSON configs use the flag names as keys.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Params {
    /// Geometric ratio δ of the disk centres.
    #[arg(long)]
    pub delta: Option<f64>,
    /// `dyadic:n` or `file:path`.
    #[arg(long)]
    pub eps: Option<String>,
    /// Number of disks (defaults to the length of the eps sequence).
    #[arg(long)]
    pub n: Option<usize>,
    /// Gauss-Legendre order per dimension.
    #[arg(long)]
    pub order: Option<usize>,
    /// Galerkin truncation size.
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: Option<usize>,
    /// `log2`, `const:k` or `file:path`.
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub m: Option<String>,
    #[arg(long)]
    pub nmax: Option<u32>,
    #[arg(long)]
    pub pmax: Option<u64>,
    /// Number of equally spaced points on the circle, before refinement near 1.
    #[arg(long)]
    pub xi_grid: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long)]
    #[serde(default)]
    pub plot: bool,
    /// `harmonic` or `file:path`.
    #[arg(long)]
    pub raw: Option<String>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, value_enum)]
    pub profile: Option<ProfileKind>,
}

/// A JSON experiment file: `{"experiment": "cusp-gram", "delta": 0.005, ...}`.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub params: Params,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
            .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    /// `Params` rejects unknown keys, so the experiment name is split off
    /// before the rest is deserialized.
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        let mut map: serde_json::Map<String, serde_json::Value> = serde_json::from_str(text)?;
        let exp = map
            .remove("experiment")
            .ok_or_else(|| serde::de::Error::missing_field("experiment"))?;
        Ok(Self {
            experiment: serde_json::from_value(exp)?,
            params: serde_json::from_value(serde_json::Value::Object(map))?,
        })
    }
}

impl Params {
    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: Params) -> Params {
        Params {
            delta: self.delta.or(base.delta),
            eps: self.eps.or(base.eps),
            n: self.n.or(base.n),
            order: self.order.or(base.order),
            k: self.k.or(base.k),
            m: self.m.or(base.m),
            nmax: self.nmax.or(base.nmax),
            pmax: self.pmax.or(base.pmax),
            xi_grid: self.xi_grid.or(base.xi_grid),
            out: self.out.or(base.out),
            plot: self.plot || base.plot,
            raw: self.raw.or(base.raw),
            rho: self.rho.or(base.rho),
            profile: self.profile.or(base.profile),
        }
    }

    pub fn resolve(self) -> Result<Resolved, CliError> {
        let eps = parse_eps(self.eps.as_deref().unwrap_or("dyadic:8"))?;
        let n = self.n.unwrap_or(eps.len());
        if n < 1 || n > eps.len() {
            return Err(CliError::Usage(format!(
                "--n must lie in 1..={} (length of the eps sequence)",
                eps.len()
            )));
        }
        let eps = eps.truncate(n)?;
        let r = Resolved {
            delta: self.delta.unwrap_or(1.0 / 200.0),
            eps,
            order: self.order.unwrap_or(32),
            k: self.k.unwrap_or(128),
            growth: parse_growth(self.m.as_deref().unwrap_or("log2"))?,
            n_max: self.nmax.unwrap_or(24),
            p_max: self.pmax.unwrap_or(1 << 20),
            xi_grid: self.xi_grid.unwrap_or(32),
            out: self.out.unwrap_or_else(|| PathBuf::from(".")),
            plot: self.plot,
            raw: parse_raw(self.raw.as_deref().unwrap_or("harmonic"), n)?,
            rho: self.rho.unwrap_or(0.5),
            profile: self.profile.unwrap_or(ProfileKind::Anchored),
        };
        if r.xi_grid < 1 {
            return Err(CliError::Usage("--xi-grid must be at least 1".into()));
        }
        Ok(r)
    }
}

#[derive(Debug, Clone)]
pub struct Resolved {
    pub delta: f64,
    pub eps: DecaySequence,
    pub order: usize,
    pub k: usize,
    pub growth: GrowthSequence,
    pub n_max: u32,
    pub p_max: u64,
    pub xi_grid: usize,
    pub out: PathBuf,
    pub plot: bool,
    pub raw: Vec<f64>,
    pub rho: f64,
    pub profile: ProfileKind,
}

fn read_numbers(path: &str) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
    Ok(text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect())
}

fn parse_floats(path: &str) -> Result<Vec<f64>, CliError> {
    read_numbers(path)?
        .iter()
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{path}: not a number: {s}")))
        })
        .collect()
}

/// `dyadic:n` gives `ε_i = 2^{-7-i}`; `file:path` is clamped and regularized.
pub fn parse_eps(spec: &str) -> Result<DecaySequence, CliError> {
    if let Some(n) = spec.strip_prefix("dyadic:") {
        let n: usize = n
            .parse()
            .map_err(|_| CliError::Usage(format!("bad eps spec: {spec}")))?;
        return Ok(DecaySequence::dyadic(n)?);
    }
    if let Some(path) = spec.strip_prefix("file:") {
        return Ok(regularize(&parse_floats(path)?)?);
    }
    Err(CliError::Usage(format!(
        "eps spec must be dyadic:n or file:path, got {spec}"
    )))
}

pub fn parse_growth(spec: &str) -> Result<GrowthSequence, CliError> {
    let g = if spec == "log2" {
        GrowthSequence::Log2
    } else if let Some(k) = spec.strip_prefix("const:") {
        GrowthSequence::Const(
            k.parse()
                .map_err(|_| CliError::Usage(format!("bad M spec: {spec}")))?,
        )
    } else if let Some(path) = spec.strip_prefix("file:") {
        let vals = read_numbers(path)?
            .iter()
            .map(|s| {
                s.parse::<u64>()
                    .map_err(|_| CliError::Usage(format!("{path}: not an integer: {s}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        GrowthSequence::Explicit(vals)
    } else {
        return Err(CliError::Usage(format!(
            "M spec must be log2, const:k or file:path, got {spec}"
        )));
    };
    g.validate()?;
    Ok(g)
}

/// `harmonic` gives `1/i`, `i = 1..=n`.
fn parse_raw(spec: &str, n: usize) -> Result<Vec<f64>, CliError> {
    if spec == "harmonic" {
        return Ok((1..=n.max(16)).map(|i| 1.0 / i as f64).collect());
    }
    if let Some(path) = spec.strip_prefix("file:") {
        return parse_floats(path);
    }
    if Path::new(spec).is_file() {
        return parse_floats(spec);
    }
    Err(CliError::Usage(format!(
        "raw spec must be harmonic or file:path, got {spec}"
    )))
}
