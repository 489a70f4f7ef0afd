use std::path::{Path, PathBuf};

use cdlab::harness::{random_measure, MeasureKind};
use cdlab::measures::{Measure, MeasureSpec};
use cdlab::Tolerances;
use serde::{Deserialize, Serialize};

pub const OUT_DIR_ENV: &str = "CDLAB_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    VerifyCircle,
    VerifyReal,
    Zeros,
    Prufer,
    Rho,
    BernsteinSzego,
    Corollary,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::VerifyCircle => "verify-circle",
            Self::VerifyReal => "verify-real",
            Self::Zeros => "zeros",
            Self::Prufer => "prufer",
            Self::Rho => "rho",
            Self::BernsteinSzego => "bernstein-szego",
            Self::Corollary => "corollary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Uniform,
    Chebyshev,
    Legendre,
}

/// Where the measure comes from. Exactly one key, e.g. `{"preset":
/// "chebyshev"}`, `{"file": "mu.json"}`, `{"spec": {...}}` or
/// `{"random": {"kind": "circle", "size": 60, "seed": 42}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasureSource {
    Preset(Preset),
    File(PathBuf),
    Spec(MeasureSpec),
    Random { kind: MeasureKind, size: usize, seed: u64 },
}

/// Inclusive `start..=stop` in steps of `step`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NRange {
    pub start: usize,
    pub stop: usize,
    #[serde(default = "one")]
    pub step: usize,
}

fn one() -> usize {
    1
}

impl Default for NRange {
    fn default() -> Self {
        Self { start: 5, stop: 50, step: 5 }
    }
}

impl NRange {
    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.stop).step_by(self.step.max(1)).collect()
    }
}

/// Degrees to run: `{"start": 5, "stop": 50, "step": 5}` or `[10, 20, 50]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
// List first: untagged structs also accept the array form.
#[serde(untagged)]
pub enum NSet {
    List(Vec<usize>),
    Range(NRange),
}

impl Default for NSet {
    fn default() -> Self {
        Self::Range(NRange::default())
    }
}

impl NSet {
    pub fn values(&self) -> Vec<usize> {
        match self {
            Self::Range(r) => r.values(),
            Self::List(v) => v.clone(),
        }
    }
}

fn default_k() -> Vec<usize> {
    vec![1, 2, 3, 4]
}

fn default_points() -> usize {
    1 << 14
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandName,
    pub measure: MeasureSource,
    #[serde(default)]
    pub n: NSet,
    #[serde(default = "default_k")]
    pub k: Vec<usize>,
    /// Balayage radius, required by `corollary`.
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Grid size for `prufer`.
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: CommandName, measure: MeasureSource) -> Self {
        Self {
            command,
            measure,
            n: NSet::default(),
            k: default_k(),
            radius: None,
            seed: None,
            points: default_points(),
            tolerances: Tolerances::default(),
            out_dir: None,
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
        path: path.to_owned(),
        source,
    })
}

/// A config whose measure is an inline spec, ready to run and to echo.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub spec: MeasureSpec,
    pub measure: Measure,
}

pub fn resolve(mut config: RunConfig) -> Result<Resolved, ConfigError> {
    let spec = match &config.measure {
        MeasureSource::Preset(Preset::Uniform) => MeasureSpec::uniform_circle(),
        MeasureSource::Preset(Preset::Chebyshev) => MeasureSpec::chebyshev(),
        MeasureSource::Preset(Preset::Legendre) => MeasureSpec::legendre(),
        MeasureSource::Spec(spec) => spec.clone(),
        MeasureSource::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                path: path.clone(),
                source,
            })?;
            MeasureSpec::from_json(&text).map_err(|e| invalid(format!("measure: {}: {e}", path.display())))?
        }
        MeasureSource::Random { kind, size, seed } => {
            config.seed.get_or_insert(*seed);
            random_measure(*kind, *size, *seed).map_err(|e| invalid(format!("measure.random: {e}")))?
        }
    };
    let ns = config.n.values();
    if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("n: degrees must be a nonempty increasing list"));
    }
    if config.k.is_empty() {
        return Err(invalid("k: empty list"));
    }
    let measure = Measure::with_tolerances(spec.clone(), &config.tolerances).map_err(|e| invalid(format!("measure: {e}")))?;
    match config.radius {
        Some(r) if !(r > measure.support_radius()) => {
            return Err(invalid(format!(
                "radius: R = {r} must exceed the support radius N(mu) = {}",
                measure.support_radius()
            )))
        }
        None if config.command == CommandName::Corollary => {
            return Err(invalid("radius: required by corollary"));
        }
        _ => {}
    }
    let circle_only = matches!(config.command, CommandName::VerifyCircle | CommandName::BernsteinSzego);
    let real_only = matches!(config.command, CommandName::VerifyReal | CommandName::Rho);
    if (circle_only && !spec.is_circle()) || (real_only && spec.is_circle()) {
        return Err(invalid(format!(
            "measure: {} needs a measure on the {}",
            config.command.as_str(),
            if circle_only { "unit circle" } else { "real line" }
        )));
    }
    config.measure = MeasureSource::Spec(spec.clone());
    Ok(Resolved { config, spec, measure })
}

/// `--out` beats the environment, which beats the config file.
pub fn output_dir(flag: Option<&Path>, config: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_owned();
    }
    if let Some(p) = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    config.map_or_else(|| PathBuf::from("cdlab-out"), Path::to_owned)
}

/// `5..50`, `5..50:5`, `7`, or `10,20,50`. Ranges include both ends.
pub fn parse_list(text: &str) -> Result<Vec<usize>, String> {
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("`{s}` is not a nonnegative integer"));
    let text = text.trim();
    if let Some((lo, rest)) = text.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((hi, step)) => (hi, num(step)?),
            None => (rest, 1),
        };
        let (lo, hi) = (num(lo)?, num(hi.trim_start_matches('='))?);
        if step == 0 || lo > hi {
            return Err(format!("empty range `{text}`"));
        }
        return Ok((lo..=hi).step_by(step).collect());
    }
    let values = text.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err("empty list".into());
    }
    Ok(values)
}

/// A parsed `--n` list, kept as a range when it is one.
pub fn as_set(values: Vec<usize>) -> NSet {
    match values[..] {
        [a, b, ..] if b > a && values.windows(2).all(|w| w[1] == w[0] + (b - a)) => NSet::Range(NRange {
            start: a,
            stop: *values.last().unwrap(),
            step: b - a,
        }),
        _ => NSet::List(values),
    }
}
