//! Plain-text sweep configuration.
//!
//! One `key = value` pair per line. `#` starts a comment, whole-line or
//! trailing; blank lines are ignored. List keys may repeat and extend
//! what came before, scalar keys may appear only once.
//!
//! ```text
//! # functions are "name: expression"; the name labels report rows
//! function = square: x^2
//! function = shifted vee: abs(x - 0.5)
//!
//! interval = 0 1        # repeatable, "a b" with 0 <= a < b
//! p = 0.5 1 2           # weight exponents, extend on repeat
//! q = 1 3
//! k = 1.5 2              # each > 1
//! l = 1 2                # each >= 1
//!
//! # sense s alpha m; sense is "first" or "second"
//! spec = first 1 1 1
//! spec = first 0.5 1 0.5
//!
//! grid = 9               # sampling lattice points per axis
//! trials = 200           # extra random triples
//! seed = 42
//! violation_tolerance = 1e-9
//! quad_tol = 1e-10
//! ```

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use super::SweepConfig;
use crate::convexity::{ClassSpec, SamplingSpec, Sense};
use crate::expr::parse;

#[derive(Debug)]
pub enum ConfigError {
    /// malformed line in a config file, 1-indexed
    Parse {
        line: usize,
        message: String,
    },
    /// structurally parsed but fails a SweepConfig invariant
    Invalid(String),
    Io {
        path: PathBuf,
        source: io::Error,
    },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse { line, message } => {
                write!(f, "config line {line}: {message}")
            }
            ConfigError::Invalid(message) => write!(f, "invalid sweep config: {message}"),
            ConfigError::Io { path, source } => {
                write!(f, "cannot read config {}: {source}", path.display())
            }
        }
    }
}

impl std::error::Error for ConfigError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            ConfigError::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

fn parse_floats(line: usize, key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    let parsed: Result<Vec<f64>, _> = value.split_whitespace().map(str::parse).collect();
    parsed.map_err(|e| ConfigError::Parse {
        line,
        message: format!("{key}: {e}"),
    })
}

fn parse_scalar<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.trim().parse().map_err(|e| ConfigError::Parse {
        line,
        message: format!("{key}: {e}"),
    })
}

/// Parse configuration text into a validated [`SweepConfig`]. Sampling
/// parameters and `quad_tol` fall back to the library defaults
/// (9-point grid, 200 trials, seed 42, tolerances 1e-9 / 1e-10).
pub fn parse_config(text: &str) -> Result<SweepConfig, ConfigError> {
    let mut config = SweepConfig {
        functions: Vec::new(),
        intervals: Vec::new(),
        p_values: Vec::new(),
        q_values: Vec::new(),
        class_specs: Vec::new(),
        k_values: Vec::new(),
        l_values: Vec::new(),
        sampling: SamplingSpec::default(),
        quad_tol: 1e-10,
    };
    let mut seen_scalars: Vec<&str> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Parse {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        let err = |message: String| Err(ConfigError::Parse { line, message });

        match key {
            "function" => {
                let Some((name, src)) = value.split_once(':') else {
                    return err("function: expected `name: expression`".into());
                };
                let name = name.trim();
                if name.is_empty() {
                    return err("function: empty name".into());
                }
                match parse::<f64>(src.trim()) {
                    Ok(ast) => config.functions.push((name.to_string(), ast)),
                    Err(e) => return err(format!("function `{name}`: {e}")),
                }
            }
            "interval" => {
                let ends = parse_floats(line, key, value)?;
                let [a, b] = ends[..] else {
                    return err(format!(
                        "interval: expected `a b`, got {} values",
                        ends.len()
                    ));
                };
                config.intervals.push((a, b));
            }
            "p" => config.p_values.extend(parse_floats(line, key, value)?),
            "q" => config.q_values.extend(parse_floats(line, key, value)?),
            "k" => config.k_values.extend(parse_floats(line, key, value)?),
            "l" => config.l_values.extend(parse_floats(line, key, value)?),
            "spec" => {
                let mut parts = value.split_whitespace();
                let sense = match parts.next() {
                    Some("first") => Sense::First,
                    Some("second") => Sense::Second,
                    other => {
                        return err(format!(
                            "spec: sense must be `first` or `second`, got `{}`",
                            other.unwrap_or("")
                        ))
                    }
                };
                let mut num = |name: &str| -> Result<f64, ConfigError> {
                    let tok = parts.next().ok_or_else(|| ConfigError::Parse {
                        line,
                        message: format!("spec: missing {name}"),
                    })?;
                    tok.parse().map_err(|e| ConfigError::Parse {
                        line,
                        message: format!("spec {name}: {e}"),
                    })
                };
                let (s, alpha, m) = (num("s")?, num("alpha")?, num("m")?);
                if parts.next().is_some() {
                    return err("spec: expected exactly `sense s alpha m`".into());
                }
                match ClassSpec::new(sense, s, alpha, m) {
                    Ok(spec) => config.class_specs.push(spec),
                    Err(e) => return err(format!("spec: {e}")),
                }
            }
            "grid" | "trials" | "seed" | "violation_tolerance" | "quad_tol" => {
                if seen_scalars.contains(&key) {
                    return err(format!("duplicate `{key}`"));
                }
                match key {
                    "grid" => {
                        config.sampling.grid_points_per_axis = parse_scalar(line, key, value)?
                    }
                    "trials" => config.sampling.random_trials = parse_scalar(line, key, value)?,
                    "seed" => config.sampling.rng_seed = parse_scalar(line, key, value)?,
                    "violation_tolerance" => {
                        config.sampling.violation_tolerance = parse_scalar(line, key, value)?
                    }
                    _ => config.quad_tol = parse_scalar(line, key, value)?,
                }
                seen_scalars.push(match key {
                    "grid" => "grid",
                    "trials" => "trials",
                    "seed" => "seed",
                    "violation_tolerance" => "violation_tolerance",
                    _ => "quad_tol",
                });
            }
            _ => return err(format!("unknown key `{key}`")),
        }
    }

    config.validate()?;
    Ok(config)
}

/// Read and parse a config file.
pub fn load_config(path: &Path) -> Result<SweepConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

impl SweepConfig {
    /// The fixed catalog the acceptance suite and `sweep --standard`
    /// run: six functions of mixed convexity type, three intervals,
    /// a 4x4 grid of weight exponents, twelve first-sense class specs,
    /// and small Holder / power-mean exponent sets.
    pub fn standard() -> SweepConfig {
        let sources = ["x", "x^2", "x^3", "exp(x)", "abs(x - 0.5)", "x^0.5"];
        let mut class_specs = Vec::new();
        for s in [0.25, 0.5, 1.0] {
            for alpha in [0.5, 1.0] {
                for m in [0.5, 1.0] {
                    class_specs.push(ClassSpec::new(Sense::First, s, alpha, m).expect("in range"));
                }
            }
        }
        SweepConfig {
            functions: sources
                .iter()
                .map(|src| (src.to_string(), parse(src).expect("fixed catalog parses")))
                .collect(),
            intervals: vec![(0.0, 1.0), (0.0, 2.0), (1.0, 3.0)],
            p_values: vec![0.5, 1.0, 2.0, 3.0],
            q_values: vec![0.5, 1.0, 2.0, 3.0],
            class_specs,
            k_values: vec![1.5, 2.0, 5.0],
            l_values: vec![1.0, 2.0, 4.0],
            sampling: SamplingSpec::default(),
            quad_tol: 1e-10,
        }
    }
}
