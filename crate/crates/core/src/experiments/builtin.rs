//! Named series families and the embedded scenario suite.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{LabError, Result};
use crate::multiplier::{CoefficientRule, OperatorSeriesSpec, SeriesFamily};
use crate::space::LinearOperator;
use crate::summability::parse_floats;

/// Series grammar for configs and the CLI:
/// `grandi`, `ones`, `harmonic`, `scalar:a1,a2,..`, `diagonal_geometric:q[,d]`,
/// `diagonal_harmonic[:d]`, `rank_one:d`, `zero[:d]`, `explicit_file:path`.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinSeries {
    Grandi,
    Ones,
    Harmonic,
    Scalar(Vec<f64>),
    DiagonalGeometric { q: f64, dim: usize },
    DiagonalHarmonic { dim: usize },
    RankOne { dim: usize },
    Zero { dim: usize },
    ExplicitFile(PathBuf),
}

impl BuiltinSeries {
    pub fn spec(&self) -> Result<OperatorSeriesSpec> {
        let family = match self {
            BuiltinSeries::Grandi => SeriesFamily::Scalar(CoefficientRule::Alternating),
            BuiltinSeries::Ones => SeriesFamily::Scalar(CoefficientRule::Ones),
            BuiltinSeries::Harmonic => SeriesFamily::Scalar(CoefficientRule::Harmonic),
            BuiltinSeries::Scalar(v) => SeriesFamily::Scalar(CoefficientRule::List(v.clone())),
            BuiltinSeries::DiagonalGeometric { q, dim } => SeriesFamily::Diagonal {
                rule: CoefficientRule::Geometric(*q),
                dim: *dim,
            },
            BuiltinSeries::DiagonalHarmonic { dim } => SeriesFamily::Diagonal {
                rule: CoefficientRule::Harmonic,
                dim: *dim,
            },
            BuiltinSeries::RankOne { dim } => SeriesFamily::RankOne { dim: *dim },
            BuiltinSeries::Zero { dim } => SeriesFamily::Zero { dim: *dim },
            BuiltinSeries::ExplicitFile(path) => SeriesFamily::Explicit(read_operators(path)?),
        };
        OperatorSeriesSpec::new(family)
    }
}

/// `builtin_series("diagonal_geometric", &[2.0, 2.0])` and friends.
pub fn builtin_series(name: &str, params: &[f64]) -> Result<OperatorSeriesSpec> {
    let joined: Vec<String> = params.iter().map(|p| p.to_string()).collect();
    let text = if joined.is_empty() {
        name.to_string()
    } else {
        format!("{name}:{}", joined.join(","))
    };
    text.parse::<BuiltinSeries>()?.spec()
}

fn dim_param(v: f64, name: &str) -> Result<usize> {
    if v.fract() == 0.0 && v >= 1.0 && v <= 1e9 {
        Ok(v as usize)
    } else {
        Err(LabError::validation(format!(
            "`{name}` dimension must be a positive integer, got {v}"
        )))
    }
}

impl FromStr for BuiltinSeries {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        let name = name.trim();
        if name == "explicit_file" {
            if params.trim().is_empty() {
                return Err(LabError::validation("explicit_file needs a path"));
            }
            return Ok(BuiltinSeries::ExplicitFile(PathBuf::from(params.trim())));
        }
        let nums = parse_floats(params)?;
        let arity = |lo: usize, hi: usize| -> Result<()> {
            if nums.len() < lo || nums.len() > hi {
                Err(LabError::validation(format!(
                    "`{name}` takes {lo}..={hi} parameters, got {}",
                    nums.len()
                )))
            } else {
                Ok(())
            }
        };
        let series = match name {
            "grandi" => {
                arity(0, 0)?;
                BuiltinSeries::Grandi
            }
            "ones" => {
                arity(0, 0)?;
                BuiltinSeries::Ones
            }
            "harmonic" => {
                arity(0, 0)?;
                BuiltinSeries::Harmonic
            }
            "scalar" => {
                arity(1, usize::MAX)?;
                BuiltinSeries::Scalar(nums)
            }
            "diagonal_geometric" => {
                arity(1, 2)?;
                let dim = nums.get(1).map_or(Ok(1), |&d| dim_param(d, name))?;
                BuiltinSeries::DiagonalGeometric { q: nums[0], dim }
            }
            "diagonal_harmonic" => {
                arity(0, 1)?;
                let dim = nums.first().map_or(Ok(1), |&d| dim_param(d, name))?;
                BuiltinSeries::DiagonalHarmonic { dim }
            }
            "rank_one" => {
                arity(1, 1)?;
                BuiltinSeries::RankOne {
                    dim: dim_param(nums[0], name)?,
                }
            }
            "zero" => {
                arity(0, 1)?;
                let dim = nums.first().map_or(Ok(1), |&d| dim_param(d, name))?;
                BuiltinSeries::Zero { dim }
            }
            other => return Err(LabError::validation(format!("unknown series `{other}`"))),
        };
        Ok(series)
    }
}

fn join(v: &[f64]) -> String {
    v.iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for BuiltinSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinSeries::Grandi => f.write_str("grandi"),
            BuiltinSeries::Ones => f.write_str("ones"),
            BuiltinSeries::Harmonic => f.write_str("harmonic"),
            BuiltinSeries::Scalar(v) => write!(f, "scalar:{}", join(v)),
            BuiltinSeries::DiagonalGeometric { q, dim } => {
                write!(f, "diagonal_geometric:{q},{dim}")
            }
            BuiltinSeries::DiagonalHarmonic { dim } => write!(f, "diagonal_harmonic:{dim}"),
            BuiltinSeries::RankOne { dim } => write!(f, "rank_one:{dim}"),
            BuiltinSeries::Zero { dim } => write!(f, "zero:{dim}"),
            BuiltinSeries::ExplicitFile(p) => write!(f, "explicit_file:{}", p.display()),
        }
    }
}

/// One operator per line, rows separated by `;`, entries by `,`.
/// Blank lines and `#` comments are skipped.
pub fn parse_operators(text: &str) -> Result<Vec<LinearOperator>> {
    let mut ops = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse = |e: LabError| LabError::Parse {
            line: i + 1,
            message: e.to_string(),
        };
        let rows: Vec<Vec<f64>> = line
            .split(';')
            .map(parse_floats)
            .collect::<Result<_>>()
            .map_err(parse)?;
        ops.push(LinearOperator::from_rows(&rows).map_err(parse)?);
    }
    if ops.is_empty() {
        return Err(LabError::Parse {
            line: 0,
            message: "no operators listed".into(),
        });
    }
    Ok(ops)
}

fn read_operators(path: &Path) -> Result<Vec<LinearOperator>> {
    parse_operators(&std::fs::read_to_string(path)?)
}

/// The embedded suite run by `run --builtin`.
pub const BUILTIN_SUITE: &str = "\
# grandi partial sums oscillate; every weight family should average them
[scenario]
name = grandi_cesaro
series = grandi
weights = cesaro
tol = 1e-4
analyses = membership,h_bound,summing,gap,chain

[scenario]
name = grandi_power
series = grandi
weights = power:1
tol = 1e-4
analyses = membership,summing,gap,chain

[scenario]
name = grandi_finite
series = grandi
multiplier = phi:1,2,3
analyses = membership,summing,gap,chain

[scenario]
name = ones_divergent
series = ones
analyses = membership,chain

[scenario]
name = harmonic_scalar
series = harmonic
analyses = h_bound,tail
tail_depths = 8,16,32

[scenario]
name = diagonal_geometric
series = diagonal_geometric:2,2
multiplier = linf:7
analyses = membership,h_bound,summing,tail,gap,antosik,probe
tail_depths = 8,16,32
trials = 16

[scenario]
name = diagonal_harmonic
series = diagonal_harmonic:2
analyses = h_bound,tail,probe
tail_depths = 8,16,32
trials = 8

[scenario]
name = rank_one_null
series = rank_one:20
multiplier = c0:3
class = c0
analyses = membership,gap,probe
trials = 8

[scenario]
name = zero_series
series = zero:3
multiplier = linf:1
analyses = membership,summing,gap,antosik
";
