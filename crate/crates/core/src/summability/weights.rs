//! Riesz weight sequences `r = (r_k)` and their cumulative sums `R_n`.
//!
//! Weights are never summed in linear scale. The running quantity is
//! `c_n = R_n / r_m` where `m <= n` is the last index with `r_m > 0`, updated
//! by `c_n = c_{n-1} * (r_prev / r_n) + 1`. The transform only needs
//! `r_n / R_n = 1 / c_n`, which stays in `(0, 1]` even when `R_n` itself
//! overflows (geometric weights at depth 1e5).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RieszWeights {
    /// `r_k` taken from the list, zero past its end.
    Explicit(Vec<f64>),
    /// `r_k = value`.
    Constant(f64),
    /// `r_k = k^alpha`.
    Power(f64),
    /// `r_k = q^k`.
    Geometric(f64),
}

impl RieszWeights {
    /// `r = e`, which reduces the Riesz mean to the Cesàro mean.
    pub fn cesaro() -> Self {
        RieszWeights::Constant(1.0)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RieszWeights::Explicit(list) => {
                match list.first() {
                    Some(&r1) if r1 > 0.0 && r1.is_finite() => {}
                    _ => return Err(LabError::validation("explicit weights need r_1 > 0")),
                }
                if list.iter().any(|r| !r.is_finite() || *r < 0.0) {
                    return Err(LabError::validation(
                        "weights must be finite and nonnegative",
                    ));
                }
            }
            RieszWeights::Constant(v) => {
                if !(v.is_finite() && *v > 0.0) {
                    return Err(LabError::validation("constant weight must be positive"));
                }
            }
            RieszWeights::Power(a) => {
                if !(a.is_finite() && *a >= 0.0) {
                    return Err(LabError::validation("power exponent must be >= 0"));
                }
            }
            RieszWeights::Geometric(q) => {
                if !(q.is_finite() && *q > 1.0) {
                    return Err(LabError::validation("geometric ratio must be > 1"));
                }
            }
        }
        Ok(())
    }

    /// `r_k` for `k >= 1`. May overflow to infinity for steep families.
    pub fn weight(&self, k: usize) -> f64 {
        match self {
            RieszWeights::Explicit(list) => list.get(k - 1).copied().unwrap_or(0.0),
            RieszWeights::Constant(v) => *v,
            RieszWeights::Power(a) => (k as f64).powf(*a),
            RieszWeights::Geometric(q) => q.powf(k as f64),
        }
    }

    /// `ln r_k`, `-inf` for zero weights.
    pub fn ln_weight(&self, k: usize) -> f64 {
        match self {
            RieszWeights::Explicit(_) => self.weight(k).ln(),
            RieszWeights::Constant(v) => v.ln(),
            RieszWeights::Power(a) => a * (k as f64).ln(),
            RieszWeights::Geometric(q) => k as f64 * q.ln(),
        }
    }

    /// `r_j / r_k` for indices with `r_k > 0`.
    pub(crate) fn ratio_between(&self, j: usize, k: usize) -> f64 {
        match self {
            RieszWeights::Explicit(list) => list[j - 1] / list[k - 1],
            RieszWeights::Constant(_) => 1.0,
            RieszWeights::Power(a) => (j as f64 / k as f64).powf(*a),
            RieszWeights::Geometric(q) => q.powi(j as i32 - k as i32),
        }
    }

    pub fn is_zero_at(&self, k: usize) -> bool {
        matches!(self, RieszWeights::Explicit(list) if list.get(k - 1).copied().unwrap_or(0.0) == 0.0)
    }

    pub fn stream(&self) -> WeightStream<'_> {
        WeightStream {
            weights: self,
            ratio: CumulativeRatio::default(),
            k: 0,
        }
    }

    /// `ln R_n`.
    pub fn ln_cumulative(&self, n: usize) -> f64 {
        let mut s = self.stream();
        let mut last = f64::NEG_INFINITY;
        for _ in 0..n {
            last = s.next_step().ln_cumulative;
        }
        last
    }

    /// Finite-depth evidence that `R_n -> inf`: `R_{2N} / R_N > 1 + 1e-9`.
    pub fn diverges_heuristic(&self, probe_depth: usize) -> bool {
        let n = probe_depth.max(1);
        let (a, b) = (self.ln_cumulative(n), self.ln_cumulative(2 * n));
        b - a > 1e-9_f64.ln_1p()
    }
}

impl fmt::Display for RieszWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RieszWeights::Explicit(list) => {
                let parts: Vec<String> = list.iter().map(|r| r.to_string()).collect();
                write!(f, "explicit:{}", parts.join(","))
            }
            RieszWeights::Constant(v) => write!(f, "constant:{v}"),
            RieszWeights::Power(a) => write!(f, "power:{a}"),
            RieszWeights::Geometric(q) => write!(f, "geometric:{q}"),
        }
    }
}

impl FromStr for RieszWeights {
    type Err = LabError;

    /// `constant[:v]`, `cesaro`, `power:alpha`, `geometric:q`, `explicit:r1,r2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, params) = s.split_once(':').unwrap_or((s, ""));
        let nums = parse_floats(params)?;
        let one = |name: &str| -> Result<f64> {
            match nums.as_slice() {
                [v] => Ok(*v),
                _ => Err(LabError::validation(format!(
                    "`{name}` weights take one parameter"
                ))),
            }
        };
        let w = match family.trim() {
            "cesaro" | "e" if nums.is_empty() => RieszWeights::cesaro(),
            "constant" if nums.is_empty() => RieszWeights::cesaro(),
            "constant" => RieszWeights::Constant(one("constant")?),
            "power" => RieszWeights::Power(one("power")?),
            "geometric" => RieszWeights::Geometric(one("geometric")?),
            "explicit" => RieszWeights::Explicit(nums),
            other => {
                return Err(LabError::validation(format!(
                    "unknown weight family `{other}`"
                )))
            }
        };
        w.validate()?;
        Ok(w)
    }
}

pub(crate) fn parse_floats(params: &str) -> Result<Vec<f64>> {
    if params.trim().is_empty() {
        return Ok(Vec::new());
    }
    params
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| LabError::validation(format!("bad number `{}`", p.trim())))
        })
        .collect()
}

/// Tracks `c = (sum of weights since reset) / r_last` for the last positive
/// weight index. Resetting starts a fresh block of the sum.
#[derive(Debug, Clone, Default)]
pub(crate) struct CumulativeRatio {
    c: f64,
    last: Option<usize>,
}

impl CumulativeRatio {
    /// Includes `r_k` and returns `r_k / (block sum up to k)`; `None` when
    /// `r_k = 0`.
    pub(crate) fn push(&mut self, w: &RieszWeights, k: usize) -> Option<f64> {
        if w.is_zero_at(k) {
            return None;
        }
        self.c = match self.last {
            None => 1.0,
            Some(j) => self.c * w.ratio_between(j, k) + 1.0,
        };
        self.last = Some(k);
        Some(1.0 / self.c)
    }

    /// `ln` of the block sum; `-inf` before any positive weight.
    pub(crate) fn ln_sum(&self, w: &RieszWeights) -> f64 {
        match self.last {
            None => f64::NEG_INFINITY,
            Some(j) => self.c.ln() + w.ln_weight(j),
        }
    }

    /// `r_k / (block sum)` for an already included index `k`.
    pub(crate) fn share_of(&self, w: &RieszWeights, k: usize) -> f64 {
        match self.last {
            Some(j) if !w.is_zero_at(k) => w.ratio_between(k, j) / self.c,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightStep {
    pub k: usize,
    /// `r_k / R_k`, zero when `r_k = 0`.
    pub ratio: f64,
    /// `ln R_k`.
    pub ln_cumulative: f64,
}

/// Sequential generator of `(r_k / R_k, ln R_k)`.
#[derive(Debug, Clone)]
pub struct WeightStream<'a> {
    weights: &'a RieszWeights,
    ratio: CumulativeRatio,
    k: usize,
}

impl WeightStream<'_> {
    pub fn next_step(&mut self) -> WeightStep {
        self.k += 1;
        let ratio = self.ratio.push(self.weights, self.k).unwrap_or(0.0);
        WeightStep {
            k: self.k,
            ratio,
            ln_cumulative: self.ratio.ln_sum(self.weights),
        }
    }
}

impl Iterator for WeightStream<'_> {
    type Item = WeightStep;
    fn next(&mut self) -> Option<WeightStep> {
        Some(self.next_step())
    }
}

/// Row `n` of the Riesz matrix: `r_k / R_n` for `k = 1..=n`.
pub fn riesz_row(w: &RieszWeights, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(LabError::validation("row index must be >= 1"));
    }
    w.validate()?;
    let mut acc = CumulativeRatio::default();
    for k in 1..=n {
        acc.push(w, k);
    }
    Ok((1..=n).map(|k| acc.share_of(w, k)).collect())
}
