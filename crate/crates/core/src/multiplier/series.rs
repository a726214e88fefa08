//! Operator-valued series `sum_k T_k` with `T_k : R^m -> R^d`.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::space::{check_dim, operator_norm, LinearOperator, NormKind};

/// Scalar coefficient rules `a_k`, `k >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CoefficientRule {
    /// `(-1)^{k+1}`.
    Alternating,
    Ones,
    /// `1/k`.
    Harmonic,
    /// `q^{-k}` with `q > 1`.
    Geometric(f64),
    /// Listed values, then zeros.
    List(Vec<f64>),
}

impl CoefficientRule {
    pub fn coeff(&self, k: usize) -> f64 {
        match self {
            CoefficientRule::Alternating => {
                if k % 2 == 1 {
                    1.0
                } else {
                    -1.0
                }
            }
            CoefficientRule::Ones => 1.0,
            CoefficientRule::Harmonic => 1.0 / k as f64,
            CoefficientRule::Geometric(q) => geometric_coeff(*q, k),
            CoefficientRule::List(v) => v.get(k - 1).copied().unwrap_or(0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            CoefficientRule::Geometric(q) if !(q.is_finite() && *q > 1.0) => Err(
                LabError::validation(format!("geometric ratio must exceed 1, got {q}")),
            ),
            CoefficientRule::List(v) if v.iter().any(|a| !a.is_finite()) => {
                Err(LabError::validation("coefficients must be finite"))
            }
            _ => Ok(()),
        }
    }

    /// Index past which every coefficient vanishes, if any.
    pub fn support_end(&self) -> Option<usize> {
        match self {
            CoefficientRule::List(v) => {
                Some(v.iter().rposition(|a| *a != 0.0).map_or(0, |i| i + 1))
            }
            _ => None,
        }
    }
}

/// `q^{-k}`, exact for powers of two and without overflow of `q^k`.
fn geometric_coeff(q: f64, k: usize) -> f64 {
    if k <= i32::MAX as usize {
        q.powi(-(k as i32))
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SeriesFamily {
    /// `T_k = a_k` on `R^1`.
    Scalar(CoefficientRule),
    /// `T_k = lambda_k I` on `R^d`.
    Diagonal {
        rule: CoefficientRule,
        dim: usize,
    },
    /// `T_k t = t e_k` from `R` to `R^d`; zero for `k > d`.
    RankOne {
        dim: usize,
    },
    /// Listed operators, then zero operators.
    Explicit(Vec<LinearOperator>),
    Zero {
        dim: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorSeriesSpec {
    pub family: SeriesFamily,
    pub x_norm: NormKind,
    pub y_norm: NormKind,
}

impl OperatorSeriesSpec {
    pub fn new(family: SeriesFamily) -> Result<Self> {
        match &family {
            SeriesFamily::Scalar(rule) => rule.validate()?,
            SeriesFamily::Diagonal { rule, dim } => {
                rule.validate()?;
                positive_dim(*dim)?;
            }
            SeriesFamily::RankOne { dim } | SeriesFamily::Zero { dim } => positive_dim(*dim)?,
            SeriesFamily::Explicit(ops) => {
                let first = ops
                    .first()
                    .ok_or_else(|| LabError::validation("explicit series needs an operator"))?;
                for op in &ops[1..] {
                    check_dim(first.dim_in(), op.dim_in())?;
                    check_dim(first.dim_out(), op.dim_out())?;
                }
            }
        }
        Ok(Self {
            family,
            x_norm: NormKind::Inf,
            y_norm: NormKind::Inf,
        })
    }

    pub fn scalar(rule: CoefficientRule) -> Result<Self> {
        Self::new(SeriesFamily::Scalar(rule))
    }

    pub fn with_norms(mut self, x_norm: NormKind, y_norm: NormKind) -> Self {
        self.x_norm = x_norm;
        self.y_norm = y_norm;
        self
    }

    pub fn dim_in(&self) -> usize {
        match &self.family {
            SeriesFamily::Scalar(_) | SeriesFamily::RankOne { .. } => 1,
            SeriesFamily::Diagonal { dim, .. } | SeriesFamily::Zero { dim } => *dim,
            SeriesFamily::Explicit(ops) => ops[0].dim_in(),
        }
    }

    pub fn dim_out(&self) -> usize {
        match &self.family {
            SeriesFamily::Scalar(_) => 1,
            SeriesFamily::Diagonal { dim, .. }
            | SeriesFamily::RankOne { dim }
            | SeriesFamily::Zero { dim } => *dim,
            SeriesFamily::Explicit(ops) => ops[0].dim_out(),
        }
    }

    /// Index past which every `T_k` is zero, if known.
    pub fn support_end(&self) -> Option<usize> {
        match &self.family {
            SeriesFamily::Scalar(rule) | SeriesFamily::Diagonal { rule, .. } => rule.support_end(),
            SeriesFamily::RankOne { dim } => Some(*dim),
            SeriesFamily::Explicit(ops) => Some(ops.len()),
            SeriesFamily::Zero { .. } => Some(0),
        }
    }

    /// `out = T_k x`. Slices must have the series dimensions.
    pub fn apply_term(&self, k: usize, x: &[f64], out: &mut [f64]) {
        debug_assert!(k >= 1);
        match &self.family {
            SeriesFamily::Scalar(rule) => out[0] = rule.coeff(k) * x[0],
            SeriesFamily::Diagonal { rule, .. } => {
                let l = rule.coeff(k);
                for (o, v) in out.iter_mut().zip(x) {
                    *o = l * v;
                }
            }
            SeriesFamily::RankOne { .. } => {
                out.iter_mut().for_each(|o| *o = 0.0);
                if let Some(o) = out.get_mut(k - 1) {
                    *o = x[0];
                }
            }
            SeriesFamily::Explicit(ops) => match ops.get(k - 1) {
                Some(op) => op.apply_into(x, out),
                None => out.iter_mut().for_each(|o| *o = 0.0),
            },
            SeriesFamily::Zero { .. } => out.iter_mut().for_each(|o| *o = 0.0),
        }
    }

    /// `T_k` as a dense matrix.
    pub fn term(&self, k: usize) -> Result<LinearOperator> {
        if k == 0 {
            return Err(LabError::validation("terms are indexed from 1"));
        }
        let (m, d) = (self.dim_in(), self.dim_out());
        let mut cols = vec![vec![0.0; d]; m];
        let mut e = vec![0.0; m];
        for (j, col) in cols.iter_mut().enumerate() {
            e[j] = 1.0;
            self.apply_term(k, &e, col);
            e[j] = 0.0;
        }
        let mut data = Vec::with_capacity(m * d);
        for r in 0..d {
            data.extend(cols.iter().map(|c| c[r]));
        }
        LinearOperator::new(d, m, data)
    }

    /// `||T_k||` from `x_norm` to `y_norm` when it is known exactly.
    pub fn term_norm(&self, k: usize) -> Option<f64> {
        match &self.family {
            SeriesFamily::Scalar(rule) => Some(rule.coeff(k).abs()),
            SeriesFamily::Diagonal { rule, dim } => {
                Some(rule.coeff(k).abs() * identity_norm(*dim, self.x_norm, self.y_norm))
            }
            SeriesFamily::RankOne { dim } => Some(if k <= *dim { 1.0 } else { 0.0 }),
            SeriesFamily::Zero { .. } => Some(0.0),
            SeriesFamily::Explicit(ops) => match ops.get(k - 1) {
                None => Some(0.0),
                Some(op) => {
                    let n = operator_norm(op, self.x_norm, self.y_norm);
                    n.exact.then_some(n.value)
                }
            },
        }
    }

    /// `sum_{k<=depth} ||T_k||`, the upper bracket for the H bound.
    pub fn norm_sum(&self, depth: usize) -> Option<f64> {
        let end = self.support_end().map_or(depth, |e| e.min(depth));
        let mut total = 0.0;
        for k in 1..=end {
            total += self.term_norm(k)?;
        }
        Some(total)
    }
}

fn positive_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        Err(LabError::validation("dimension must be positive"))
    } else {
        Ok(())
    }
}

/// `||I||` from `l_p` to `l_q` on `R^d`: 1 if `p <= q`, else `d^{1/q - 1/p}`.
fn identity_norm(dim: usize, from: NormKind, to: NormKind) -> f64 {
    let (p, q) = (from.exponent(), to.exponent());
    if p <= q {
        1.0
    } else {
        (dim as f64).powf(1.0 / q - 1.0 / p)
    }
}
