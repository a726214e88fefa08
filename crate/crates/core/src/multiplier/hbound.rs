//! The bound `H = sup ||sum_{k<=n} T_k x_k||` over `||x_k|| <= 1`.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::rng::{seeded_rng, unit_vector};
use crate::space::NormKind;

use super::series::{OperatorSeriesSpec, SeriesFamily};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HBound {
    pub estimate: f64,
    /// True when `estimate` is the supremum itself.
    pub exact: bool,
    /// `sum_{k<=depth} ||T_k||` when every term norm is known.
    pub upper: Option<f64>,
    pub depth: usize,
    pub samples: usize,
}

impl HBound {
    /// Best available upper value: `upper`, or the estimate when exact.
    pub fn upper_or_estimate(&self) -> (f64, bool) {
        match self.upper {
            Some(u) => (u, true),
            None => (self.estimate, self.exact),
        }
    }
}

/// Candidate multipliers: one aligned with each output coordinate, then
/// `samples` seeded random unit sequences. Scalar series use the closed
/// form `sum |a_k|`.
pub fn h_bound(
    series: &OperatorSeriesSpec,
    depth: usize,
    sphere_samples: usize,
    seed: u64,
) -> Result<HBound> {
    if depth == 0 {
        return Err(LabError::validation("depth must be >= 1"));
    }
    let upper = series.norm_sum(depth);
    match &series.family {
        SeriesFamily::Scalar(rule) => {
            let mut total = 0.0;
            for k in 1..=depth {
                total += rule.coeff(k).abs();
            }
            return Ok(HBound {
                estimate: total,
                exact: true,
                upper: Some(total),
                depth,
                samples: 0,
            });
        }
        SeriesFamily::Zero { .. } => {
            return Ok(HBound {
                estimate: 0.0,
                exact: true,
                upper: Some(0.0),
                depth,
                samples: 0,
            })
        }
        _ => {}
    }
    let (m, d) = (series.dim_in(), series.dim_out());
    let mut best: f64 = 0.0;
    let mut t = vec![0.0; d];
    let mut s = vec![0.0; d];
    for i in 0..d {
        s.fill(0.0);
        for k in 1..=depth {
            let op = series.term(k)?;
            let x = series.x_norm.norming_vector(op.row(i));
            series.apply_term(k, &x, &mut t);
            s.iter_mut().zip(&t).for_each(|(a, v)| *a += v);
            best = best.max(series.y_norm.norm_of(&s));
        }
    }
    for j in 0..sphere_samples {
        let mut rng = seeded_rng(seed.wrapping_add(j as u64));
        s.fill(0.0);
        for k in 1..=depth {
            let x = unit_vector(&mut rng, m, series.x_norm);
            series.apply_term(k, &x, &mut t);
            s.iter_mut().zip(&t).for_each(|(a, v)| *a += v);
            best = best.max(series.y_norm.norm_of(&s));
        }
    }
    let exact = upper.is_some_and(|u| u == best);
    Ok(HBound {
        estimate: best,
        exact,
        upper,
        depth,
        samples: sphere_samples,
    })
}

/// Sign-aligned multiplier `x_k` maximizing coordinate `row` of the sum.
pub(crate) fn aligned_multiplier(
    series: &OperatorSeriesSpec,
    row: usize,
    depth: usize,
) -> Result<Vec<Vec<f64>>> {
    let norm: NormKind = series.x_norm;
    (1..=depth)
        .map(|k| Ok(norm.norming_vector(series.term(k)?.row(row))))
        .collect()
}
