//! Finite-depth check of the Silverman–Toeplitz conditions.

use serde::Serialize;

use crate::error::{LabError, Result};

use super::weights::{riesz_row, RieszWeights};

/// A lower-triangular summability matrix, one row at a time.
pub trait LowerTriangular {
    /// Row `n >= 1`, entries for `k = 1..=n`.
    fn row(&self, n: usize) -> Result<Vec<f64>>;
}

impl LowerTriangular for RieszWeights {
    fn row(&self, n: usize) -> Result<Vec<f64>> {
        riesz_row(self, n)
    }
}

impl<F: Fn(usize) -> Vec<f64>> LowerTriangular for F {
    fn row(&self, n: usize) -> Result<Vec<f64>> {
        let r = self(n);
        if r.len() != n {
            return Err(LabError::validation(format!(
                "row {n} has {} entries",
                r.len()
            )));
        }
        Ok(r)
    }
}

/// Bound on `sup_n sum_k |a_nk|` accepted by condition (i).
pub const ROW_NORM_BOUND: f64 = 1e6;
/// Required decay factor of early columns from depth/10 to depth.
pub const COLUMN_DECAY_FACTOR: f64 = 0.5;
pub const COLUMN_PROBE: usize = 10;
pub const ROW_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub depth: usize,
    /// Largest absolute row sum over the sampled rows.
    pub row_norm_sup: f64,
    pub bounded_rows: bool,
    /// `max_{k<=10} |a_nk|` at depth/10 and at depth.
    pub column_trend: (f64, f64),
    pub columns_vanish: bool,
    pub row_sum_error: f64,
    pub row_sums_to_one: bool,
    /// Always true: the conditions concern limits and are only sampled.
    pub finite_depth_evidence_only: bool,
}

impl RegularityReport {
    pub fn all_pass(&self) -> bool {
        self.bounded_rows && self.columns_vanish && self.row_sums_to_one
    }
}

/// Sampled row depths: 10, 20, 50, 100, ... up to `depth`, plus `depth/10`
/// and `depth`.
fn sample_rows(depth: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut decade = 10usize;
    while decade <= depth {
        for m in [1, 2, 5] {
            if m * decade <= depth {
                out.push(m * decade);
            }
        }
        decade = decade.saturating_mul(10);
    }
    out.push(depth / 10);
    out.push(depth);
    out.sort_unstable();
    out.dedup();
    out.retain(|&n| n >= 1);
    out
}

pub fn check_regularity(a: &impl LowerTriangular, depth: usize) -> Result<RegularityReport> {
    if depth < 10 {
        return Err(LabError::validation("regularity depth must be >= 10"));
    }
    let mut row_norm_sup: f64 = 0.0;
    let mut row_sum_error: f64 = 0.0;
    let mut early = 0.0;
    let mut late = 0.0;
    for n in sample_rows(depth) {
        let r = a.row(n)?;
        let abs: f64 = r.iter().map(|v| v.abs()).sum();
        let sum: f64 = r.iter().sum();
        row_norm_sup = row_norm_sup.max(abs);
        if n >= depth / 10 {
            row_sum_error = row_sum_error.max((sum - 1.0).abs());
        }
        let head = r[..COLUMN_PROBE.min(n)]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if n == depth / 10 {
            early = head;
        }
        if n == depth {
            late = head;
        }
    }
    Ok(RegularityReport {
        depth,
        row_norm_sup,
        bounded_rows: row_norm_sup.is_finite() && row_norm_sup <= ROW_NORM_BOUND,
        column_trend: (early, late),
        columns_vanish: late <= 1e-12 || late <= COLUMN_DECAY_FACTOR * early,
        row_sum_error,
        row_sums_to_one: row_sum_error <= ROW_SUM_TOL,
        finite_depth_evidence_only: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cesaro_is_regular() {
        let r = check_regularity(&RieszWeights::cesaro(), 10_000).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert!(r.finite_depth_evidence_only);
    }

    #[test]
    fn doubled_rows_fail_row_sums() {
        let doubled = |n: usize| {
            riesz_row(&RieszWeights::cesaro(), n)
                .unwrap()
                .iter()
                .map(|v| 2.0 * v)
                .collect::<Vec<_>>()
        };
        let r = check_regularity(&doubled, 1_000).unwrap();
        assert!(r.bounded_rows && r.columns_vanish);
        assert!(!r.row_sums_to_one);
    }

    #[test]
    fn finite_weights_fail_column_decay() {
        let r = check_regularity(&RieszWeights::Explicit(vec![1.0]), 1_000).unwrap();
        assert!(!r.columns_vanish);
        assert_eq!(r.column_trend, (1.0, 1.0));
        assert!(r.row_sums_to_one);
    }

    #[test]
    fn geometric_weights_are_regular() {
        assert!(check_regularity(&RieszWeights::Geometric(2.0), 1_000)
            .unwrap()
            .all_pass());
        assert!(check_regularity(&RieszWeights::Power(3.0), 1_000)
            .unwrap()
            .all_pass());
    }

    #[test]
    fn shallow_depth_rejected() {
        assert!(check_regularity(&RieszWeights::cesaro(), 9).is_err());
    }
}
