//! The products `T_k x_k` and their partial sums.

use crate::compensated::VectorAccumulator;
use crate::error::Result;
use crate::space::FiniteVector;

use super::sequence::{MultiplierSequence, MultiplierStream};
use super::series::OperatorSeriesSpec;

/// Sequential generator of `(x_k, T_k x_k)`.
#[derive(Debug, Clone)]
pub struct TermStream<'a> {
    series: &'a OperatorSeriesSpec,
    xs: MultiplierStream,
    k: usize,
    x: Vec<f64>,
    t: Vec<f64>,
}

impl<'a> TermStream<'a> {
    pub fn new(series: &'a OperatorSeriesSpec, x: &MultiplierSequence) -> Result<Self> {
        Ok(Self {
            series,
            xs: x.stream(series.dim_in(), series.x_norm)?,
            k: 0,
            x: vec![0.0; series.dim_in()],
            t: vec![0.0; series.dim_out()],
        })
    }

    /// Advances and returns `(k, x_k, T_k x_k)`.
    pub fn advance(&mut self) -> (usize, &[f64], &[f64]) {
        self.k += 1;
        self.xs.fill_next(&mut self.x);
        self.series.apply_term(self.k, &self.x, &mut self.t);
        (self.k, &self.x, &self.t)
    }
}

/// `s_n = sum_{k<=n} T_k x_k` for `n = 1..=n_max`, compensated.
pub fn partial_sums(
    series: &OperatorSeriesSpec,
    x: &MultiplierSequence,
    n_max: usize,
) -> Result<Vec<FiniteVector>> {
    let mut terms = TermStream::new(series, x)?;
    let mut acc = VectorAccumulator::zeros(series.dim_out());
    Ok((0..n_max)
        .map(|_| {
            let (_, _, t) = terms.advance();
            acc.add(t);
            FiniteVector::from_raw(acc.value())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::{CoefficientRule, SeriesFamily};

    #[test]
    fn rank_one_basis_sum() {
        let s = OperatorSeriesSpec::new(SeriesFamily::RankOne { dim: 3 }).unwrap();
        let p = partial_sums(&s, &MultiplierSequence::Phi(vec![1.0; 3]), 3).unwrap();
        assert_eq!(p[2].as_slice(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn grandi_partial_sums() {
        let s = OperatorSeriesSpec::scalar(CoefficientRule::Alternating).unwrap();
        let p = partial_sums(&s, &MultiplierSequence::Ones, 4).unwrap();
        let v: Vec<f64> = p.iter().map(|v| v[0]).collect();
        assert_eq!(v, vec![1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn finite_support_freezes_sums() {
        let s = OperatorSeriesSpec::new(SeriesFamily::Diagonal {
            rule: CoefficientRule::Harmonic,
            dim: 2,
        })
        .unwrap();
        let p = partial_sums(&s, &MultiplierSequence::Phi(vec![1.0, -2.0, 0.5]), 10).unwrap();
        assert!(p[3..].iter().all(|v| v == &p[2]));
    }

    #[test]
    fn dimension_mismatch() {
        let s = OperatorSeriesSpec::new(SeriesFamily::Zero { dim: 2 }).unwrap();
        assert!(partial_sums(&s, &MultiplierSequence::Explicit(vec![vec![1.0]]), 2).is_err());
    }
}
