//! Materialized summability transforms.

use crate::compensated::VectorAccumulator;
use crate::error::{LabError, Result};
use crate::space::{check_dim, FiniteVector};

use super::weights::{CumulativeRatio, RieszWeights};

/// Pulls exactly `n` vectors of a common dimension.
pub(crate) fn take_exact(
    seq: impl IntoIterator<Item = FiniteVector>,
    n: usize,
) -> Result<Vec<FiniteVector>> {
    let out: Vec<FiniteVector> = seq.into_iter().take(n).collect();
    if out.len() < n {
        return Err(LabError::validation(format!(
            "sequence yielded {} terms, {} required",
            out.len(),
            n
        )));
    }
    if let Some(first) = out.first() {
        for v in &out[1..] {
            check_dim(first.dim(), v.dim())?;
        }
    }
    Ok(out)
}

/// Riesz means `mu_n = (1/R_n) sum_{k<=n} r_k x_k` for `n = 1..=n_max`.
///
/// Uses `mu_n = mu_{n-1} + (r_n/R_n)(x_n - mu_{n-1})` with the ratio formed
/// from weight quotients, so geometric weights never overflow.
pub fn riesz_transform(
    w: &RieszWeights,
    seq: impl IntoIterator<Item = FiniteVector>,
    n_max: usize,
) -> Result<Vec<FiniteVector>> {
    w.validate()?;
    if n_max == 0 {
        return Err(LabError::validation("n_max must be >= 1"));
    }
    let xs = take_exact(seq, n_max)?;
    let mut ratio = CumulativeRatio::default();
    let mut mu = vec![0.0; xs[0].dim()];
    let mut out = Vec::with_capacity(n_max);
    for (i, x) in xs.iter().enumerate() {
        match ratio.push(w, i + 1) {
            Some(r) if r == 1.0 => mu.copy_from_slice(x.as_slice()),
            Some(r) => {
                for (m, &v) in mu.iter_mut().zip(x.as_slice()) {
                    *m += r * (v - *m);
                }
            }
            None => {}
        }
        out.push(FiniteVector::from_raw(mu.clone()));
    }
    Ok(out)
}

/// Arithmetic means `(1/n) sum_{k<=n} x_k`, computed directly.
pub fn cesaro_transform(
    seq: impl IntoIterator<Item = FiniteVector>,
    n_max: usize,
) -> Result<Vec<FiniteVector>> {
    if n_max == 0 {
        return Err(LabError::validation("n_max must be >= 1"));
    }
    let xs = take_exact(seq, n_max)?;
    let mut acc = VectorAccumulator::zeros(xs[0].dim());
    Ok(xs
        .iter()
        .enumerate()
        .map(|(i, x)| {
            acc.add(x.as_slice());
            let n = (i + 1) as f64;
            FiniteVector::from_raw(acc.value().into_iter().map(|s| s / n).collect())
        })
        .collect())
}

/// Window means `(1/p) sum_{k=n}^{n+p-1} x_k` for `n = 1..=n_max`.
pub fn almost_convergence_transform(
    seq: impl IntoIterator<Item = FiniteVector>,
    p: usize,
    n_max: usize,
) -> Result<Vec<FiniteVector>> {
    if p == 0 || n_max == 0 {
        return Err(LabError::validation("p and n_max must be >= 1"));
    }
    let xs = take_exact(seq, n_max + p - 1)?;
    Ok((0..n_max)
        .map(|n| {
            let mut acc = VectorAccumulator::zeros(xs[0].dim());
            for x in &xs[n..n + p] {
                acc.add(x.as_slice());
            }
            FiniteVector::from_raw(acc.value().into_iter().map(|s| s / p as f64).collect())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use rand::Rng;

    fn scalars(v: impl IntoIterator<Item = f64>) -> impl Iterator<Item = FiniteVector> {
        v.into_iter().map(|x| FiniteVector::scalar(x).unwrap())
    }

    #[test]
    fn cesaro_example() {
        let mu =
            riesz_transform(&RieszWeights::cesaro(), scalars([1.0, 0.0, 1.0, 0.0]), 4).unwrap();
        let got: Vec<f64> = mu.iter().map(|v| v[0]).collect();
        assert_eq!(got[0], 1.0);
        assert!((got[1] - 0.5).abs() < 1e-15);
        assert!((got[2] - 2.0 / 3.0).abs() < 1e-15);
        assert!((got[3] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn constant_sequence_is_fixed() {
        for w in [
            RieszWeights::Power(2.0),
            RieszWeights::Geometric(3.0),
            RieszWeights::Explicit(vec![1.0, 0.0, 2.0]),
        ] {
            let mu = riesz_transform(&w, scalars(std::iter::repeat(-0.7)), 200).unwrap();
            assert!(mu.iter().all(|v| v[0] == -0.7), "{w}");
        }
    }

    #[test]
    fn short_sequence_is_an_error() {
        assert!(riesz_transform(&RieszWeights::cesaro(), scalars([1.0]), 2).is_err());
        let mixed = vec![FiniteVector::zeros(1), FiniteVector::zeros(2)];
        assert!(riesz_transform(&RieszWeights::cesaro(), mixed, 2).is_err());
    }

    #[test]
    fn cesaro_reduction_on_random_vectors() {
        let mut rng = seeded_rng(7);
        let xs: Vec<FiniteVector> = (0..2000)
            .map(|_| FiniteVector::new(vec![rng.random_range(-1.0..1.0), rng.random()]).unwrap())
            .collect();
        let a = riesz_transform(&RieszWeights::cesaro(), xs.clone(), 2000).unwrap();
        let b = cesaro_transform(xs, 2000).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!(u.distance(v, crate::space::NormKind::Inf).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn window_means() {
        let alt = || scalars((1..).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }));
        let even = almost_convergence_transform(alt(), 4, 20).unwrap();
        assert!(even.iter().all(|v| v[0] == 0.0));
        let odd = almost_convergence_transform(alt(), 101, 100).unwrap();
        assert!(odd.iter().all(|v| (v[0].abs() - 1.0 / 101.0).abs() < 1e-15));
        let c = almost_convergence_transform(scalars(std::iter::repeat(2.5)), 3, 5).unwrap();
        assert!(c.iter().all(|v| v[0] == 2.5));
    }
}
