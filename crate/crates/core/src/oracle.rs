//! Brute-force references for the kernels. Nothing here shares arithmetic
//! with the main code paths: sums use a local double-double accumulator and
//! the verdict rule is re-derived by a direct scan.

use crate::error::{LabError, Result};
use crate::space::{FiniteVector, NormKind};
use crate::summability::{ConvergenceVerdict, RieszWeights, TruncationSchedule, VerdictKind};

/// Largest `n` accepted by [`brute_mean`]; the direct form is quadratic when
/// used for a whole transform.
pub const BRUTE_MEAN_LIMIT: usize = 10_000;
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// Error-free transformation `a + b = s + e`.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Split-free product error via fused multiply-add.
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[derive(Clone, Copy, Default)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.hi, x);
        let (hi, lo) = two_sum(s, e + self.lo);
        self.hi = hi;
        self.lo = lo;
    }

    fn add_product(&mut self, a: f64, b: f64) {
        let (p, e) = two_prod(a, b);
        self.add(p);
        self.add(e);
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// `(1/R_n) sum_{k<=n} r_k x_k` by direct summation. Weights are rescaled by
/// the largest `ln r_k` so geometric families stay finite.
pub fn brute_mean(
    w: &RieszWeights,
    seq: impl IntoIterator<Item = FiniteVector>,
    n: usize,
) -> Result<FiniteVector> {
    if n > BRUTE_MEAN_LIMIT {
        return Err(LabError::GuardExceeded {
            n,
            limit: BRUTE_MEAN_LIMIT,
        });
    }
    if n == 0 {
        return Err(LabError::validation("n must be >= 1"));
    }
    w.validate()?;
    let xs: Vec<FiniteVector> = seq.into_iter().take(n).collect();
    if xs.len() < n {
        return Err(LabError::validation("sequence shorter than n"));
    }
    let dim = xs[0].dim();
    let logs: Vec<f64> = (1..=n).map(|k| w.ln_weight(k)).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut den = DoubleDouble::default();
    let mut num = vec![DoubleDouble::default(); dim];
    for (x, &l) in xs.iter().zip(&logs) {
        if x.dim() != dim {
            return Err(LabError::DimensionMismatch {
                expected: dim,
                found: x.dim(),
            });
        }
        let a = (l - top).exp();
        den.add(a);
        for (acc, &v) in num.iter_mut().zip(x.as_slice()) {
            acc.add_product(a, v);
        }
    }
    let d = den.value();
    FiniteVector::new(num.iter().map(|acc| acc.value() / d).collect())
}

/// `sup |sum a_k x_k|` over `|x_k| <= 1`, in closed form `sum |a_k|`.
pub fn exact_h_scalar(coeffs: &[f64]) -> f64 {
    let mut total = 0.0;
    for a in coeffs {
        total += a.abs();
    }
    total
}

/// The same supremum by enumerating all `2^n` sign vectors (the extreme
/// points of the coefficient box).
pub fn exact_h_scalar_exhaustive(coeffs: &[f64]) -> Result<f64> {
    let n = coeffs.len();
    if n > EXHAUSTIVE_LIMIT {
        return Err(LabError::GuardExceeded {
            n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let mut best: f64 = 0.0;
    for mask in 0u32..(1u32 << n) {
        let mut s = 0.0;
        for (k, a) in coeffs.iter().enumerate() {
            if mask & (1 << k) != 0 {
                s += a;
            } else {
                s += -a;
            }
        }
        best = best.max(s.abs());
    }
    Ok(best)
}

fn dist(a: &[f64], b: &[f64], norm: NormKind) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm.norm_of(&diff)
}

/// The verdict rule by direct scan over a materialized estimate sequence
/// (`seq[n-1]` is the estimate after `n` terms).
pub fn reference_verdict(
    seq: &[Vec<f64>],
    sched: &TruncationSchedule,
    norm: NormKind,
) -> ConvergenceVerdict {
    let n = seq.len().min(sched.final_depth());
    if n == 0 {
        return ConvergenceVerdict {
            kind: VerdictKind::Inconclusive,
            limit: None,
            residual: f64::INFINITY,
            drift: f64::INFINITY,
            depth_used: 0,
            checkpoint_norms: Vec::new(),
        };
    }
    let last = &seq[n - 1];
    let from = n.saturating_sub(sched.window());
    let mut residual: f64 = 0.0;
    for e in &seq[from..n] {
        residual = residual.max(dist(e, last, norm));
    }
    let mut marks: Vec<usize> = sched.depths().iter().copied().filter(|&d| d <= n).collect();
    if marks.len() < sched.depths().len() && marks.last() != Some(&n) {
        marks.push(n);
    }
    let norms: Vec<f64> = marks.iter().map(|&d| norm.norm_of(&seq[d - 1])).collect();
    let drift = if marks.len() >= 2 {
        dist(
            &seq[marks[marks.len() - 2] - 1],
            &seq[marks[marks.len() - 1] - 1],
            norm,
        )
    } else {
        0.0
    };
    let tol = sched.tol();
    let mut growing = norms.len() >= 2 && norms[norms.len() - 1] > 10.0 * norms[0];
    for i in 1..norms.len() {
        growing &= norms[i] > norms[i - 1];
    }
    let kind = if residual <= tol && drift <= tol {
        VerdictKind::Converged
    } else if growing {
        VerdictKind::Diverging
    } else if residual <= tol {
        VerdictKind::Cauchy
    } else {
        VerdictKind::Inconclusive
    };
    let limit = matches!(kind, VerdictKind::Converged | VerdictKind::Cauchy)
        .then(|| FiniteVector::new(last.clone()))
        .transpose()
        .ok()
        .flatten();
    ConvergenceVerdict {
        kind,
        limit,
        residual,
        drift,
        depth_used: n,
        checkpoint_norms: norms,
    }
}
