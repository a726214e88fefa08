//! Weak against strong Riesz convergence, and the Antosik–Mikusiński test
//! matrix built from scaled interval blocks of a series.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::multiplier::{MultiplierSequence, OperatorSeriesSpec, SeriesFamily, TermStream};
use crate::space::{distance, FiniteVector, Functional, NormKind};
use crate::summability::{
    riesz_transform, ConvergenceVerdict, PartialSums, RieszEngine, RieszWeights,
    TruncationSchedule, VerdictKind,
};

/// Riesz limits of `f(s_n)` for a family of functionals, fed the vectors
/// `s_n` one at a time.
#[derive(Debug, Clone)]
pub struct WeakEngine {
    functionals: Vec<Functional>,
    engines: Vec<RieszEngine>,
    coordinates: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakOutcome {
    /// Worst kind, largest residual; limit rebuilt from coordinate
    /// functionals when they lead the list.
    pub verdict: ConvergenceVerdict,
    pub per_functional: Vec<ConvergenceVerdict>,
}

impl WeakEngine {
    pub fn new(
        functionals: Vec<Functional>,
        w: &RieszWeights,
        sched: &TruncationSchedule,
        dim: usize,
    ) -> Result<Self> {
        if functionals.is_empty() {
            return Err(LabError::validation(
                "weak test needs at least one functional",
            ));
        }
        if let Some(f) = functionals.iter().find(|f| f.dim() != dim) {
            return Err(LabError::DimensionMismatch {
                expected: dim,
                found: f.dim(),
            });
        }
        let coordinates = (functionals.len() >= dim
            && (0..dim).all(|i| functionals[i].coeffs == Functional::coordinate(dim, i).coeffs))
        .then_some(dim);
        let engines = functionals
            .iter()
            .map(|_| RieszEngine::new(w, sched, NormKind::Inf, 1))
            .collect();
        Ok(Self {
            functionals,
            engines,
            coordinates,
        })
    }

    pub fn push(&mut self, s: &[f64]) {
        for (f, e) in self.functionals.iter().zip(&mut self.engines) {
            e.push(&[f.apply(s)]);
        }
    }

    pub fn finish(self) -> WeakOutcome {
        let per: Vec<ConvergenceVerdict> =
            self.engines.into_iter().map(RieszEngine::finish).collect();
        let kind = per
            .iter()
            .map(|v| v.kind)
            .max_by_key(|k| k.rank())
            .expect("nonempty");
        let residual = per.iter().map(|v| v.residual).fold(0.0, f64::max);
        let drift = per.iter().map(|v| v.drift).fold(0.0, f64::max);
        let depth_used = per.iter().map(|v| v.depth_used).min().unwrap_or(0);
        let mut checkpoint_norms: Vec<f64> = Vec::new();
        for v in &per {
            for (i, &c) in v.checkpoint_norms.iter().enumerate() {
                match checkpoint_norms.get_mut(i) {
                    Some(m) => *m = m.max(c),
                    None => checkpoint_norms.push(c),
                }
            }
        }
        let limit = match (kind, self.coordinates) {
            (VerdictKind::Converged | VerdictKind::Cauchy, Some(d)) => {
                Some(FiniteVector::from_raw(
                    per[..d]
                        .iter()
                        .map(|v| v.limit.as_ref().map_or(f64::NAN, |l| l[0]))
                        .collect(),
                ))
            }
            _ => None,
        };
        WeakOutcome {
            verdict: ConvergenceVerdict {
                kind,
                limit,
                residual,
                drift,
                depth_used,
                checkpoint_norms,
            },
            per_functional: per,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub strong: ConvergenceVerdict,
    pub weak: ConvergenceVerdict,
    pub strong_residual: f64,
    pub weak_residual: f64,
    /// `|strong_residual - weak_residual|`.
    pub gap: f64,
    /// Distance between the strong limit and the weakly reconstructed limit.
    pub limit_gap: Option<f64>,
}

/// Strong Riesz sum against the functional-wise Riesz limits of `f(s_n)`.
pub fn weak_strong_gap(
    series: &OperatorSeriesSpec,
    x: &MultiplierSequence,
    w: &RieszWeights,
    functionals: &[Functional],
    sched: &TruncationSchedule,
) -> Result<GapReport> {
    w.validate()?;
    let d = series.dim_out();
    let mut terms = TermStream::new(series, x)?;
    let mut sums = PartialSums::new(d);
    let mut strong = RieszEngine::new(w, sched, series.y_norm, d);
    let mut weak = WeakEngine::new(functionals.to_vec(), w, sched, d)?;
    for _ in 0..sched.final_depth() {
        let (_, _, t) = terms.advance();
        let s = sums.push(t);
        strong.push(s);
        weak.push(s);
    }
    let strong = strong.finish();
    let weak = weak.finish().verdict;
    let limit_gap = match (&strong.limit, &weak.limit) {
        (Some(a), Some(b)) => Some(distance(a.as_slice(), b.as_slice(), series.y_norm)),
        _ => None,
    };
    Ok(GapReport {
        strong_residual: strong.residual,
        weak_residual: weak.residual,
        gap: (strong.residual - weak.residual).abs(),
        limit_gap,
        strong,
        weak,
    })
}

/// Increasing disjoint index blocks `sigma_j` with scalings `t_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalPartition {
    intervals: Vec<(usize, usize)>,
    scalings: Vec<f64>,
}

impl IntervalPartition {
    /// Inclusive 1-based intervals.
    pub fn new(intervals: Vec<(usize, usize)>, scalings: Vec<f64>) -> Result<Self> {
        if intervals.is_empty() || intervals.len() != scalings.len() {
            return Err(LabError::validation(
                "partition needs matching nonempty intervals and scalings",
            ));
        }
        if intervals.iter().any(|&(lo, hi)| lo == 0 || lo > hi) {
            return Err(LabError::validation("intervals must satisfy 1 <= lo <= hi"));
        }
        if intervals.windows(2).any(|w| w[0].1 >= w[1].0) {
            return Err(LabError::validation(
                "intervals must be increasing and disjoint",
            ));
        }
        if scalings.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(LabError::validation("scalings must be positive"));
        }
        if scalings.windows(2).any(|w| w[1] < w[0]) {
            return Err(LabError::validation("scalings must be nondecreasing"));
        }
        Ok(Self {
            intervals,
            scalings,
        })
    }

    /// `sigma_j = {2j-1, 2j}`, `t_j = j`.
    pub fn pairs(count: usize) -> Result<Self> {
        Self::new(
            (1..=count).map(|j| (2 * j - 1, 2 * j)).collect(),
            (1..=count).map(|j| j as f64).collect(),
        )
    }

    /// `sigma_j = {j}`, `t_j = j`.
    pub fn singletons(count: usize) -> Result<Self> {
        Self::new(
            (1..=count).map(|j| (j, j)).collect(),
            (1..=count).map(|j| j as f64).collect(),
        )
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.intervals.clone(),
            self.scalings.iter().map(|t| c * t).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn intervals(&self) -> &[(usize, usize)] {
        &self.intervals
    }

    pub fn scalings(&self) -> &[f64] {
        &self.scalings
    }

    pub fn end(&self) -> usize {
        self.intervals.last().map_or(0, |i| i.1)
    }

    /// Final scaling at least ten times the first.
    pub fn scalings_grow(&self) -> bool {
        self.scalings[self.scalings.len() - 1] >= 10.0 * self.scalings[0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestMatrix {
    /// `entries[i][j]`, zero-based.
    pub entries: Vec<Vec<f64>>,
    pub row_functionals: Vec<Functional>,
    pub column_partition: IntervalPartition,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntosikReport {
    pub matrix: TestMatrix,
    /// `K_j = t_j sum_{m in sigma_j} ||T_m x_m||`; bounds `|h_ij| ||f_i||^{-1} t_i`.
    pub column_constants: Vec<f64>,
    /// `C = max_j K_j`: `max_j |h_ij| <= C ||f_i|| / t_i`.
    pub c: f64,
    pub column_decay: bool,
    pub diagonal: Vec<f64>,
    /// Riesz means of the diagonal sequence.
    pub diagonal_riesz: Vec<f64>,
    pub diagonal_decay: bool,
    pub consistent: bool,
    pub tol: f64,
}

/// Slack on the column bound for rounding.
const COLUMN_SLACK: f64 = 1e-12;

/// `h_ij = sum_{m in sigma_j} (f_i / t_i)(T_m (t_j x_m))`, with the
/// functionals used cyclically over rows.
pub fn antosik_matrix(
    series: &OperatorSeriesSpec,
    x: &MultiplierSequence,
    part: &IntervalPartition,
    functionals: &[Functional],
    w: &RieszWeights,
    tol: f64,
) -> Result<AntosikReport> {
    if functionals.is_empty() {
        return Err(LabError::validation("antosik matrix needs functionals"));
    }
    if let SeriesFamily::Explicit(ops) = &series.family {
        if part.end() > ops.len() {
            return Err(LabError::validation(format!(
                "interval end {} out of range: series lists {} operators",
                part.end(),
                ops.len()
            )));
        }
    }
    let d = series.dim_out();
    if let Some(f) = functionals.iter().find(|f| f.dim() != d) {
        return Err(LabError::DimensionMismatch {
            expected: d,
            found: f.dim(),
        });
    }
    // block vectors B_j = sum_{m in sigma_j} T_m x_m and their norm sums
    let mut terms = TermStream::new(series, x)?;
    let mut blocks = Vec::with_capacity(part.len());
    let mut norm_sums = Vec::with_capacity(part.len());
    let mut k = 0;
    for &(lo, hi) in part.intervals() {
        let mut b = vec![0.0; d];
        let mut ns = 0.0;
        while k < hi {
            let (m, _, t) = terms.advance();
            k = m;
            if m >= lo {
                b.iter_mut().zip(t).for_each(|(a, v)| *a += v);
                ns += series.y_norm.norm_of(t);
            }
        }
        blocks.push(b);
        norm_sums.push(ns);
    }
    let n = part.len();
    let t = part.scalings();
    let rows: Vec<Functional> = (0..n)
        .map(|i| functionals[i % functionals.len()].clone())
        .collect();
    let entries: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| rows[i].apply(&blocks[j]) * t[j] / t[i])
                .collect()
        })
        .collect();
    let column_constants: Vec<f64> = (0..n).map(|j| t[j] * norm_sums[j]).collect();
    let c = column_constants.iter().copied().fold(0.0, f64::max);
    let bounded = (0..n).all(|i| {
        let fi = rows[i].dual_norm(series.y_norm);
        (0..n).all(|j| entries[i][j].abs() <= fi * column_constants[j] / t[i] + COLUMN_SLACK)
    });
    let column_decay = bounded && part.scalings_grow();
    let diagonal: Vec<f64> = (0..n).map(|i| entries[i][i]).collect();
    let diagonal_riesz = riesz_transform(
        w,
        diagonal.iter().map(|&v| FiniteVector::from_raw(vec![v])),
        n,
    )?
    .into_iter()
    .map(|v| v[0])
    .collect();
    let diagonal_decay = diagonal[n / 2..].iter().all(|v| v.abs() <= tol);
    Ok(AntosikReport {
        matrix: TestMatrix {
            entries,
            row_functionals: rows,
            column_partition: part.clone(),
        },
        column_constants,
        c,
        column_decay,
        diagonal,
        diagonal_riesz,
        diagonal_decay,
        consistent: column_decay && diagonal_decay,
        tol,
    })
}
