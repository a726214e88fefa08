//! The summing operator `S x = R-sum_k T_k x_k` on a multiplier space.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::multiplier::{
    aligned_multiplier, h_bound, membership_with, MultiplierSequence, OperatorSeriesSpec,
    TermStream,
};
use crate::orlicz_pettis::WeakEngine;
use crate::space::{sample_functionals, FiniteVector, Functional};
use crate::summability::{
    ConvergenceVerdict, RieszSeriesEngine, RieszWeights, TruncationSchedule, VerdictKind,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummingResult {
    pub value: FiniteVector,
    /// Trailing-window oscillation of the Riesz means at `depth_used`.
    pub residual: f64,
    pub depth_used: usize,
    pub weights: RieszWeights,
    pub kind: VerdictKind,
}

/// Riesz sum of `T_k x_k` over the schedule, with the final estimate.
fn riesz_series(
    series: &OperatorSeriesSpec,
    x: &MultiplierSequence,
    w: &RieszWeights,
    sched: &TruncationSchedule,
) -> Result<(ConvergenceVerdict, Vec<f64>)> {
    w.validate()?;
    let mut terms = TermStream::new(series, x)?;
    let mut engine = RieszSeriesEngine::new(w, sched, series.y_norm, series.dim_out());
    for _ in 0..sched.final_depth() {
        let (_, _, t) = terms.advance();
        engine.push(t);
    }
    let (v, _, est) = engine.finish_full();
    Ok((v, est))
}

fn domain_error(
    series: &OperatorSeriesSpec,
    x: &MultiplierSequence,
    w: &RieszWeights,
    sched: &TruncationSchedule,
    functionals: &[Functional],
    what: &str,
) -> LabError {
    match membership_with(series, x, w, sched, functionals) {
        Ok(report) => LabError::Domain {
            message: format!("multiplier {x} is not in {what}"),
            report: Box::new(report),
        },
        Err(e) => e,
    }
}

fn default_functionals(series: &OperatorSeriesSpec) -> Result<Vec<Functional>> {
    sample_functionals(
        series.dim_out(),
        crate::multiplier::DEFAULT_FUNCTIONALS,
        0,
        series.y_norm,
    )
}

/// `S x`; errors unless the Riesz verdict is Converged or Cauchy.
pub fn summing_apply(
    series: &OperatorSeriesSpec,
    x: &MultiplierSequence,
    w: &RieszWeights,
    sched: &TruncationSchedule,
) -> Result<SummingResult> {
    let (v, _) = riesz_series(series, x, w, sched)?;
    match v.limit {
        Some(value) => Ok(SummingResult {
            value,
            residual: v.residual,
            depth_used: v.depth_used,
            weights: w.clone(),
            kind: v.kind,
        }),
        None => Err(domain_error(
            series,
            x,
            w,
            sched,
            &default_functionals(series)?,
            "M_R",
        )),
    }
}

/// Weak variant: Riesz limits of `f(s_n)`, value rebuilt from the
/// coordinate functionals, which must lead `functionals`.
pub fn weak_summing_apply(
    series: &OperatorSeriesSpec,
    x: &MultiplierSequence,
    w: &RieszWeights,
    functionals: &[Functional],
    sched: &TruncationSchedule,
) -> Result<SummingResult> {
    w.validate()?;
    let d = series.dim_out();
    let mut terms = TermStream::new(series, x)?;
    let mut sums = crate::summability::PartialSums::new(d);
    let mut weak = WeakEngine::new(functionals.to_vec(), w, sched, d)?;
    for _ in 0..sched.final_depth() {
        let (_, _, t) = terms.advance();
        weak.push(sums.push(t));
    }
    let v = weak.finish().verdict;
    if !v.is_member() {
        return Err(domain_error(series, x, w, sched, functionals, "M_wR"));
    }
    let value = v.limit.ok_or_else(|| {
        LabError::validation("weak reconstruction needs the coordinate functionals first")
    })?;
    Ok(SummingResult {
        value,
        residual: v.residual,
        depth_used: v.depth_used,
        weights: w.clone(),
        kind: v.kind,
    })
}

/// Multipliers aligned with each output coordinate over `depth` terms; for
/// a scalar series this is the sign pattern of the coefficients.
pub fn extremal_multipliers(
    series: &OperatorSeriesSpec,
    depth: usize,
) -> Result<Vec<MultiplierSequence>> {
    let len = series.support_end().map_or(depth, |e| e.min(depth));
    if len == 0 {
        return Ok(Vec::new());
    }
    (0..series.dim_out())
        .map(|i| aligned_multiplier(series, i, len).map(MultiplierSequence::Explicit))
        .collect()
}

/// Injected extremal multipliers, then `trials` seeded unit multipliers.
fn norm_trials(
    series: &OperatorSeriesSpec,
    depth: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<MultiplierSequence>> {
    let mut out = extremal_multipliers(series, depth)?;
    out.extend((0..trials).map(|i| MultiplierSequence::SeededBounded(seed.wrapping_add(i as u64))));
    // the constant unit multiplier, which random signs almost never hit
    let unit = series.x_norm.norm_of(&vec![1.0; series.dim_in()]);
    out.push(MultiplierSequence::Ones.scaled(1.0 / unit));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummingNorm {
    /// `max ||S x||` over the member trials; a lower bound for `||S||`.
    pub estimate: f64,
    /// Index of the maximizing trial; extremal trials come first.
    pub best_trial: Option<usize>,
    pub trials_run: usize,
    pub members: usize,
}

pub fn summing_norm_estimate(
    series: &OperatorSeriesSpec,
    w: &RieszWeights,
    trials: usize,
    seed: u64,
    sched: &TruncationSchedule,
) -> Result<SummingNorm> {
    if trials == 0 {
        return Err(LabError::validation("trials must be >= 1"));
    }
    let xs = norm_trials(series, sched.final_depth(), trials, seed)?;
    let norms: Vec<Option<f64>> = xs
        .par_iter()
        .map(|x| {
            let (v, _) = riesz_series(series, x, w, sched)?;
            Ok(v.limit.map(|l| l.norm(series.y_norm)))
        })
        .collect::<Result<_>>()?;
    let mut best: Option<(usize, f64)> = None;
    for (i, n) in norms.iter().enumerate() {
        if let Some(n) = *n {
            if best.is_none_or(|(_, b)| n > b) {
                best = Some((i, n));
            }
        }
    }
    Ok(SummingNorm {
        estimate: best.map_or(0.0, |b| b.1),
        best_trial: best.map(|b| b.0),
        trials_run: xs.len(),
        members: norms.iter().flatten().count(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityWitness {
    pub lhs: f64,
    pub rhs: f64,
    pub h: f64,
    pub x_sup: f64,
    /// True when `h` is the upper bracket `sum ||T_k||`.
    pub h_is_upper: bool,
    pub holds: bool,
}

/// Slack on `||S x|| <= H ||x||`.
pub const CONTINUITY_SLACK: f64 = 1e-9;

/// `||S x||` against `H ||x||_sup` over the scheduled depth.
pub fn continuity_witness(
    series: &OperatorSeriesSpec,
    x: &MultiplierSequence,
    w: &RieszWeights,
    sched: &TruncationSchedule,
) -> Result<ContinuityWitness> {
    let s = summing_apply(series, x, w, sched)?;
    let depth = sched.final_depth();
    let (h, h_is_upper) = match series.norm_sum(depth) {
        Some(u) => (u, true),
        None => {
            let hb = h_bound(series, depth, 16, 0)?;
            (hb.estimate, hb.exact)
        }
    };
    let x_sup = x.sup_norm(series.dim_in(), series.x_norm, depth)?;
    let lhs = s.value.norm(series.y_norm);
    let rhs = h * x_sup;
    Ok(ContinuityWitness {
        lhs,
        rhs,
        h,
        x_sup,
        h_is_upper,
        holds: lhs <= rhs + CONTINUITY_SLACK,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailProfile {
    pub depths: Vec<usize>,
    /// Estimates of `||S_n - S||` at each depth.
    pub tail_norms: Vec<f64>,
    /// Depth standing in for the full sum.
    pub reference_depth: usize,
    /// Nonincreasing with the last norm at most 5% of the first.
    pub decaying: bool,
}

pub const TAIL_DECAY_RATIO: f64 = 0.05;

/// `sup ||S x - S_n x||` over injected extremal and seeded unit multipliers,
/// where `S_n x = sum_{k<=n} T_k x_k` and `S` is taken at ten times the
/// deepest depth. The estimate of the tail sum is used whatever its verdict.
pub fn tail_decay_profile(
    series: &OperatorSeriesSpec,
    w: &RieszWeights,
    depths: &[usize],
    trials: usize,
    seed: u64,
) -> Result<TailProfile> {
    if depths.is_empty() || depths[0] == 0 || depths.windows(2).any(|d| d[0] >= d[1]) {
        return Err(LabError::validation(
            "depths must be positive and increasing",
        ));
    }
    let reference = 10 * depths[depths.len() - 1];
    let window = 50.min(reference / 10 - 1).max(1);
    let sched = TruncationSchedule::new(vec![reference / 10, reference], window, 1e-8)?;
    let xs = norm_trials(series, reference, trials, seed)?;
    let tail_norms = depths
        .par_iter()
        .map(|&n| {
            let mut best: f64 = 0.0;
            for x in &xs {
                let (_, est) = riesz_series(series, &x.clone().tail(n), w, &sched)?;
                best = best.max(series.y_norm.norm_of(&est));
            }
            Ok(best)
        })
        .collect::<Result<Vec<f64>>>()?;
    let first = tail_norms[0];
    let last = tail_norms[tail_norms.len() - 1];
    let decaying = tail_norms.windows(2).all(|t| t[1] <= t[0]) && last <= TAIL_DECAY_RATIO * first;
    Ok(TailProfile {
        depths: depths.to_vec(),
        tail_norms,
        reference_depth: reference,
        decaying,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::{CoefficientRule, SeriesFamily};
    use crate::space::NormKind;

    fn diag(rule: CoefficientRule, dim: usize) -> OperatorSeriesSpec {
        OperatorSeriesSpec::new(SeriesFamily::Diagonal { rule, dim }).unwrap()
    }

    fn grandi() -> OperatorSeriesSpec {
        OperatorSeriesSpec::scalar(CoefficientRule::Alternating).unwrap()
    }

    fn sched(tol: f64) -> TruncationSchedule {
        TruncationSchedule::default().with_tol(tol).unwrap()
    }

    #[test]
    fn apply_examples() {
        let g = summing_apply(
            &grandi(),
            &MultiplierSequence::Ones,
            &RieszWeights::cesaro(),
            &sched(1e-4),
        )
        .unwrap();
        assert!((g.value[0] - 0.5).abs() <= 1e-4);
        let d = summing_apply(
            &diag(CoefficientRule::Geometric(2.0), 2),
            &MultiplierSequence::Ones,
            &RieszWeights::cesaro(),
            &sched(1e-8),
        )
        .unwrap();
        assert!((d.value[0] - 1.0).abs() <= 1e-8 && (d.value[1] - 1.0).abs() <= 1e-8);
        let p = summing_apply(
            &grandi(),
            &MultiplierSequence::Phi(vec![2.0, 1.0, 0.5]),
            &RieszWeights::Power(2.0),
            &sched(1e-8),
        )
        .unwrap();
        assert_eq!(p.value[0], 1.5);
        assert!(p.residual <= 1e-14);
    }

    #[test]
    fn non_member_is_a_domain_error() {
        let ones = OperatorSeriesSpec::scalar(CoefficientRule::Ones).unwrap();
        let s = TruncationSchedule::new(vec![100, 1000], 10, 1e-8).unwrap();
        match summing_apply(
            &ones,
            &MultiplierSequence::Ones,
            &RieszWeights::cesaro(),
            &s,
        ) {
            Err(LabError::Domain { report, .. }) => assert!(!report.m_r.is_member()),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn norm_estimates() {
        let s = TruncationSchedule::new(vec![1_000, 10_000], 50, 1e-8).unwrap();
        let zero = OperatorSeriesSpec::new(SeriesFamily::Zero { dim: 2 }).unwrap();
        assert_eq!(
            summing_norm_estimate(&zero, &RieszWeights::cesaro(), 3, 0, &s)
                .unwrap()
                .estimate,
            0.0
        );
        let d = summing_norm_estimate(
            &diag(CoefficientRule::Geometric(2.0), 2),
            &RieszWeights::cesaro(),
            4,
            0,
            &s,
        )
        .unwrap();
        assert!((d.estimate - 1.0).abs() <= 1e-3);
        let l = OperatorSeriesSpec::scalar(CoefficientRule::List(vec![1.0, -2.0, 3.0])).unwrap();
        let n = summing_norm_estimate(&l, &RieszWeights::cesaro(), 4, 0, &s).unwrap();
        assert_eq!((n.estimate, n.best_trial), (6.0, Some(0)));
    }

    #[test]
    fn continuity_examples() {
        let c = continuity_witness(
            &grandi(),
            &MultiplierSequence::Ones,
            &RieszWeights::cesaro(),
            &sched(1e-4),
        )
        .unwrap();
        assert!((c.lhs - 0.5).abs() <= 1e-4);
        assert!(c.rhs >= 1.0 && c.holds);
        let z = continuity_witness(
            &grandi(),
            &MultiplierSequence::Phi(vec![0.0]),
            &RieszWeights::cesaro(),
            &sched(1e-8),
        )
        .unwrap();
        assert_eq!((z.lhs, z.rhs), (0.0, 0.0));
        assert!(z.holds);
    }

    #[test]
    fn homogeneity() {
        let s = diag(CoefficientRule::Harmonic, 3);
        let x = MultiplierSequence::SeededNull(4);
        let sc = TruncationSchedule::new(vec![1_000, 10_000], 50, 1e-8).unwrap();
        let a = summing_apply(&s, &x, &RieszWeights::cesaro(), &sc).unwrap();
        let b = summing_apply(&s, &x.clone().scaled(2.0), &RieszWeights::cesaro(), &sc).unwrap();
        for i in 0..3 {
            assert!((b.value[i] - 2.0 * a.value[i]).abs() <= 1e-9 * a.value[i].abs().max(1e-300));
        }
    }

    #[test]
    fn tail_profiles() {
        let g = tail_decay_profile(
            &diag(CoefficientRule::Geometric(2.0), 2),
            &RieszWeights::cesaro(),
            &[8, 16, 32],
            4,
            0,
        )
        .unwrap();
        for (n, t) in g.depths.iter().zip(&g.tail_norms) {
            assert!((t - 2f64.powi(-(*n as i32))).abs() <= 1e-9, "{n}: {t}");
        }
        assert!(g.decaying);
        let h = tail_decay_profile(
            &diag(CoefficientRule::Harmonic, 2),
            &RieszWeights::cesaro(),
            &[8, 16, 32],
            4,
            0,
        )
        .unwrap();
        assert!(h.tail_norms.iter().all(|&t| t > 0.05));
        assert!(!h.decaying);
        let p = OperatorSeriesSpec::scalar(CoefficientRule::List(vec![1.0, 1.0, 1.0])).unwrap();
        let t = tail_decay_profile(&p, &RieszWeights::cesaro(), &[3, 5], 2, 0).unwrap();
        assert_eq!(t.tail_norms, vec![0.0, 0.0]);
    }

    #[test]
    fn weak_matches_strong() {
        let s = diag(CoefficientRule::Geometric(3.0), 3);
        let f = sample_functionals(3, 5, 9, NormKind::Inf).unwrap();
        let x = MultiplierSequence::SeededBounded(1);
        let a = summing_apply(&s, &x, &RieszWeights::cesaro(), &sched(1e-8)).unwrap();
        let b = weak_summing_apply(&s, &x, &RieszWeights::cesaro(), &f, &sched(1e-8)).unwrap();
        assert!(a.value.distance(&b.value, NormKind::Inf).unwrap() <= 1e-10);
        let g = weak_summing_apply(
            &grandi(),
            &MultiplierSequence::Ones,
            &RieszWeights::cesaro(),
            &[Functional::coordinate(1, 0)],
            &sched(1e-4),
        )
        .unwrap();
        assert!((g.value[0] - 0.5).abs() <= 1e-4);
    }
}
