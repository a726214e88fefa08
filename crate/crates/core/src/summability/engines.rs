//! Streaming limit engines. Each consumes one vector per step and produces a
//! verdict at the end without storing the sequence.
//!
//! Riesz-type engines track two estimates. `mu` is the Riesz mean of the whole
//! prefix. `nu` is the Riesz mean of the current block, the indices after the
//! previous schedule depth. Both are convex combinations of the sequence, so
//! both tend to the same limit under a regular method, but the block mean
//! forgets the early transient and resolves slow `O(1/n)` decay of `mu`.
//! The block stream is used once the previous depth carries at most half of
//! the total weight.

use std::collections::VecDeque;

use crate::compensated::{NeumaierSum, VectorAccumulator};
use crate::space::{distance, FiniteVector, NormKind};

use super::verdict::{
    classify, ConvergenceVerdict, EstimateMonitor, TruncationSchedule, VerdictKind,
};
use super::weights::{CumulativeRatio, RieszWeights};

/// Weight share of the previous depth above which the block mean is ignored.
pub const BLOCK_SHARE_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    Prefix,
    Block,
}

/// `acc <- acc + r (x - acc)`; `r = 1` copies so the first mean is exact.
fn blend(acc: &mut [f64], x: &[f64], r: f64) {
    if r == 1.0 {
        acc.copy_from_slice(x);
    } else {
        for (a, &v) in acc.iter_mut().zip(x) {
            *a += r * (v - *a);
        }
    }
}

/// Two monitors plus the log-weight at each checkpoint.
#[derive(Debug, Clone)]
struct DualMonitor {
    depths: Vec<usize>,
    prefix: EstimateMonitor,
    block: EstimateMonitor,
    ln_at_checkpoint: Vec<f64>,
    n: usize,
}

impl DualMonitor {
    fn new(sched: &TruncationSchedule, norm: NormKind) -> Self {
        Self {
            depths: sched.depths().to_vec(),
            prefix: EstimateMonitor::new(sched, norm),
            block: EstimateMonitor::new(sched, norm),
            ln_at_checkpoint: Vec::new(),
            n: 0,
        }
    }

    /// Returns true when step `n` is a checkpoint; the caller then resets its
    /// block state.
    fn push(&mut self, mu: &[f64], nu: &[f64], ln_weight: f64) -> bool {
        self.n += 1;
        self.prefix.push(mu);
        self.block.push(nu);
        if self.depths.get(self.ln_at_checkpoint.len()) == Some(&self.n) {
            self.ln_at_checkpoint.push(ln_weight);
            true
        } else {
            false
        }
    }

    /// Verdict of the chosen stream with its final estimate.
    fn finish(self, ln_final: f64) -> (ConvergenceVerdict, Estimator, Vec<f64>) {
        let prev = if self.depths.contains(&self.n) {
            let m = self.ln_at_checkpoint.len();
            (m >= 2).then(|| self.ln_at_checkpoint[m - 2])
        } else {
            self.ln_at_checkpoint.last().copied()
        };
        let share = prev.map_or(1.0, |lp| (lp - ln_final).exp());
        let (monitor, est) = if share <= BLOCK_SHARE_LIMIT {
            (self.block, Estimator::Block)
        } else {
            (self.prefix, Estimator::Prefix)
        };
        let last = monitor.last().map(<[f64]>::to_vec).unwrap_or_default();
        (monitor.finish(), est, last)
    }
}

/// Riesz limit of a sequence, fed term by term.
#[derive(Debug, Clone)]
pub struct RieszEngine {
    weights: RieszWeights,
    total: CumulativeRatio,
    block_ratio: CumulativeRatio,
    mu: Vec<f64>,
    nu: Vec<f64>,
    block_live: bool,
    k: usize,
    monitor: DualMonitor,
}

impl RieszEngine {
    pub fn new(w: &RieszWeights, sched: &TruncationSchedule, norm: NormKind, dim: usize) -> Self {
        Self {
            weights: w.clone(),
            total: CumulativeRatio::default(),
            block_ratio: CumulativeRatio::default(),
            mu: vec![0.0; dim],
            nu: vec![0.0; dim],
            block_live: false,
            k: 0,
            monitor: DualMonitor::new(sched, norm),
        }
    }

    pub fn push(&mut self, x: &[f64]) {
        self.k += 1;
        if let Some(r) = self.total.push(&self.weights, self.k) {
            blend(&mut self.mu, x, r);
        }
        if let Some(r) = self.block_ratio.push(&self.weights, self.k) {
            blend(&mut self.nu, x, r);
            self.block_live = true;
        }
        let nu = if self.block_live { &self.nu } else { &self.mu };
        let ln_r = self.total.ln_sum(&self.weights);
        if self.monitor.push(&self.mu, nu, ln_r) {
            self.block_ratio = CumulativeRatio::default();
            self.block_live = false;
        }
    }

    /// Current prefix mean `mu_n`.
    pub fn mean(&self) -> &[f64] {
        &self.mu
    }

    pub fn finish(self) -> ConvergenceVerdict {
        self.finish_with_estimator().0
    }

    pub fn finish_with_estimator(self) -> (ConvergenceVerdict, Estimator) {
        let (v, e, _) = self.finish_full();
        (v, e)
    }

    /// Also returns the final estimate, present even without a limit.
    pub fn finish_full(self) -> (ConvergenceVerdict, Estimator, Vec<f64>) {
        let ln_r = self.total.ln_sum(&self.weights);
        self.monitor.finish(ln_r)
    }
}

/// Compensated running partial sums `s_n`.
#[derive(Debug, Clone)]
pub struct PartialSums {
    acc: VectorAccumulator,
    current: Vec<f64>,
}

impl PartialSums {
    pub fn new(dim: usize) -> Self {
        Self {
            acc: VectorAccumulator::zeros(dim),
            current: vec![0.0; dim],
        }
    }

    pub fn push(&mut self, term: &[f64]) -> &[f64] {
        self.acc.add(term);
        self.acc.write_into(&mut self.current);
        &self.current
    }

    pub fn current(&self) -> &[f64] {
        &self.current
    }
}

/// Riesz sum of a series: partial sums fed to a [`RieszEngine`].
#[derive(Debug, Clone)]
pub struct RieszSeriesEngine {
    sums: PartialSums,
    inner: RieszEngine,
}

impl RieszSeriesEngine {
    pub fn new(w: &RieszWeights, sched: &TruncationSchedule, norm: NormKind, dim: usize) -> Self {
        Self {
            sums: PartialSums::new(dim),
            inner: RieszEngine::new(w, sched, norm, dim),
        }
    }

    pub fn push(&mut self, term: &[f64]) {
        let s = self.sums.push(term);
        self.inner.push(s);
    }

    pub fn finish(self) -> ConvergenceVerdict {
        self.inner.finish()
    }

    pub fn finish_full(self) -> (ConvergenceVerdict, Estimator, Vec<f64>) {
        self.inner.finish_full()
    }
}

/// Cesàro sum of a series via `(1/n) sum (n-k+1) x_k = (1/n) sum s_k`.
///
/// The block estimate is `(A_n - A_M) / (n - M)` with `A_n = sum_{k<=n} s_k`
/// and `M` the previous depth.
#[derive(Debug, Clone)]
pub struct CesaroSeriesEngine {
    sums: PartialSums,
    integral: VectorAccumulator,
    at_checkpoint: Vec<f64>,
    m: usize,
    a: Vec<f64>,
    mean: Vec<f64>,
    block: Vec<f64>,
    n: usize,
    monitor: DualMonitor,
}

impl CesaroSeriesEngine {
    pub fn new(sched: &TruncationSchedule, norm: NormKind, dim: usize) -> Self {
        Self {
            sums: PartialSums::new(dim),
            integral: VectorAccumulator::zeros(dim),
            at_checkpoint: vec![0.0; dim],
            m: 0,
            a: vec![0.0; dim],
            mean: vec![0.0; dim],
            block: vec![0.0; dim],
            n: 0,
            monitor: DualMonitor::new(sched, norm),
        }
    }

    pub fn push(&mut self, term: &[f64]) {
        self.n += 1;
        let s = self.sums.push(term);
        self.integral.add(s);
        self.integral.write_into(&mut self.a);
        let n = self.n as f64;
        let len = (self.n - self.m) as f64;
        for i in 0..self.a.len() {
            self.mean[i] = self.a[i] / n;
            self.block[i] = (self.a[i] - self.at_checkpoint[i]) / len;
        }
        if self.monitor.push(&self.mean, &self.block, n.ln()) {
            self.at_checkpoint.copy_from_slice(&self.a);
            self.m = self.n;
        }
    }

    pub fn finish(self) -> ConvergenceVerdict {
        let ln_n = (self.n.max(1) as f64).ln();
        self.monitor.finish(ln_n).0
    }
}

/// Ordinary limit of the fed sequence.
#[derive(Debug, Clone)]
pub struct PlainEngine {
    monitor: EstimateMonitor,
}

impl PlainEngine {
    pub fn new(sched: &TruncationSchedule, norm: NormKind) -> Self {
        Self {
            monitor: EstimateMonitor::new(sched, norm),
        }
    }

    pub fn push(&mut self, x: &[f64]) {
        self.monitor.push(x);
    }

    pub fn finish(self) -> ConvergenceVerdict {
        self.monitor.finish()
    }
}

/// Window lengths of the almost-convergence proxy.
pub const ALMOST_WINDOWS: [usize; 3] = [16, 64, 256];

/// Rolling compensated window sum of one length `p`.
#[derive(Debug, Clone)]
struct WindowTrack {
    p: usize,
    sum: Vec<NeumaierSum>,
    first: Option<Vec<f64>>,
    last: Vec<f64>,
    spread: f64,
}

/// Finite proxy for almost convergence: window means of length `p`, started
/// anywhere in the second half of the scheduled depth, must agree within tol.
///
/// Keeps rolling compensated sums and the last 256 terms only.
#[derive(Debug, Clone)]
pub struct AlmostEngine {
    sched: TruncationSchedule,
    norm: NormKind,
    start: usize,
    tracks: Vec<WindowTrack>,
    ring: VecDeque<Vec<f64>>,
    checkpoint_norms: Vec<f64>,
    last: Vec<f64>,
    n: usize,
}

/// Summary of the window-mean spreads.
#[derive(Debug, Clone, PartialEq)]
pub struct AlmostEvidence {
    /// `(p, spread)` for every window length that fits.
    pub spreads: Vec<(usize, f64)>,
    pub verdict: ConvergenceVerdict,
}

impl AlmostEngine {
    /// Expects `sched.final_depth()` terms.
    pub fn new(sched: &TruncationSchedule, norm: NormKind, dim: usize) -> Self {
        Self::with_length(sched, norm, dim, sched.final_depth())
    }

    /// Windows start in the second half of `len` terms.
    pub fn with_length(sched: &TruncationSchedule, norm: NormKind, dim: usize, len: usize) -> Self {
        let tracks = ALMOST_WINDOWS
            .iter()
            .filter(|&&p| 2 * p <= len)
            .map(|&p| WindowTrack {
                p,
                sum: vec![NeumaierSum::new(); dim],
                first: None,
                last: vec![0.0; dim],
                spread: 0.0,
            })
            .collect();
        Self {
            sched: sched.clone(),
            norm,
            start: (len / 2).max(1),
            tracks,
            ring: VecDeque::with_capacity(ALMOST_WINDOWS[2] + 1),
            checkpoint_norms: Vec::new(),
            last: vec![0.0; dim],
            n: 0,
        }
    }

    pub fn push(&mut self, x: &[f64]) {
        self.n += 1;
        self.last.copy_from_slice(x);
        if self.sched.depths().get(self.checkpoint_norms.len()) == Some(&self.n) {
            self.checkpoint_norms.push(self.norm.norm_of(x));
        }
        if self.n < self.start {
            return;
        }
        let seen = self.n - self.start + 1;
        for t in &mut self.tracks {
            for (acc, &v) in t.sum.iter_mut().zip(x) {
                acc.add(v);
            }
            if seen > t.p {
                // ring holds the previous terms, newest last
                let old = &self.ring[self.ring.len() - t.p];
                for (acc, &v) in t.sum.iter_mut().zip(old) {
                    acc.add(-v);
                }
            }
            if seen >= t.p {
                for (l, acc) in t.last.iter_mut().zip(&t.sum) {
                    *l = acc.value() / t.p as f64;
                }
                match &t.first {
                    None => t.first = Some(t.last.clone()),
                    Some(f) => t.spread = t.spread.max(distance(&t.last, f, self.norm)),
                }
            }
        }
        if self.ring.len() == ALMOST_WINDOWS[2] {
            let mut slot = self.ring.pop_front().expect("nonempty ring");
            slot.copy_from_slice(x);
            self.ring.push_back(slot);
        } else {
            self.ring.push_back(x.to_vec());
        }
    }

    pub fn finish(self) -> AlmostEvidence {
        let mut norms = self.checkpoint_norms;
        if self.sched.depths().get(norms.len()).is_some() && self.n > 0 {
            norms.push(self.norm.norm_of(&self.last));
        }
        let done: Vec<&WindowTrack> = self.tracks.iter().filter(|t| t.first.is_some()).collect();
        let spreads: Vec<(usize, f64)> = done.iter().map(|t| (t.p, t.spread)).collect();
        let verdict = match done.last() {
            None => ConvergenceVerdict {
                depth_used: self.n,
                checkpoint_norms: norms,
                ..ConvergenceVerdict::empty()
            },
            Some(t) => {
                let drift = distance(&t.last, t.first.as_ref().expect("filtered"), self.norm);
                let kind = classify(t.spread, drift, &norms, self.sched.tol());
                let limit = matches!(kind, VerdictKind::Converged | VerdictKind::Cauchy)
                    .then(|| FiniteVector::from_raw(t.last.clone()));
                ConvergenceVerdict {
                    kind,
                    limit,
                    residual: t.spread,
                    drift,
                    depth_used: self.n,
                    checkpoint_norms: norms,
                }
            }
        };
        AlmostEvidence { spreads, verdict }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sched(tol: f64) -> TruncationSchedule {
        TruncationSchedule::new(vec![1_000, 10_000, 100_000], 50, tol).unwrap()
    }

    #[test]
    fn blend_first_step_is_exact() {
        let mut acc = vec![1e20];
        blend(&mut acc, &[1.0], 1.0);
        assert_eq!(acc, vec![1.0]);
    }

    #[test]
    fn cesaro_mean_of_alternating_sequence() {
        let mut e = RieszEngine::new(&RieszWeights::cesaro(), &sched(1e-4), NormKind::Inf, 1);
        for k in 1..=100_000 {
            e.push(&[if k % 2 == 0 { 1.0 } else { -1.0 }]);
        }
        let (v, est) = e.finish_with_estimator();
        assert_eq!(est, Estimator::Block);
        assert_eq!(v.kind, VerdictKind::Converged);
        assert!(v.limit.unwrap()[0].abs() <= 1e-4);
    }

    #[test]
    fn slow_null_sequence_resolved_by_block_mean() {
        // prefix mean error ~ S/n = 1e-5 at the top depth
        let mut e = RieszEngine::new(&RieszWeights::cesaro(), &sched(1e-6), NormKind::Inf, 1);
        for k in 1..=100_000 {
            e.push(&[2.0 + 0.9f64.powi(k)]);
        }
        let v = e.finish();
        assert_eq!(v.kind, VerdictKind::Converged);
        assert!((v.limit.unwrap()[0] - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn zero_tail_weights_fall_back_to_prefix() {
        let w = RieszWeights::Explicit(vec![1.0]);
        let mut e = RieszEngine::new(&w, &sched(1e-8), NormKind::Inf, 1);
        for k in 1..=100_000 {
            e.push(&[k as f64]);
        }
        let (v, est) = e.finish_with_estimator();
        assert_eq!(est, Estimator::Prefix);
        assert_eq!(v.kind, VerdictKind::Converged);
        assert_eq!(v.limit.unwrap()[0], 1.0);
    }

    #[test]
    fn cesaro_series_matches_riesz_series() {
        let s = sched(1e-4);
        let mut c = CesaroSeriesEngine::new(&s, NormKind::Inf, 1);
        let mut r = RieszSeriesEngine::new(&RieszWeights::cesaro(), &s, NormKind::Inf, 1);
        for k in 1..=100_000 {
            let t = [if k % 2 == 1 { 1.0 } else { -1.0 }];
            c.push(&t);
            r.push(&t);
        }
        let (c, r) = (c.finish(), r.finish());
        assert_eq!(c.kind, VerdictKind::Converged);
        assert_eq!(r.kind, VerdictKind::Converged);
        let (lc, lr) = (c.limit.unwrap()[0], r.limit.unwrap()[0]);
        assert!((lc - 0.5).abs() <= 1e-4);
        assert!((lc - lr).abs() <= 2e-4);
    }

    #[test]
    fn divergent_series_grows() {
        let s = sched(1e-8);
        let mut c = CesaroSeriesEngine::new(&s, NormKind::Inf, 1);
        let mut r = RieszSeriesEngine::new(&RieszWeights::Power(1.0), &s, NormKind::Inf, 1);
        for _ in 0..100_000 {
            c.push(&[1.0]);
            r.push(&[1.0]);
        }
        assert_eq!(c.finish().kind, VerdictKind::Diverging);
        assert_eq!(r.finish().kind, VerdictKind::Diverging);
    }

    #[test]
    fn geometric_weights_track_last_terms() {
        let w = RieszWeights::Geometric(2.0);
        let mut e = RieszEngine::new(&w, &sched(1e-8), NormKind::Inf, 1);
        for k in 1..=100_000 {
            e.push(&[(k % 2) as f64]);
        }
        // mean weights the last term by about 1/2: oscillates near 1/3, 2/3
        assert_eq!(e.finish().kind, VerdictKind::Inconclusive);
    }

    #[test]
    fn almost_engine_on_grandi_partial_sums() {
        let mut a = AlmostEngine::new(&sched(1e-8), NormKind::Inf, 1);
        for k in 1..=100_000 {
            a.push(&[(k % 2) as f64]);
        }
        let ev = a.finish();
        assert_eq!(ev.spreads.len(), 3);
        assert_eq!(ev.verdict.kind, VerdictKind::Converged);
        assert!((ev.verdict.limit.unwrap()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn almost_engine_rejects_slow_oscillation() {
        // blocks of length 1000: window means of length 256 swing
        let mut a = AlmostEngine::new(&sched(1e-8), NormKind::Inf, 1);
        for k in 1..=100_000usize {
            a.push(&[((k / 1000) % 2) as f64]);
        }
        assert!(!a.finish().verdict.is_member());
    }
}
