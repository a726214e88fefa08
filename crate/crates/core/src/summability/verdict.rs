//! Truncation schedules and finite-depth convergence verdicts.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::space::{distance, FiniteVector, NormKind};

pub const DEFAULT_DEPTHS: [usize; 3] = [1_000, 10_000, 100_000];
pub const DEFAULT_WINDOW: usize = 50;
pub const DEFAULT_TOL: f64 = 1e-8;
/// Final-to-first checkpoint norm ratio that counts as growth.
pub const GROWTH_FACTOR: f64 = 10.0;

/// Where a limit process is sampled: checkpoint depths, the trailing window
/// used for the oscillation test and the tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationSchedule {
    depths: Vec<usize>,
    window: usize,
    tol: f64,
}

impl TruncationSchedule {
    pub fn new(depths: Vec<usize>, window: usize, tol: f64) -> Result<Self> {
        if depths.is_empty() {
            return Err(LabError::validation("schedule needs at least one depth"));
        }
        if depths[0] == 0 || depths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LabError::validation(
                "depths must be positive and strictly increasing",
            ));
        }
        if window == 0 || window >= depths[0] {
            return Err(LabError::validation(format!(
                "window must satisfy 0 < window < {}",
                depths[0]
            )));
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(LabError::validation("tolerance must be positive"));
        }
        Ok(Self {
            depths,
            window,
            tol,
        })
    }

    pub fn depths(&self) -> &[usize] {
        &self.depths
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn final_depth(&self) -> usize {
        *self.depths.last().expect("nonempty")
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(LabError::validation("tolerance must be positive"));
        }
        self.tol = tol;
        Ok(self)
    }
}

impl Default for TruncationSchedule {
    fn default() -> Self {
        Self {
            depths: DEFAULT_DEPTHS.to_vec(),
            window: DEFAULT_WINDOW,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VerdictKind {
    Converged,
    Cauchy,
    Diverging,
    Inconclusive,
}

impl VerdictKind {
    /// Rank used when aggregating: lower is stronger.
    pub(crate) fn rank(self) -> u8 {
        match self {
            VerdictKind::Converged => 0,
            VerdictKind::Cauchy => 1,
            VerdictKind::Inconclusive => 2,
            VerdictKind::Diverging => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::Converged => "Converged",
            VerdictKind::Cauchy => "Cauchy",
            VerdictKind::Diverging => "Diverging",
            VerdictKind::Inconclusive => "Inconclusive",
        }
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of a truncated limit diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceVerdict {
    pub kind: VerdictKind,
    /// Present for `Converged` and `Cauchy`.
    pub limit: Option<FiniteVector>,
    /// Trailing-window oscillation `max ||e_n - e_N||` at the final depth.
    pub residual: f64,
    /// Distance between the estimates at the last two checkpoints.
    pub drift: f64,
    pub depth_used: usize,
    /// Estimate norms at each checkpoint; the growth witness.
    pub checkpoint_norms: Vec<f64>,
}

impl ConvergenceVerdict {
    pub fn is_converged(&self) -> bool {
        self.kind == VerdictKind::Converged
    }

    /// Converged or Cauchy.
    pub fn is_member(&self) -> bool {
        matches!(self.kind, VerdictKind::Converged | VerdictKind::Cauchy)
    }

    pub(crate) fn empty() -> Self {
        Self {
            kind: VerdictKind::Inconclusive,
            limit: None,
            residual: f64::INFINITY,
            drift: f64::INFINITY,
            depth_used: 0,
            checkpoint_norms: Vec::new(),
        }
    }
}

/// Classifies from the window oscillation, the inter-depth drift and the
/// checkpoint norms. Converged needs both tests; growth outranks Cauchy.
pub(crate) fn classify(osc: f64, drift: f64, norms: &[f64], tol: f64) -> VerdictKind {
    let growth = norms.len() >= 2
        && norms.windows(2).all(|w| w[1] > w[0])
        && norms[norms.len() - 1] > GROWTH_FACTOR * norms[0];
    if osc <= tol && drift <= tol {
        VerdictKind::Converged
    } else if growth {
        VerdictKind::Diverging
    } else if osc <= tol {
        VerdictKind::Cauchy
    } else {
        VerdictKind::Inconclusive
    }
}

/// Streaming verdict over a sequence of limit estimates `e_1, e_2, ...`.
///
/// Keeps only the trailing window and the checkpoint values, so memory is
/// `O(window * dim)` regardless of depth.
#[derive(Debug, Clone)]
pub struct EstimateMonitor {
    depths: Vec<usize>,
    window: usize,
    tol: f64,
    norm: NormKind,
    n: usize,
    ring: VecDeque<Vec<f64>>,
    checkpoints: Vec<Vec<f64>>,
}

impl EstimateMonitor {
    pub fn new(sched: &TruncationSchedule, norm: NormKind) -> Self {
        Self {
            depths: sched.depths.clone(),
            window: sched.window,
            tol: sched.tol,
            norm,
            n: 0,
            ring: VecDeque::with_capacity(sched.window + 1),
            checkpoints: Vec::with_capacity(sched.depths.len()),
        }
    }

    pub fn steps(&self) -> usize {
        self.n
    }

    /// Most recent estimate.
    pub fn last(&self) -> Option<&[f64]> {
        self.ring.back().map(Vec::as_slice)
    }

    pub fn push(&mut self, e: &[f64]) {
        self.n += 1;
        if self.ring.len() == self.window {
            let mut slot = self.ring.pop_front().expect("nonempty ring");
            slot.copy_from_slice(e);
            self.ring.push_back(slot);
        } else {
            self.ring.push_back(e.to_vec());
        }
        if self.depths.get(self.checkpoints.len()) == Some(&self.n) {
            self.checkpoints.push(e.to_vec());
        }
    }

    pub fn finish(mut self) -> ConvergenceVerdict {
        let Some(last) = self.ring.back().cloned() else {
            return ConvergenceVerdict::empty();
        };
        if self.depths.get(self.checkpoints.len()).is_some() {
            // the sequence ended before the final depth
            self.checkpoints.push(last.clone());
        }
        let osc = self
            .ring
            .iter()
            .map(|e| distance(e, &last, self.norm))
            .fold(0.0, f64::max);
        let drift = match self.checkpoints.len() {
            0 | 1 => 0.0,
            m => distance(
                &self.checkpoints[m - 2],
                &self.checkpoints[m - 1],
                self.norm,
            ),
        };
        let norms: Vec<f64> = self
            .checkpoints
            .iter()
            .map(|c| self.norm.norm_of(c))
            .collect();
        let kind = classify(osc, drift, &norms, self.tol);
        let limit = match kind {
            VerdictKind::Converged | VerdictKind::Cauchy => Some(FiniteVector::from_raw(last)),
            _ => None,
        };
        ConvergenceVerdict {
            kind,
            limit,
            residual: osc,
            drift,
            depth_used: self.n,
            checkpoint_norms: norms,
        }
    }
}
