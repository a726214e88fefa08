//! Seeded multiplier probes and the inclusion-chain check.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::summability::{RieszWeights, TruncationSchedule, VerdictKind};

use super::membership::{membership, MembershipReport, Space};
use super::sequence::{MultiplierClass, MultiplierSequence};
use super::series::OperatorSeriesSpec;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct VerdictCounts {
    pub converged: usize,
    pub cauchy: usize,
    pub diverging: usize,
    pub inconclusive: usize,
}

impl VerdictCounts {
    fn add(&mut self, k: VerdictKind) {
        match k {
            VerdictKind::Converged => self.converged += 1,
            VerdictKind::Cauchy => self.cauchy += 1,
            VerdictKind::Diverging => self.diverging += 1,
            VerdictKind::Inconclusive => self.inconclusive += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.converged + self.cauchy + self.diverging + self.inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeWitness {
    pub trial: usize,
    pub multiplier: String,
    pub kind: VerdictKind,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub class: MultiplierClass,
    pub trials: usize,
    /// Verdicts for plain convergence of `sum T_k x_k`.
    pub counts: VerdictCounts,
    /// Verdicts for Riesz convergence.
    pub counts_r: VerdictCounts,
    /// Weakest plain verdict, ties broken by residual then trial index.
    pub worst: Option<ProbeWitness>,
}

/// Multiplier drawn for `trial` of a probe with base `seed`.
pub fn probe_multiplier(
    series: &OperatorSeriesSpec,
    class: MultiplierClass,
    trial: usize,
    seed: u64,
) -> MultiplierSequence {
    let s = seed.wrapping_add(trial as u64);
    match class {
        MultiplierClass::Linf if trial == 0 => {
            let unit = series.x_norm.norm_of(&vec![1.0; series.dim_in()]);
            MultiplierSequence::Ones.scaled(1.0 / unit)
        }
        MultiplierClass::Linf => MultiplierSequence::SeededBounded(s),
        MultiplierClass::C0 => MultiplierSequence::SeededNull(s),
        MultiplierClass::Phi => MultiplierSequence::Phi(vec![1.0]),
    }
}

/// Membership of `trials` seeded multipliers. For `linf`, trial 0 is the
/// normalized constant sequence `e`.
pub fn multiplier_probe(
    series: &OperatorSeriesSpec,
    class: MultiplierClass,
    trials: usize,
    seed: u64,
    w: &RieszWeights,
    sched: &TruncationSchedule,
) -> Result<ProbeReport> {
    if trials == 0 {
        return Err(LabError::validation("trials must be >= 1"));
    }
    if class == MultiplierClass::Phi {
        return Err(LabError::validation("probe classes are c0 and linf"));
    }
    let reports: Vec<(String, MembershipReport)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let x = probe_multiplier(series, class, i, seed);
            membership(series, &x, w, sched).map(|r| (x.to_string(), r))
        })
        .collect::<Result<_>>()?;
    let mut counts = VerdictCounts::default();
    let mut counts_r = VerdictCounts::default();
    let mut worst: Option<ProbeWitness> = None;
    for (i, (name, r)) in reports.into_iter().enumerate() {
        counts.add(r.m.kind);
        counts_r.add(r.m_r.kind);
        let cand = ProbeWitness {
            trial: i,
            multiplier: name,
            kind: r.m.kind,
            residual: r.m.residual,
        };
        let better = match &worst {
            None => true,
            Some(w) => (cand.kind.rank(), cand.residual) > (w.kind.rank(), w.residual),
        };
        if better {
            worst = Some(cand);
        }
    }
    Ok(ProbeReport {
        class,
        trials,
        counts,
        counts_r,
        worst,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    /// Converged flags along `M, M_f, M_C, M_R`.
    pub chain: [bool; 4],
    /// First `(earlier, later)` pair with the earlier space converged and the
    /// later one not.
    pub violation: Option<(Space, Space)>,
    pub membership: MembershipReport,
}

impl ChainReport {
    pub fn consistent(&self) -> bool {
        self.violation.is_none()
    }

    /// JSON dump of the full evidence, for counterexample triage.
    pub fn dump(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

pub fn inclusion_chain_probe(
    series: &OperatorSeriesSpec,
    x: &MultiplierSequence,
    w: &RieszWeights,
    sched: &TruncationSchedule,
) -> Result<ChainReport> {
    let m = membership(series, x, w, sched)?;
    let chain = m.chain();
    let mut violation = None;
    'outer: for i in 0..4 {
        for j in i + 1..4 {
            if chain[i] && !chain[j] {
                violation = Some((Space::CHAIN[i], Space::CHAIN[j]));
                break 'outer;
            }
        }
    }
    Ok(ChainReport {
        chain,
        violation,
        membership: m,
    })
}
