//! Membership of a multiplier sequence in the multiplier spaces of a series.

use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::orlicz_pettis::WeakEngine;
use crate::space::{sample_functionals, Functional};
use crate::summability::{
    AlmostEngine, CesaroSeriesEngine, ConvergenceVerdict, PartialSums, PlainEngine, RieszEngine,
    RieszWeights, TruncationSchedule, VerdictKind,
};

use super::sequence::MultiplierSequence;
use super::series::OperatorSeriesSpec;
use super::terms::TermStream;

/// Random functionals sampled for the weak test, besides the coordinates.
pub const DEFAULT_FUNCTIONALS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Space {
    /// `sum T_k x_k` converges.
    M,
    /// Almost convergent partial sums.
    Mf,
    /// Cesàro summable.
    Mc,
    /// Riesz summable.
    Mr,
    /// Cauchy partial sums.
    Cm,
    /// Riesz-Cauchy.
    Cmr,
    /// Riesz summable in the weak topology.
    Mwr,
}

impl Space {
    pub const ALL: [Space; 7] = [
        Space::M,
        Space::Mf,
        Space::Mc,
        Space::Mr,
        Space::Cm,
        Space::Cmr,
        Space::Mwr,
    ];

    /// The inclusion chain `M ⊆ M_f ⊆ M_C ⊆ M_R`.
    pub const CHAIN: [Space; 4] = [Space::M, Space::Mf, Space::Mc, Space::Mr];

    pub fn label(self) -> &'static str {
        match self {
            Space::M => "M",
            Space::Mf => "M_f",
            Space::Mc => "M_C",
            Space::Mr => "M_R",
            Space::Cm => "CM",
            Space::Cmr => "CM_R",
            Space::Mwr => "M_wR",
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub weights: RieszWeights,
    pub schedule: TruncationSchedule,
    pub m: ConvergenceVerdict,
    pub m_f: ConvergenceVerdict,
    pub m_c: ConvergenceVerdict,
    pub m_r: ConvergenceVerdict,
    pub cm: ConvergenceVerdict,
    pub cm_r: ConvergenceVerdict,
    pub m_wr: ConvergenceVerdict,
    pub functionals: usize,
}

impl MembershipReport {
    pub fn get(&self, space: Space) -> &ConvergenceVerdict {
        match space {
            Space::M => &self.m,
            Space::Mf => &self.m_f,
            Space::Mc => &self.m_c,
            Space::Mr => &self.m_r,
            Space::Cm => &self.cm,
            Space::Cmr => &self.cm_r,
            Space::Mwr => &self.m_wr,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Space, &ConvergenceVerdict)> {
        Space::ALL.into_iter().map(move |s| (s, self.get(s)))
    }

    /// Converged flags along `M, M_f, M_C, M_R`.
    pub fn chain(&self) -> [bool; 4] {
        Space::CHAIN.map(|s| self.get(s).is_converged())
    }
}

/// A Cauchy-type space only asks for the window test, so a window-stable
/// verdict counts as membership.
fn cauchy_view(v: &ConvergenceVerdict, tol: f64) -> ConvergenceVerdict {
    let mut out = v.clone();
    if out.kind == VerdictKind::Cauchy && out.residual <= tol {
        out.kind = VerdictKind::Converged;
    }
    out
}

/// All seven verdicts with the default weak-test functionals.
pub fn membership(
    series: &OperatorSeriesSpec,
    x: &MultiplierSequence,
    w: &RieszWeights,
    sched: &TruncationSchedule,
) -> Result<MembershipReport> {
    let f = sample_functionals(series.dim_out(), DEFAULT_FUNCTIONALS, 0, series.y_norm)?;
    membership_with(series, x, w, sched, &f)
}

/// One pass over `T_k x_k` feeding every engine.
pub fn membership_with(
    series: &OperatorSeriesSpec,
    x: &MultiplierSequence,
    w: &RieszWeights,
    sched: &TruncationSchedule,
    functionals: &[Functional],
) -> Result<MembershipReport> {
    w.validate()?;
    let d = series.dim_out();
    let norm = series.y_norm;
    let mut terms = TermStream::new(series, x)?;
    let mut sums = PartialSums::new(d);
    let mut plain = PlainEngine::new(sched, norm);
    let mut riesz = RieszEngine::new(w, sched, norm, d);
    let mut cesaro = CesaroSeriesEngine::new(sched, norm, d);
    let mut almost = AlmostEngine::new(sched, norm, d);
    let mut weak = WeakEngine::new(functionals.to_vec(), w, sched, d)?;
    for _ in 0..sched.final_depth() {
        let (_, _, t) = terms.advance();
        cesaro.push(t);
        let s = sums.push(t);
        plain.push(s);
        riesz.push(s);
        almost.push(s);
        weak.push(s);
    }
    let m = plain.finish();
    let m_r = riesz.finish();
    let tol = sched.tol();
    Ok(MembershipReport {
        weights: w.clone(),
        schedule: sched.clone(),
        cm: cauchy_view(&m, tol),
        cm_r: cauchy_view(&m_r, tol),
        m,
        m_f: almost.finish().verdict,
        m_c: cesaro.finish(),
        m_r,
        m_wr: weak.finish().verdict,
        functionals: functionals.len(),
    })
}
