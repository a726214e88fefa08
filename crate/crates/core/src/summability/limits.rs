//! Limit diagnostics over sequences and series.

use crate::error::{LabError, Result};
use crate::space::{check_dim, FiniteVector, NormKind};

use super::engines::{CesaroSeriesEngine, PlainEngine, RieszEngine, RieszSeriesEngine};
use super::verdict::{ConvergenceVerdict, TruncationSchedule};
use super::weights::RieszWeights;

/// Builds an engine from the first vector's dimension and feeds it up to
/// `final_depth` vectors.
fn drive<E>(
    seq: impl IntoIterator<Item = FiniteVector>,
    sched: &TruncationSchedule,
    make: impl FnOnce(usize) -> E,
    push: impl Fn(&mut E, &[f64]),
) -> Result<E> {
    let mut it = seq.into_iter().take(sched.final_depth());
    let first = it
        .next()
        .ok_or_else(|| LabError::validation("sequence is empty"))?;
    let dim = first.dim();
    let mut engine = make(dim);
    push(&mut engine, first.as_slice());
    for x in it {
        check_dim(dim, x.dim())?;
        push(&mut engine, x.as_slice());
    }
    Ok(engine)
}

macro_rules! run_engine {
    ($seq:expr, $sched:expr, |$dim:ident| $ctor:expr) => {{
        Ok(drive($seq, $sched, |$dim| $ctor, |e, x| e.push(x))?.finish())
    }};
}

/// Riesz limit of a sequence in the sup norm.
pub fn r_limit(
    w: &RieszWeights,
    seq: impl IntoIterator<Item = FiniteVector>,
    sched: &TruncationSchedule,
) -> Result<ConvergenceVerdict> {
    r_limit_in(w, seq, sched, NormKind::Inf)
}

pub fn r_limit_in(
    w: &RieszWeights,
    seq: impl IntoIterator<Item = FiniteVector>,
    sched: &TruncationSchedule,
    norm: NormKind,
) -> Result<ConvergenceVerdict> {
    w.validate()?;
    run_engine!(seq, sched, |dim| RieszEngine::new(w, sched, norm, dim))
}

/// Riesz sum of a series: the Riesz limit of its compensated partial sums.
pub fn r_sum(
    w: &RieszWeights,
    terms: impl IntoIterator<Item = FiniteVector>,
    sched: &TruncationSchedule,
) -> Result<ConvergenceVerdict> {
    r_sum_in(w, terms, sched, NormKind::Inf)
}

pub fn r_sum_in(
    w: &RieszWeights,
    terms: impl IntoIterator<Item = FiniteVector>,
    sched: &TruncationSchedule,
    norm: NormKind,
) -> Result<ConvergenceVerdict> {
    w.validate()?;
    run_engine!(terms, sched, |dim| RieszSeriesEngine::new(
        w, sched, norm, dim
    ))
}

/// `lim (1/n) sum_{k<=n} (n-k+1) x_k`.
pub fn cesaro_series_sum(
    terms: impl IntoIterator<Item = FiniteVector>,
    sched: &TruncationSchedule,
) -> Result<ConvergenceVerdict> {
    cesaro_series_sum_in(terms, sched, NormKind::Inf)
}

pub fn cesaro_series_sum_in(
    terms: impl IntoIterator<Item = FiniteVector>,
    sched: &TruncationSchedule,
    norm: NormKind,
) -> Result<ConvergenceVerdict> {
    run_engine!(terms, sched, |dim| CesaroSeriesEngine::new(
        sched, norm, dim
    ))
}

/// Ordinary limit of a sequence.
pub fn plain_limit(
    seq: impl IntoIterator<Item = FiniteVector>,
    sched: &TruncationSchedule,
    norm: NormKind,
) -> Result<ConvergenceVerdict> {
    run_engine!(seq, sched, |_dim| PlainEngine::new(sched, norm))
}
