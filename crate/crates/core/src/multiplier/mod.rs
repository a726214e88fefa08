//! Operator series, multiplier sequences and the multiplier spaces
//! `M`, `M_f`, `M_C`, `M_R`, `CM`, `CM_R`, `M_wR`.

mod hbound;
mod membership;
mod probe;
mod sequence;
mod series;
mod terms;

pub use hbound::{h_bound, HBound};
pub use membership::{membership, membership_with, MembershipReport, Space, DEFAULT_FUNCTIONALS};
pub use probe::{
    inclusion_chain_probe, multiplier_probe, probe_multiplier, ChainReport, ProbeReport,
    ProbeWitness, VerdictCounts,
};
pub use sequence::{
    ClassEvidence, MultiplierClass, MultiplierSequence, MultiplierStream, NULL_ENVELOPE,
};
pub use series::{CoefficientRule, OperatorSeriesSpec, SeriesFamily};
pub use terms::{partial_sums, TermStream};

pub(crate) use hbound::aligned_multiplier;
