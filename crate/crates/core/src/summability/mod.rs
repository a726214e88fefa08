//! Riesz, Cesàro and general lower-triangular summability.

mod engines;
mod limits;
mod regularity;
mod transform;
mod verdict;
mod weights;

pub use engines::{
    AlmostEngine, AlmostEvidence, CesaroSeriesEngine, Estimator, PartialSums, PlainEngine,
    RieszEngine, RieszSeriesEngine, ALMOST_WINDOWS, BLOCK_SHARE_LIMIT,
};
pub use limits::{
    cesaro_series_sum, cesaro_series_sum_in, plain_limit, r_limit, r_limit_in, r_sum, r_sum_in,
};
pub use regularity::{check_regularity, LowerTriangular, RegularityReport};
pub use transform::{almost_convergence_transform, cesaro_transform, riesz_transform};
pub use verdict::{
    ConvergenceVerdict, EstimateMonitor, TruncationSchedule, VerdictKind, DEFAULT_DEPTHS,
    DEFAULT_TOL, DEFAULT_WINDOW, GROWTH_FACTOR,
};
pub use weights::{riesz_row, RieszWeights, WeightStep, WeightStream};

pub(crate) use weights::parse_floats;
