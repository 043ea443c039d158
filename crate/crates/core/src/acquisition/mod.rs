//! Acquisition functions, their maximization, and the trust-region, RAASP
//! and batch variants.

mod functions;
mod kg;
mod maxvalue;
mod search;
mod spec;
mod trust_region;

pub use functions::{ei, mes, pi, ucb};
pub use kg::{kg, KG_FANTASIES, KG_INNER_GRID};
pub use maxvalue::{sample_max_values, MAX_VALUE_GRID};
pub use search::{
    batch_select, maximize_af, raasp_candidates, CandidateSet, SearchContext, SearchReport, Selection, MES_SAMPLES, MIN_SEPARATION,
    RAASP_SIGMA, RAW_CANDIDATES, RAW_CANDIDATES_TS, REFINE_STARTS, REFINE_STARTS_TS, REFINE_STEPS,
};
pub use spec::{AcquisitionSpec, AfKind, Bounds, Variant, KG_MAX_DIM};
pub use trust_region::{tr_update, TrustRegionState, TR_LENGTH_INIT, TR_LENGTH_MAX, TR_LENGTH_MIN, TR_SUCCESS_TOL};
