#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acquisition;
pub mod analysis;
pub mod benchmarks;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod rng;
pub mod special;
pub mod surrogate;
pub mod trace;

pub use error::{Error, Result};
pub use trace::{ObservationTrace, TraceMeta};
