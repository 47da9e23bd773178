//! Simultaneous goodness-of-fit testing.
//!
//! Many goodness-of-fit statistics are computed for one sample, each is
//! turned into a p-value with a parametric bootstrap, and the smallest
//! p-value is adjusted with the simulated null distribution of the minimum.
//! The result is a single test whose size is controlled and whose power is
//! close to that of the best individual method.
//!
//! The numerical kernels are generic over [`Scalar`]; the simulation
//! pipeline works in `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adjust;
pub mod chisquare;
pub mod error;
pub mod model;
pub mod rng;
pub mod sample;
pub mod scalar;
pub mod statistics;
pub mod studies;

pub use adjust::{
    build_adjustment_curve, per_method_pvalues, run_test, simulate_null_table, AdjustmentCurve,
    NullTable, SampleSize, Simulation, TestConfig, TestReport,
};
pub use error::{Error, Result, Stage};
pub use model::{AltFamily, AlternativeSpec, Family, NullModel};
pub use sample::{Histogram, Sample};
pub use scalar::Scalar;
pub use statistics::{compute_stat_vector, MethodId, StatConfig, StatVector, Workspace};

pub type StatVector64 = StatVector<f64>;
pub type NullTable64 = NullTable<f64>;
pub type AdjustmentCurve64 = AdjustmentCurve<f64>;
