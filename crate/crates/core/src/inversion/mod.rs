//! Linear sampling inversion: SVD, Tikhonov filtering with Morozov's
//! discrepancy principle, and the grid indicator.

pub mod indicator;
pub mod regularization;
pub mod svd;

pub use indicator::{indicator_map, probe, rhs_vector, GridSpec, IndicatorMap, ProbeResult, RhsMode};
pub use regularization::{morozov_alpha, tikhonov_gnorm};
pub use svd::{svd, SvdFactors};
