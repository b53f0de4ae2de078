//! Spectral and time-domain augmentation for time-series forecasting.
//!
//! The pipeline decomposes training windows with empirical mode decomposition,
//! reassembles the intrinsic mode functions with random uniform weights, and
//! mixes pairs of recombined windows with a Beta-distributed coefficient. A
//! linear direct multi-horizon forecaster and a CSV/CLI harness verify that
//! the augmentation helps under data scarcity.

pub mod augment;
pub mod baseline;
pub mod data;
pub mod emd;
pub mod error;
pub mod forecaster;
pub mod manifest;
pub mod pipeline;
pub mod sampling;
pub mod series;
pub mod spline;

pub use error::{Error, Result};
pub use series::{enumerate_windows, slice_window, MultivariateSeries, WindowPair};
