//! Benchmark engine for recurrent-cell forecasting on synthetic series.
//!
//! The crate has five layers:
//! - [`dgp`] — seeded generators for 21 synthetic processes across five
//!   behaviors (deterministic, random-walk, nonlinear, long-memory, chaotic);
//! - [`autodiff`] — a minimal reverse-mode tape over dense `f64` matrices;
//! - [`cells`] — 31 recurrent cell structures with exact parameter layouts;
//! - [`train`] — the split/normalize/window/Adam/grid-search protocol;
//! - [`bench`] — experiment orchestration, star selection, and reports.

pub mod autodiff;
pub mod bench;
pub mod cells;
pub mod dgp;
pub mod error;
pub mod seeds;
pub mod tensor;
pub mod train;

pub use error::{Error, Result};
pub use tensor::Tensor;
