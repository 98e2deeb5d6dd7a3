//! Cycling power estimation from a cleat force sensor and an IMU: stroke
//! segmentation, a dense regression network with int8 post-training
//! quantization, a from-scratch trainer, a synthetic ride generator, and
//! evaluation utilities.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod csvio;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod nn;
pub mod scalar;
pub mod signal;
pub mod synth;
pub mod train;

pub use error::{Error, FormatError, Result};
pub use scalar::Real;

pub type DenseModelF32 = nn::DenseModel<f32>;
pub type DenseModelF64 = nn::DenseModel<f64>;
pub type ModelInputF32 = signal::ModelInput<f32>;
pub type LabeledStrokeF32 = dataset::LabeledStroke<f32>;
pub type ProcessedStrokeF32 = signal::ProcessedStroke<f32>;
