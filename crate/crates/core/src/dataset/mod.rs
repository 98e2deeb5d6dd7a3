//! Labeled training data: alignment of detected strokes with the reference
//! power stream, balance monitoring, and the dataset CSV.

mod align;
mod balance;
pub mod io;

pub use align::{align_streams, window_label, AlignConfig, Alignment};
pub use balance::{balance_histogram, BalanceReport};

use crate::scalar::Real;
use crate::signal::ModelInput;

/// One reference power meter message.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferencePowerSample {
    pub timestamp_us: u64,
    pub power_w: f64,
}

impl ReferencePowerSample {
    pub const fn new(timestamp_us: u64, power_w: f64) -> Self {
        Self { timestamp_us, power_w }
    }
}

/// A model input paired with its reference power label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledStroke<T> {
    pub input: ModelInput<T>,
    pub label_power_w: T,
    pub start_us: u64,
    pub end_us: u64,
    pub ride_id: String,
}

impl<T: Real> LabeledStroke<T> {
    pub fn new(input: ModelInput<T>, label_power_w: T) -> Self {
        Self {
            input,
            label_power_w,
            start_us: 0,
            end_us: 1,
            ride_id: String::new(),
        }
    }

    pub fn cast<U: Real>(&self) -> LabeledStroke<U> {
        LabeledStroke {
            input: self.input.cast(),
            label_power_w: U::lit(self.label_power_w.as_f64()),
            start_us: self.start_us,
            end_us: self.end_us,
            ride_id: self.ride_id.clone(),
        }
    }
}
