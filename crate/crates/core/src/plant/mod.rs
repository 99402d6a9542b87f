//! Reference plants that stand in for the real systems, and test signals.

mod bouc_wen;
mod heater;
mod signal;

use alloc::vec::Vec;

pub use bouc_wen::{BoucWen, BoucWenParams, VALVE_INVERSE_GAIN};
pub use heater::{HammersteinHeater, HeaterParams};
pub use signal::{SignalSpec, Waveform};

use crate::error::Result;
use crate::narx::{simulate_with_history, NarxModel};

/// A system that maps an input sequence to an output sequence, always
/// starting from the same initial state.
pub trait Plant {
    fn respond(&self, input: &[f64]) -> Result<Vec<f64>>;
}

/// A NARX model used as the plant, with fixed initial histories.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPlant {
    pub model: NarxModel,
    /// `y(-1), y(-2), ...`
    pub y_init: Vec<f64>,
    /// `u(-1), u(-2), ...`
    pub u_init: Vec<f64>,
}

impl ModelPlant {
    /// Model at rest: every past output `y0`, every past input `u0`.
    pub fn at_rest(model: NarxModel, y0: f64, u0: f64) -> Self {
        let y_init = alloc::vec![y0; model.output_depth()];
        let u_init = alloc::vec![u0; model.input_depth()];
        Self {
            model,
            y_init,
            u_init,
        }
    }
}

impl Plant for ModelPlant {
    fn respond(&self, input: &[f64]) -> Result<Vec<f64>> {
        simulate_with_history(&self.model, input, &self.y_init, &self.u_init)
    }
}
