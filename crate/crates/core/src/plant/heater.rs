use alloc::vec::Vec;

use super::Plant;
use crate::error::{Error, Result};

/// Hammerstein heater: a static quadratic drive `v = a u^2 + b u` feeding a
/// second-order linear block
/// `y(k) = c1 y(k-1) + g1 v(k-1) + c2 y(k-2) + g2 v(k-2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeaterParams {
    pub output_lag1: f64,
    pub drive_lag1: f64,
    pub output_lag2: f64,
    pub drive_lag2: f64,
    pub drive_quadratic: f64,
    pub drive_linear: f64,
}

impl HeaterParams {
    /// The small electrical heater benchmark.
    pub const BENCHMARK: Self = Self {
        output_lag1: 1.205445,
        drive_lag1: 8.985133e-2,
        output_lag2: -3.0877507e-1,
        drive_lag2: 9.462358e-3,
        drive_quadratic: 4.639331e-1,
        drive_linear: 5.435865e-2,
    };

    pub fn drive(&self, u: f64) -> f64 {
        self.drive_quadratic * u * u + self.drive_linear * u
    }

    /// Pole magnitudes of the linear block, largest first.
    pub fn pole_magnitudes(&self) -> [f64; 2] {
        let (a, b) = (self.output_lag1, self.output_lag2);
        let disc = a * a + 4.0 * b;
        let mut mags = if disc >= 0.0 {
            let s = disc.sqrt();
            [((a + s) / 2.0).abs(), ((a - s) / 2.0).abs()]
        } else {
            // Complex pair: |z|^2 = -b.
            [(-b).sqrt(); 2]
        };
        mags.sort_by(|x, y| y.total_cmp(x));
        mags
    }

    /// Steady output under a constant input.
    pub fn steady_state(&self, u: f64) -> f64 {
        self.drive(u) * (self.drive_lag1 + self.drive_lag2)
            / (1.0 - self.output_lag1 - self.output_lag2)
    }
}

impl Default for HeaterParams {
    fn default() -> Self {
        Self::BENCHMARK
    }
}

/// Stepwise heater starting from rest; inputs are clamped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HammersteinHeater {
    params: HeaterParams,
    /// `y(k-1), y(k-2)`
    outputs: [f64; 2],
    /// `v(k-1), v(k-2)`
    drives: [f64; 2],
    clamped: usize,
}

impl HammersteinHeater {
    /// Fails if the linear block is not stable.
    pub fn new(params: HeaterParams) -> Result<Self> {
        if params.pole_magnitudes()[0] >= 1.0 {
            return Err(Error::InvalidArgument {
                name: "heater",
                reason: "linear block has a pole outside the unit circle",
            });
        }
        Ok(Self {
            params,
            outputs: [0.0; 2],
            drives: [0.0; 2],
            clamped: 0,
        })
    }

    /// Emits `y(k)` and then applies `u(k)`.
    pub fn step(&mut self, u: f64) -> f64 {
        let p = &self.params;
        let y = p.output_lag1 * self.outputs[0]
            + p.drive_lag1 * self.drives[0]
            + p.output_lag2 * self.outputs[1]
            + p.drive_lag2 * self.drives[1];
        let u_applied = u.clamp(0.0, 1.0);
        if u_applied != u {
            self.clamped += 1;
        }
        self.outputs = [y, self.outputs[0]];
        self.drives = [p.drive(u_applied), self.drives[0]];
        y
    }

    /// Number of inputs clamped so far.
    pub fn clamp_count(&self) -> usize {
        self.clamped
    }
}

impl Plant for HeaterParams {
    fn respond(&self, input: &[f64]) -> Result<Vec<f64>> {
        let mut heater = HammersteinHeater::new(*self)?;
        Ok(input.iter().map(|&u| heater.step(u)).collect())
    }
}
