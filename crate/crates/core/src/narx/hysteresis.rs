use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use super::{FreeRun, NarxModel, Regime};
use crate::error::{Error, Result};

/// Periods simulated at most while waiting for the response to become periodic.
const MAX_PERIODS: usize = 200;
/// Consecutive periods closer than this (relative to the output scale) count
/// as periodic.
const PERIODIC_TOL: f64 = 1e-10;

/// Quasi-static sinusoidal excitation `center + amplitude * sin(2 pi f k Ts)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopExcitation {
    pub amplitude: f64,
    pub frequency: f64,
    pub center: f64,
    pub sample_period: f64,
}

impl LoopExcitation {
    pub fn period_samples(&self) -> usize {
        (1.0 / (self.frequency * self.sample_period)).round() as usize
    }

    fn input(&self, k: usize) -> f64 {
        self.center + self.amplitude * (TAU * self.frequency * k as f64 * self.sample_period).sin()
    }
}

/// One steady-state period of a hysteretic response, split at the input
/// extrema.
#[derive(Debug, Clone, PartialEq)]
pub struct HysteresisLoop {
    /// `(u, y)` from the input minimum to the maximum.
    pub loading: Vec<(f64, f64)>,
    /// `(u, y)` from the input maximum back to the minimum.
    pub unloading: Vec<(f64, f64)>,
    pub period: usize,
}

impl HysteresisLoop {
    pub fn branch(&self, regime: Regime) -> &[(f64, f64)] {
        match regime {
            Regime::Loading => &self.loading,
            Regime::Unloading => &self.unloading,
        }
    }

    /// Output interval covered by a branch.
    pub fn output_span(&self, regime: Regime) -> (f64, f64) {
        self.branch(regime)
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, y)| {
                (lo.min(y), hi.max(y))
            })
    }
}

/// Drives the model with the excitation until consecutive periods agree (at
/// least one period is always discarded) and splits the next period into
/// its loading and unloading branches.
pub fn hysteresis_loop(model: &NarxModel, excitation: &LoopExcitation) -> Result<HysteresisLoop> {
    if !model.is_hysteretic() {
        return Err(Error::ModelClass {
            expected: "hysteretic",
        });
    }
    if !(excitation.amplitude > 0.0) {
        return Err(Error::InvalidArgument {
            name: "amplitude",
            reason: "must be positive",
        });
    }
    let period = excitation.period_samples();
    if period < 4 {
        return Err(Error::InvalidArgument {
            name: "frequency",
            reason: "needs at least four samples per period",
        });
    }

    let u0 = excitation.input(0);
    let mut sim = FreeRun::new(
        model,
        &vec![0.0; model.output_depth()],
        &vec![u0; model.input_depth()],
    )?;
    let mut us = Vec::new();
    let mut ys = Vec::new();
    let mut run_period = |us: &mut Vec<f64>, ys: &mut Vec<f64>| -> Result<()> {
        for _ in 0..period {
            let u = excitation.input(us.len());
            ys.push(sim.step(u)?);
            us.push(u);
        }
        Ok(())
    };

    run_period(&mut us, &mut ys)?;
    let mut settled = false;
    for p in 1..MAX_PERIODS {
        run_period(&mut us, &mut ys)?;
        let (prev, last) = ys[(p - 1) * period..].split_at(period);
        let scale = 1.0 + last.iter().fold(0.0, |m: f64, y| m.max(y.abs()));
        let drift = prev
            .iter()
            .zip(last)
            .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
        if drift <= PERIODIC_TOL * scale {
            settled = true;
            break;
        }
    }
    if !settled {
        return Err(Error::NotPeriodic {
            periods: MAX_PERIODS,
        });
    }

    // Window one period starting at the input minimum of the last settled period.
    let last = us.len() - period;
    let trough = last + argmin(&us[last..]);
    run_period(&mut us, &mut ys)?;
    let peak = trough + argmax(&us[trough..trough + period]);
    let end = trough + period;

    let loading = (trough..=peak).map(|k| (us[k], ys[k])).collect();
    let unloading = (peak..=end).map(|k| (us[k], ys[k])).collect();
    Ok(HysteresisLoop {
        loading,
        unloading,
        period,
    })
}

fn argmin(xs: &[f64]) -> usize {
    xs.iter()
        .enumerate()
        .fold(0, |best, (i, &x)| if x < xs[best] { i } else { best })
}

fn argmax(xs: &[f64]) -> usize {
    xs.iter()
        .enumerate()
        .fold(0, |best, (i, &x)| if x > xs[best] { i } else { best })
}

/// Input on the given branch at which the loop output equals `y_target`,
/// by linear interpolation between samples.
pub fn loop_inverse(lp: &HysteresisLoop, y_target: f64, regime: Regime) -> Result<f64> {
    let branch = lp.branch(regime);
    let (lo, hi) = lp.output_span(regime);
    if !(lo <= y_target && y_target <= hi) {
        return Err(Error::OutOfLoopRange {
            target: y_target,
            lo,
            hi,
        });
    }
    for w in branch.windows(2) {
        let ((u0, y0), (u1, y1)) = (w[0], w[1]);
        if y0 == y_target {
            return Ok(u0);
        }
        if (y0 - y_target) * (y1 - y_target) <= 0.0 {
            if y1 == y0 {
                return Ok(u0);
            }
            return Ok(u0 + (u1 - u0) * (y_target - y0) / (y1 - y0));
        }
    }
    // Only reachable for a single-point branch.
    Ok(branch[0].0)
}
