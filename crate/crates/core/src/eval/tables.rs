//! Validation and compensation runs over grids of sinusoids.
//!
//! Every run is prefixed with a lead-in so the sine starts at phase zero,
//! then whole periods are discarded as transient and the next two are scored.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, TAU};
use core::ops::Range;

use super::metrics::{effort, mape, Effort};
use crate::compensator::{compensate, CompensationRun, Initialization};
use crate::error::{Error, Result};
use crate::narx::{simulate_free_run, NarxModel};
use crate::plant::{Plant, SignalSpec};

/// Periods discarded before scoring unless a grid says otherwise. Loop-seeded
/// hysteresis runs need a few cycles to forget the seed.
pub const DEFAULT_TRANSIENT_PERIODS: usize = 5;
/// Periods scored.
pub const SCORED_PERIODS: usize = 2;

/// Sample layout of one table run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunLayout {
    /// Samples before the nominal `k = 0` that start the sine at phase zero.
    pub lead: usize,
    /// Samples per period.
    pub period: usize,
    /// Total run length.
    pub len: usize,
    /// Indices that are scored.
    pub scored: Range<usize>,
}

impl RunLayout {
    pub fn new(spec: &SignalSpec, sample_period: f64) -> Result<Self> {
        Self::with_transient(spec, sample_period, DEFAULT_TRANSIENT_PERIODS)
    }

    pub fn with_transient(
        spec: &SignalSpec,
        sample_period: f64,
        transient_periods: usize,
    ) -> Result<Self> {
        if !(spec.frequency > 0.0 && sample_period > 0.0) {
            return Err(Error::InvalidArgument {
                name: "frequency",
                reason: "must be positive",
            });
        }
        let period = spec.period_samples(sample_period);
        if period < 2 {
            return Err(Error::InvalidArgument {
                name: "frequency",
                reason: "fewer than two samples per period",
            });
        }
        let lead = (spec.phase.rem_euclid(TAU) / TAU * period as f64).round() as usize;
        let start = lead + transient_periods * period;
        let len = start + SCORED_PERIODS * period;
        Ok(Self {
            lead,
            period,
            len,
            scored: start..len,
        })
    }

    /// The signal over the whole run, lead-in included.
    pub fn generate(&self, spec: &SignalSpec, sample_period: f64) -> Vec<f64> {
        spec.generate_from(-(self.lead as i64), self.len, sample_period)
    }
}

/// Free-run MAPE of `model` against `plant` under input `spec`.
///
/// The model starts from zero past outputs with its past inputs at rest.
pub fn validation_mape(
    model: &NarxModel,
    plant: &dyn Plant,
    spec: &SignalSpec,
    sample_period: f64,
    transient_periods: usize,
) -> Result<f64> {
    let layout = RunLayout::with_transient(spec, sample_period, transient_periods)?;
    let u = layout.generate(spec, sample_period);
    let y_plant = plant.respond(&u)?;
    let y_model = simulate_free_run(model, &u, &alloc::vec![0.0; model.output_depth()])?;
    let w = layout.scored;
    mape(&y_plant[w.clone()], &y_model[w])
}

/// One row per sample of a compensation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub k: usize,
    pub reference: f64,
    pub input: f64,
    pub compensated: f64,
    pub uncompensated: f64,
}

/// Compensated and uncompensated responses to one reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub series: Vec<ReportRow>,
    pub mape_comp: f64,
    pub mape_uncomp: f64,
    /// Effort over the last period.
    pub effort: Effort,
    pub hold_rate: f64,
}

/// Compensates `reference` with `model`, drives `plant` with the result and
/// with the raw reference, and scores both over `scored`.
///
/// `m(k)` targets `r(k + d)`, so the compensated output is compared with the
/// reference at the same index.
pub fn compensation_report(
    model: &NarxModel,
    plant: &dyn Plant,
    reference: &[f64],
    init: &Initialization,
    scored: Range<usize>,
    effort_window: usize,
) -> Result<ExperimentReport> {
    if scored.end > reference.len() || scored.is_empty() {
        return Err(Error::InvalidArgument {
            name: "scored",
            reason: "must be a non-empty range inside the reference",
        });
    }
    let run = compensate(model, reference, init)?;
    score_run(plant, reference, &run, scored, effort_window)
}

/// Drives `plant` with a finished compensation run and with the raw
/// reference, and scores both over `scored`.
pub fn score_run(
    plant: &dyn Plant,
    reference: &[f64],
    run: &CompensationRun,
    scored: Range<usize>,
    effort_window: usize,
) -> Result<ExperimentReport> {
    if scored.end > reference.len() || scored.is_empty() || run.inputs.len() != reference.len() {
        return Err(Error::InvalidArgument {
            name: "scored",
            reason: "must be a non-empty range inside the reference",
        });
    }
    let y_c = plant.respond(&run.inputs)?;
    let y_u = plant.respond(reference)?;
    let target = &reference[scored.clone()];
    let series = (0..reference.len())
        .map(|k| ReportRow {
            k,
            reference: reference[k],
            input: run.inputs[k],
            compensated: y_c[k],
            uncompensated: y_u[k],
        })
        .collect();
    // A constant reference has no range to normalize by.
    let score = |y: &[f64]| match mape(target, y) {
        Err(Error::DegenerateRange) => Ok(f64::NAN),
        other => other,
    };
    Ok(ExperimentReport {
        series,
        mape_comp: score(&y_c[scored.clone()])?,
        mape_uncomp: score(&y_u[scored])?,
        effort: effort(&run.inputs, reference, effort_window)?,
        hold_rate: run.hold_rate(),
    })
}

/// Table-protocol compensation run for a sinusoidal reference.
pub fn compensation_run(
    model: &NarxModel,
    plant: &dyn Plant,
    spec: &SignalSpec,
    sample_period: f64,
    transient_periods: usize,
    init: &Initialization,
) -> Result<ExperimentReport> {
    let layout = RunLayout::with_transient(spec, sample_period, transient_periods)?;
    let r = layout.generate(spec, sample_period);
    compensation_report(model, plant, &r, init, layout.scored, layout.period)
}

/// How a table cell's `(frequency, amplitude)` becomes a signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellSignal {
    /// `amplitude + swing sin(2 pi f k Ts)`: the cell value is the offset.
    Offset { swing: f64 },
    /// `amplitude sin(2 pi f k Ts + phase)`, lifted by `amplitude` when `raised`.
    Sine { phase: f64, raised: bool },
}

/// Frequencies (rows) by amplitudes (columns) at a fixed sampling period.
#[derive(Debug, Clone, PartialEq)]
pub struct TableGrid {
    pub frequencies: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub sample_period: f64,
    pub signal: CellSignal,
    /// Whole periods discarded before the scored window.
    pub transient_periods: usize,
}

impl TableGrid {
    /// Heater validation: `u = u0 + 0.2 sin(2 pi f k Ts)`, `Ts = 12 s`.
    pub fn heater_validation() -> Self {
        Self {
            frequencies: alloc::vec![0.0005, 0.001, 0.002],
            amplitudes: alloc::vec![0.3, 0.5, 0.7],
            sample_period: 12.0,
            signal: CellSignal::Offset { swing: 0.2 },
            transient_periods: DEFAULT_TRANSIENT_PERIODS,
        }
    }

    /// Heater compensation: `r = r0 sin(2 pi f k Ts + pi/2) + r0`, `Ts = 12 s`.
    pub fn heater_compensation() -> Self {
        Self {
            frequencies: alloc::vec![0.0005, 0.001, 0.002, 0.004],
            amplitudes: alloc::vec![0.05, 0.1, 0.2],
            sample_period: 12.0,
            signal: CellSignal::Sine {
                phase: FRAC_PI_2,
                raised: true,
            },
            transient_periods: DEFAULT_TRANSIENT_PERIODS,
        }
    }

    /// Bouc–Wen validation: `u = G sin(2 pi f t)`, `Ts = 5 ms`.
    pub fn bouc_wen_validation() -> Self {
        Self {
            frequencies: alloc::vec![0.2, 1.0, 5.0],
            amplitudes: alloc::vec![10.0, 30.0, 50.0],
            sample_period: 5e-3,
            signal: CellSignal::Sine {
                phase: 0.0,
                raised: false,
            },
            transient_periods: DEFAULT_TRANSIENT_PERIODS,
        }
    }

    /// Bouc–Wen compensation: `r = G0 sin(2 pi f t + pi/2)`, `Ts = 5 ms`.
    pub fn bouc_wen_compensation() -> Self {
        Self {
            frequencies: alloc::vec![0.2, 1.0, 2.0, 5.0],
            amplitudes: alloc::vec![20.0, 30.0, 40.0],
            sample_period: 5e-3,
            signal: CellSignal::Sine {
                phase: FRAC_PI_2,
                raised: false,
            },
            transient_periods: DEFAULT_TRANSIENT_PERIODS,
        }
    }

    pub fn cell_signal(&self, frequency: f64, amplitude: f64) -> SignalSpec {
        match self.signal {
            CellSignal::Offset { swing } => SignalSpec::sine(swing, frequency, 0.0, amplitude),
            CellSignal::Sine { phase, raised } => {
                let offset = if raised { amplitude } else { 0.0 };
                SignalSpec::sine(amplitude, frequency, phase, offset)
            }
        }
    }

    /// `(frequency, amplitude)` pairs, frequency-major.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.frequencies
            .iter()
            .flat_map(move |&f| self.amplitudes.iter().map(move |&a| (f, a)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationCell {
    pub frequency: f64,
    pub amplitude: f64,
    /// NaN when the cell failed.
    pub mape: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompensationCell {
    pub frequency: f64,
    pub amplitude: f64,
    /// NaN when the cell failed.
    pub mape_comp: f64,
    pub mape_uncomp: f64,
    pub hold_rate: f64,
}

pub fn validation_table(
    model: &NarxModel,
    plant: &dyn Plant,
    grid: &TableGrid,
) -> Vec<ValidationCell> {
    grid.cells()
        .map(|(f, a)| ValidationCell {
            frequency: f,
            amplitude: a,
            mape: validation_mape(
                model,
                plant,
                &grid.cell_signal(f, a),
                grid.sample_period,
                grid.transient_periods,
            )
            .unwrap_or(f64::NAN),
        })
        .collect()
}

pub fn compensation_table(
    model: &NarxModel,
    plant: &dyn Plant,
    grid: &TableGrid,
    init: &Initialization,
) -> Vec<CompensationCell> {
    grid.cells()
        .map(|(f, a)| {
            let spec = grid.cell_signal(f, a);
            match compensation_run(
                model,
                plant,
                &spec,
                grid.sample_period,
                grid.transient_periods,
                init,
            ) {
                Ok(rep) => CompensationCell {
                    frequency: f,
                    amplitude: a,
                    mape_comp: rep.mape_comp,
                    mape_uncomp: rep.mape_uncomp,
                    hold_rate: rep.hold_rate,
                },
                Err(_) => CompensationCell {
                    frequency: f,
                    amplitude: a,
                    mape_comp: f64::NAN,
                    mape_uncomp: f64::NAN,
                    hold_rate: f64::NAN,
                },
            }
        })
        .collect()
}
