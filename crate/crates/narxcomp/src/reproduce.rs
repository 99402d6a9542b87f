//! Regeneration of the heater and Bouc–Wen tables and the held-input run.

use std::path::Path;

use narxcomp_core::compensator::{compensate, Initialization};
use narxcomp_core::eval::{
    compensation_table, validation_table, CompensationCell, TableGrid, ValidationCell,
};
use narxcomp_core::narx::{simulate_free_run, LoopExcitation};
use narxcomp_core::plant::{BoucWen, BoucWenParams, HeaterParams, SignalSpec, Waveform};

use crate::csv::Table;
use crate::error::{AppError, AppResult};
use crate::model_file::{load_model, LoadedModel};

/// Loop used to seed the Bouc–Wen compensators: `50 sin(2 pi 0.2 t)`.
pub const BOUC_WEN_LOOP: LoopExcitation = LoopExcitation {
    amplitude: 50.0,
    frequency: 0.2,
    center: 0.0,
    sample_period: 5e-3,
};

/// Sample at which the held-input run freezes its sine.
pub const HOLD_AT: usize = 920;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Table1,
    Table3,
    TableBwModel,
    TableBwComp,
    Fig8,
}

impl Target {
    pub const ALL: [Target; 5] = [
        Target::Table1,
        Target::Table3,
        Target::TableBwModel,
        Target::TableBwComp,
        Target::Fig8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::Table1 => "table1",
            Target::Table3 => "table3",
            Target::TableBwModel => "table-bw-model",
            Target::TableBwComp => "table-bw-comp",
            Target::Fig8 => "fig8",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }
}

/// Bouc–Wen plant sampled at the model's period.
pub fn bouc_wen_plant(model: &LoadedModel) -> BoucWen {
    BoucWen::new(BoucWenParams {
        step: model.sample_period,
        ..BoucWenParams::PIEZO
    })
}

fn grid_at(mut grid: TableGrid, model: &LoadedModel) -> TableGrid {
    grid.sample_period = model.sample_period;
    grid
}

pub fn heater_validation(heater: &LoadedModel) -> Vec<ValidationCell> {
    let grid = grid_at(TableGrid::heater_validation(), heater);
    validation_table(&heater.model, &HeaterParams::BENCHMARK, &grid)
}

pub fn heater_compensation(heater: &LoadedModel) -> Vec<CompensationCell> {
    let grid = grid_at(TableGrid::heater_compensation(), heater);
    compensation_table(
        &heater.model,
        &HeaterParams::BENCHMARK,
        &grid,
        &Initialization::Static,
    )
}

pub fn bouc_wen_validation(bw: &LoadedModel) -> Vec<ValidationCell> {
    let grid = grid_at(TableGrid::bouc_wen_validation(), bw);
    validation_table(&bw.model, &bouc_wen_plant(bw), &grid)
}

pub fn bouc_wen_compensation(bw: &LoadedModel) -> Vec<CompensationCell> {
    let grid = grid_at(TableGrid::bouc_wen_compensation(), bw);
    let exc = LoopExcitation {
        sample_period: bw.sample_period,
        ..BOUC_WEN_LOOP
    };
    compensation_table(
        &bw.model,
        &bouc_wen_plant(bw),
        &grid,
        &Initialization::Loop(exc),
    )
}

pub fn validation_csv(cells: &[ValidationCell]) -> Table {
    let mut t = Table::new(&["f", "amplitude", "mape_model"]);
    for c in cells {
        t.push(&[c.frequency, c.amplitude, c.mape]);
    }
    t
}

pub fn compensation_csv(cells: &[CompensationCell]) -> Table {
    let mut t = Table::new(&["f", "amplitude", "mape_comp", "mape_uncomp"]);
    for c in cells {
        t.push(&[c.frequency, c.amplitude, c.mape_comp, c.mape_uncomp]);
    }
    t
}

/// `30 sin(2 pi 2 t)` frozen from sample 920.
pub fn held_sine() -> SignalSpec {
    SignalSpec {
        waveform: Waveform::SineThenHold { hold_at: HOLD_AT },
        ..SignalSpec::sine(30.0, 2.0, 0.0, 0.0)
    }
}

/// Plant and both models under the held sine, then both compensators on the
/// same signal used as the reference.
pub fn held_input_run(bw: &LoadedModel, bw_cns: &LoadedModel, len: usize) -> AppResult<Table> {
    let ts = bw.sample_period;
    let u = held_sine().generate(len, ts);
    let plant = bouc_wen_plant(bw);
    let y_plant = plant.simulate(&u);
    let free =
        |m: &LoadedModel| simulate_free_run(&m.model, &u, &vec![0.0; m.model.output_depth()]);
    let (y_model, y_cns) = (free(bw)?, free(bw_cns)?);
    let init = Initialization::Loop(LoopExcitation {
        sample_period: ts,
        ..BOUC_WEN_LOOP
    });
    let m_model = compensate(&bw.model, &u, &init)?.inputs;
    let m_cns = compensate(&bw_cns.model, &u, &init)?.inputs;
    let (yc_model, yc_cns) = (plant.simulate(&m_model), plant.simulate(&m_cns));
    let mut t = Table::new(&[
        "k", "u", "y_plant", "y_model", "y_cns", "m_model", "m_cns", "yc_model", "yc_cns",
    ]);
    for k in 0..len {
        t.push_indexed(
            k,
            &[
                u[k],
                y_plant[k],
                y_model[k],
                y_cns[k],
                m_model[k],
                m_cns[k],
                yc_model[k],
                yc_cns[k],
            ],
        );
    }
    Ok(t)
}

/// Builds `target` from the model files in `models_dir`.
pub fn reproduce(target: Target, models_dir: &Path, len: usize) -> AppResult<Table> {
    let load = |name: &str| load_model(&models_dir.join(name));
    let fail_on_nan = |bad: bool| {
        if bad {
            Err(AppError::Numeric(narxcomp_core::Error::NonFinite {
                step: 0,
            }))
        } else {
            Ok(())
        }
    };
    match target {
        Target::Table1 => {
            let cells = heater_validation(&load("heater.json")?);
            fail_on_nan(cells.iter().all(|c| c.mape.is_nan()))?;
            Ok(validation_csv(&cells))
        }
        Target::Table3 => {
            let cells = heater_compensation(&load("heater.json")?);
            fail_on_nan(cells.iter().all(|c| c.mape_comp.is_nan()))?;
            Ok(compensation_csv(&cells))
        }
        Target::TableBwModel => {
            let cells = bouc_wen_validation(&load("bw.json")?);
            fail_on_nan(cells.iter().all(|c| c.mape.is_nan()))?;
            Ok(validation_csv(&cells))
        }
        Target::TableBwComp => {
            let cells = bouc_wen_compensation(&load("bw.json")?);
            fail_on_nan(cells.iter().all(|c| c.mape_comp.is_nan()))?;
            Ok(compensation_csv(&cells))
        }
        Target::Fig8 => held_input_run(&load("bw.json")?, &load("bw_cns.json")?, len),
    }
}
