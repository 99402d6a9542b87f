//! Metrics, table-style experiments and Monte Carlo robustness bands.

mod metrics;
mod monte_carlo;
mod tables;

pub use metrics::{effort, mape, Effort};
pub use monte_carlo::{
    aggregate, monte_carlo, perturbed_model, run_once, Experiment, MonteCarloBand,
    MonteCarloConfig, StaticSweep, TrackingRun,
};
pub use tables::{
    compensation_report, compensation_run, compensation_table, score_run, validation_mape,
    validation_table, CellSignal, CompensationCell, ExperimentReport, ReportRow, RunLayout,
    TableGrid, ValidationCell, DEFAULT_TRANSIENT_PERIODS, SCORED_PERIODS,
};
