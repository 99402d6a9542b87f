//! Monte Carlo across a rayon pool.

use narxcomp_core::eval::{aggregate, run_once, Experiment, MonteCarloBand, MonteCarloConfig};
use narxcomp_core::narx::NarxModel;
use rayon::prelude::*;

use crate::error::{AppError, AppResult};

/// Environment variable that caps the Monte Carlo worker count.
pub const THREADS_VAR: &str = "NARX_COMP_THREADS";

/// Worker cap from the environment; `None` lets rayon decide.
pub fn thread_cap() -> AppResult<Option<usize>> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) | Err(_) => Err(AppError::config(format!(
                "{THREADS_VAR}: expected a positive integer, found `{v}`"
            ))),
            Ok(n) => Ok(Some(n)),
        },
        Err(_) => Ok(None),
    }
}

/// Same result as [`narxcomp_core::eval::monte_carlo`], bit for bit: runs
/// use their own random streams and are reduced in run order.
pub fn monte_carlo_parallel<E>(
    model: &NarxModel,
    experiment: &E,
    config: &MonteCarloConfig,
    threads: Option<usize>,
) -> AppResult<MonteCarloBand>
where
    E: Experiment + Sync + ?Sized,
{
    config.check()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| AppError::config(format!("{THREADS_VAR}: {e}")))?;
    let outcomes: Vec<_> = pool.install(|| {
        (0..config.runs as u64)
            .into_par_iter()
            .map(|run| run_once(model, experiment, config, run))
            .collect()
    });
    Ok(aggregate(experiment.grid(), outcomes))
}
