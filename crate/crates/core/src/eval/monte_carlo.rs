//! Robustness bands under random parameter perturbations.
//!
//! Run `i` perturbs every coefficient with its own ChaCha8 stream, so a run's
//! outcome does not depend on how runs are scheduled.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::compensator::{compensate, solve_static, Initialization};
use crate::error::{Error, Result};
use crate::narx::NarxModel;
use crate::plant::Plant;

/// A repeatable experiment run once per perturbed model.
pub trait Experiment {
    /// Points at which the experiment reports a value.
    fn grid(&self) -> Vec<f64>;

    /// One value per grid point, obtained with `model` as the compensator's model.
    fn run(&self, model: &NarxModel) -> Result<Vec<f64>>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloConfig {
    /// Standard deviation of each perturbation relative to `|theta|`.
    pub rel_std: f64,
    pub runs: usize,
    pub seed: u64,
}

impl MonteCarloConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.rel_std >= 0.0 && self.rel_std.is_finite()) {
            return Err(Error::InvalidArgument {
                name: "rel_std",
                reason: "must be finite and non-negative",
            });
        }
        if self.runs == 0 {
            return Err(Error::InvalidArgument {
                name: "runs",
                reason: "must be at least one",
            });
        }
        Ok(())
    }
}

/// `theta + rel_std |theta| z` with `z` standard normal, drawn from stream
/// `run` of the generator seeded with `seed`.
pub fn perturbed_model(model: &NarxModel, rel_std: f64, seed: u64, run: u64) -> NarxModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    let theta: Vec<f64> = model
        .coefficients()
        .into_iter()
        .map(|c| {
            let z: f64 = rng.sample(StandardNormal);
            c + rel_std * c.abs() * z
        })
        .collect();
    model.with_coefficients(&theta)
}

/// Outcome of run `run`: the experiment on the perturbed model.
pub fn run_once<E: Experiment + ?Sized>(
    model: &NarxModel,
    experiment: &E,
    config: &MonteCarloConfig,
    run: u64,
) -> Result<Vec<f64>> {
    experiment.run(&perturbed_model(model, config.rel_std, config.seed, run))
}

/// Pointwise mean and standard deviation across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloBand {
    pub grid: Vec<f64>,
    pub mean: Vec<f64>,
    /// Population standard deviation.
    pub std_dev: Vec<f64>,
    pub runs_used: usize,
    /// Runs that failed or produced non-finite values.
    pub runs_skipped: usize,
}

impl MonteCarloBand {
    /// `mean - 2 std`.
    pub fn lower(&self) -> Vec<f64> {
        self.mean
            .iter()
            .zip(&self.std_dev)
            .map(|(m, s)| m - 2.0 * s)
            .collect()
    }

    /// `mean + 2 std`.
    pub fn upper(&self) -> Vec<f64> {
        self.mean
            .iter()
            .zip(&self.std_dev)
            .map(|(m, s)| m + 2.0 * s)
            .collect()
    }

    pub fn skip_rate(&self) -> f64 {
        let total = self.runs_used + self.runs_skipped;
        if total == 0 {
            0.0
        } else {
            self.runs_skipped as f64 / total as f64
        }
    }

    /// Fraction of grid points where `targets` lies inside `mean ± 2 std`.
    pub fn coverage(&self, targets: &[f64]) -> f64 {
        if self.grid.is_empty() {
            return 0.0;
        }
        let (lo, hi) = (self.lower(), self.upper());
        let inside = targets
            .iter()
            .zip(lo.iter().zip(&hi))
            .filter(|(t, (l, h))| *l <= *t && *t <= *h)
            .count();
        inside as f64 / self.grid.len() as f64
    }
}

/// Reduces outcomes in the order given with Welford's update, so identical
/// runs give exactly zero spread. With no usable run the band is NaN.
pub fn aggregate<I>(grid: Vec<f64>, outcomes: I) -> MonteCarloBand
where
    I: IntoIterator<Item = Result<Vec<f64>>>,
{
    let n = grid.len();
    let mut mean = vec![0.0; n];
    let mut sq_dev = vec![0.0; n];
    let (mut used, mut skipped) = (0usize, 0usize);
    for outcome in outcomes {
        match outcome {
            Ok(v) if v.len() == n && v.iter().all(|x| x.is_finite()) => {
                used += 1;
                for ((m, s), x) in mean.iter_mut().zip(&mut sq_dev).zip(&v) {
                    let delta = x - *m;
                    *m += delta / used as f64;
                    *s += delta * (x - *m);
                }
            }
            _ => skipped += 1,
        }
    }
    let std_dev = if used == 0 {
        mean.fill(f64::NAN);
        vec![f64::NAN; n]
    } else {
        sq_dev
            .into_iter()
            .map(|s| (s / used as f64).sqrt())
            .collect()
    };
    MonteCarloBand {
        grid,
        mean,
        std_dev,
        runs_used: used,
        runs_skipped: skipped,
    }
}

/// Runs every perturbation in sequence.
pub fn monte_carlo<E: Experiment + ?Sized>(
    model: &NarxModel,
    experiment: &E,
    config: &MonteCarloConfig,
) -> Result<MonteCarloBand> {
    config.check()?;
    let outcomes = (0..config.runs as u64).map(|run| run_once(model, experiment, config, run));
    Ok(aggregate(experiment.grid(), outcomes))
}

/// Static compensation of each constant reference in `grid`; reports the
/// plant output after `settle` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticSweep<P> {
    pub plant: P,
    pub grid: Vec<f64>,
    pub settle: usize,
}

impl<P: Plant> Experiment for StaticSweep<P> {
    fn grid(&self) -> Vec<f64> {
        self.grid.clone()
    }

    fn run(&self, model: &NarxModel) -> Result<Vec<f64>> {
        let mut input = vec![0.0; self.settle.max(1)];
        self.grid
            .iter()
            .map(|&r| {
                let m = solve_static(model, r)?;
                input.fill(m);
                let y = self.plant.respond(&input)?;
                Ok(y[y.len() - 1])
            })
            .collect()
    }
}

/// Dynamic compensation of `reference`; reports the plant output over `window`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackingRun<P> {
    pub plant: P,
    pub reference: Vec<f64>,
    pub init: Initialization,
    pub window: Range<usize>,
}

impl<P: Plant> Experiment for TrackingRun<P> {
    fn grid(&self) -> Vec<f64> {
        self.window.clone().map(|k| k as f64).collect()
    }

    fn run(&self, model: &NarxModel) -> Result<Vec<f64>> {
        let run = compensate(model, &self.reference, &self.init)?;
        let y = self.plant.respond(&run.inputs)?;
        y.get(self.window.clone())
            .map(<[f64]>::to_vec)
            .ok_or(Error::InvalidArgument {
                name: "window",
                reason: "extends past the reference",
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::narx::fixtures::*;
    use crate::plant::{HeaterParams, ModelPlant};
    use approx::assert_abs_diff_eq;

    fn sweep() -> StaticSweep<HeaterParams> {
        StaticSweep {
            plant: HeaterParams::BENCHMARK,
            grid: vec![0.05, 0.1, 0.2, 0.3],
            settle: 300,
        }
    }

    #[test]
    fn zero_spread_gives_nominal_run() {
        let cfg = MonteCarloConfig {
            rel_std: 0.0,
            runs: 5,
            seed: 1,
        };
        let band = monte_carlo(&heater(), &sweep(), &cfg).unwrap();
        let nominal = sweep().run(&heater()).unwrap();
        assert_eq!(band.mean, nominal);
        assert!(band.std_dev.iter().all(|&s| s == 0.0));
        assert_eq!(band.runs_used, 5);
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let cfg = MonteCarloConfig {
            rel_std: 0.01,
            runs: 20,
            seed: 7,
        };
        let a = monte_carlo(&heater(), &sweep(), &cfg).unwrap();
        let b = monte_carlo(&heater(), &sweep(), &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.std_dev.iter().all(|&s| s > 0.0));
        let other = monte_carlo(&heater(), &sweep(), &MonteCarloConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a.mean, other.mean);
    }

    #[test]
    fn streams_differ_per_run() {
        let a = perturbed_model(&heater(), 0.1, 3, 0).coefficients();
        let b = perturbed_model(&heater(), 0.1, 3, 1).coefficients();
        assert_ne!(a, b);
        assert_eq!(a, perturbed_model(&heater(), 0.1, 3, 0).coefficients());
    }

    #[test]
    fn failures_are_counted_not_averaged() {
        let outcomes = vec![
            Ok(vec![1.0, 2.0]),
            Err(Error::DegenerateRange),
            Ok(vec![3.0, f64::NAN]),
            Ok(vec![3.0, 4.0]),
        ];
        let band = aggregate(vec![0.0, 1.0], outcomes);
        assert_eq!((band.runs_used, band.runs_skipped), (2, 2));
        assert_eq!(band.mean, vec![2.0, 3.0]);
        assert_eq!(band.std_dev, vec![1.0, 1.0]);
        assert_eq!(band.lower(), vec![0.0, 1.0]);
        assert_abs_diff_eq!(band.skip_rate(), 0.5);
        let empty = aggregate(vec![0.0], vec![Err(Error::DegenerateRange)]);
        assert!(empty.mean[0].is_nan() && empty.std_dev[0].is_nan());
        assert_eq!(band.coverage(&[2.0, 10.0]), 0.5);
    }

    #[test]
    fn tracking_the_model_itself() {
        let model = heater();
        let r: Vec<f64> = (0..200)
            .map(|k| 0.2 + 0.1 * (k as f64 * 0.05).sin())
            .collect();
        let seed = crate::compensator::init_dynamic(&model, r[0]).unwrap()[0];
        let plant = ModelPlant {
            model: model.clone(),
            y_init: vec![r[0]; 2],
            u_init: vec![seed; 2],
        };
        let exp = TrackingRun {
            plant,
            reference: r.clone(),
            init: Initialization::Static,
            window: 150..200,
        };
        let y = exp.run(&model).unwrap();
        // The plant's first outputs differ from the reference; that gap decays
        // with the model's own pole.
        for (a, b) in y.iter().zip(&r[150..]) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
        assert!(monte_carlo(
            &model,
            &exp,
            &MonteCarloConfig {
                rel_std: 0.0,
                runs: 0,
                seed: 0
            }
        )
        .is_err());
    }
}
