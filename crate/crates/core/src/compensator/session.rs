use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::dynamic::{dynamic_comp_poly, hysteresis_comp_polys, past_inputs_needed, StepWindow};
use super::select::{admissible_roots, closest, Selection, BOUND_SNAP};
use crate::error::{Error, Result};
use crate::narx::{Interval, NarxModel, Regime};
use crate::poly::{solve_roots, Polynomial};

/// What happened at one compensation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    /// Applied input `m(k)`.
    pub input: f64,
    /// No admissible root; the previous input was repeated.
    pub held: bool,
    /// Branch the chosen root came from (hysteretic models only).
    pub regime: Option<Regime>,
    /// `|p(m)| / (1 + max |c_j|)` for the polynomial the root solves; zero on hold.
    pub residual: f64,
}

/// Result of compensating a whole reference series.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CompensationRun {
    pub inputs: Vec<f64>,
    /// Steps at which the previous input was held.
    pub holds: Vec<usize>,
    pub regimes: Vec<Option<Regime>>,
    /// Largest per-step relative residual.
    pub max_residual: f64,
}

impl CompensationRun {
    pub fn hold_rate(&self) -> f64 {
        if self.inputs.is_empty() {
            0.0
        } else {
            self.holds.len() as f64 / self.inputs.len() as f64
        }
    }
}

/// Rolling state of a compensator: past applied inputs and the last branch.
#[derive(Debug, Clone)]
pub struct CompensationSession<'m> {
    model: &'m NarxModel,
    bounds: Interval,
    /// `m(k-1), m(k-2), ...`
    past_inputs: VecDeque<f64>,
    depth: usize,
    last_regime: Option<Regime>,
}

impl<'m> CompensationSession<'m> {
    /// Past inputs kept by a session; at least one, for the hold fallback.
    pub fn history_depth(model: &NarxModel) -> usize {
        past_inputs_needed(model).max(1)
    }

    /// `seed` is `m(-1), m(-2), ...`; a short seed repeats its last value.
    pub fn new(model: &'m NarxModel, seed: &[f64]) -> Result<Self> {
        model.validate().map_err(Error::InvalidModel)?;
        let Some(&oldest) = seed.last() else {
            return Err(Error::InvalidArgument {
                name: "seed",
                reason: "needs at least one past input",
            });
        };
        let bounds = model.input_range;
        let slack = BOUND_SNAP * bounds.span();
        if seed
            .iter()
            .any(|&m| !(m >= bounds.lo - slack && m <= bounds.hi + slack))
        {
            return Err(Error::InvalidArgument {
                name: "seed",
                reason: "outside the input range",
            });
        }
        let depth = Self::history_depth(model);
        let past_inputs = seed
            .iter()
            .copied()
            .chain(core::iter::repeat(oldest))
            .take(depth)
            .map(|m| m.clamp(bounds.lo, bounds.hi))
            .collect();
        Ok(Self {
            model,
            bounds,
            past_inputs,
            depth,
            last_regime: None,
        })
    }

    pub fn model(&self) -> &NarxModel {
        self.model
    }

    /// `m(k-1), m(k-2), ...`
    pub fn past_inputs(&self) -> impl Iterator<Item = f64> + '_ {
        self.past_inputs.iter().copied()
    }

    pub fn last_regime(&self) -> Option<Regime> {
        self.last_regime
    }

    /// Reference samples a step needs: `r(k+d), r(k+d-1), ...`.
    pub fn reference_depth(&self) -> usize {
        self.model.output_depth() + 1
    }

    /// Computes and records `m(k)` given `r(k+d), r(k+d-1), ...`.
    pub fn step(&mut self, reference: &[f64]) -> Result<StepOutcome> {
        let previous = self.past_inputs[0];
        let window = StepWindow {
            reference,
            past_inputs: self.past_inputs.make_contiguous(),
        };
        let (selection, poly, regime) = if self.model.is_hysteretic() {
            let branches = hysteresis_comp_polys(self.model, &window)?;
            let mut pooled: Vec<(f64, Regime)> = Vec::new();
            for regime in [Regime::Loading, Regime::Unloading] {
                let p = branches.branch(regime);
                for x in roots_of(p, previous, self.bounds, Some(regime))? {
                    pooled.push((x, regime));
                }
            }
            match closest(pooled.iter().map(|&(x, _)| x), previous) {
                Selection::Root(x) => {
                    let regime = pooled.iter().find(|&&(y, _)| y == x).map(|&(_, r)| r);
                    let poly = branches.branch(regime.expect("root is pooled")).clone();
                    (Selection::Root(x), Some(poly), regime)
                }
                Selection::Hold => (Selection::Hold, None, None),
            }
        } else {
            let p = dynamic_comp_poly(self.model, &window)?;
            let selection = closest(roots_of(&p, previous, self.bounds, None)?, previous);
            (selection, Some(p), None)
        };

        let outcome = match selection {
            Selection::Root(x) => {
                let p = poly.expect("a root comes with its polynomial");
                StepOutcome {
                    input: x,
                    held: false,
                    regime,
                    residual: p.eval(x).abs() / (1.0 + p.max_abs_coeff()),
                }
            }
            Selection::Hold => StepOutcome {
                input: previous,
                held: true,
                regime: None,
                residual: 0.0,
            },
        };
        if outcome.regime.is_some() {
            self.last_regime = outcome.regime;
        }
        self.past_inputs.push_front(outcome.input);
        self.past_inputs.truncate(self.depth);
        Ok(outcome)
    }

    /// Compensates a whole series: `m(k)` targets `r(k+d)`. Before the start
    /// the reference is taken as `r(0)`, past the end as its last value.
    pub fn run(&mut self, reference: &[f64]) -> Result<CompensationRun> {
        let n = reference.len();
        let d = self.model.delay as isize;
        let depth = self.reference_depth();
        let mut out = CompensationRun {
            inputs: Vec::with_capacity(n),
            ..Default::default()
        };
        let mut window = vec![0.0; depth];
        for k in 0..n {
            for (i, w) in window.iter_mut().enumerate() {
                let idx = (k as isize + d - i as isize).clamp(0, n as isize - 1);
                *w = reference[idx as usize];
            }
            let step = self.step(&window)?;
            if step.held {
                out.holds.push(k);
            }
            out.max_residual = out.max_residual.max(step.residual);
            out.regimes.push(step.regime);
            out.inputs.push(step.input);
        }
        Ok(out)
    }
}

/// Admissible real roots, treating a vanishing polynomial as satisfied by
/// any input (the previous one is kept).
fn roots_of(
    p: &Polynomial,
    previous: f64,
    bounds: Interval,
    branch: Option<Regime>,
) -> Result<Vec<f64>> {
    match p.degree() {
        None | Some(0) => Ok(Vec::new()),
        Some(_) => Ok(admissible_roots(&solve_roots(p)?, previous, bounds, branch)),
    }
}
