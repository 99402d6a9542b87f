use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::NarxModel;
use crate::error::{Error, Result};

/// One model step. `y_hist[i - 1]` is `y(k - i)` and `u_hist[j - 1]` is
/// `u(k - j)`, most recent first.
pub fn one_step(model: &NarxModel, y_hist: &[f64], u_hist: &[f64]) -> Result<f64> {
    check_history(model, y_hist.len(), u_hist.len())?;
    Ok(model.eval_with(
        |lag| y_hist[lag as usize - 1],
        |lag| u_hist[lag as usize - 1],
    ))
}

fn check_history(model: &NarxModel, y_len: usize, u_len: usize) -> Result<()> {
    let needed = model.output_depth();
    if y_len < needed {
        return Err(Error::InsufficientHistory {
            signal: "output",
            needed,
            got: y_len,
        });
    }
    let needed = model.input_depth();
    if u_len < needed {
        return Err(Error::InsufficientHistory {
            signal: "input",
            needed,
            got: u_len,
        });
    }
    Ok(())
}

/// Stepwise free-run simulator that owns its history.
#[derive(Debug, Clone)]
pub struct FreeRun<'m> {
    model: &'m NarxModel,
    /// `y(k-1), y(k-2), ...`
    y_hist: VecDeque<f64>,
    /// `u(k-1), u(k-2), ...`
    u_hist: VecDeque<f64>,
    y_depth: usize,
    u_depth: usize,
    step: usize,
}

impl<'m> FreeRun<'m> {
    /// Histories are most recent first; longer histories are truncated.
    pub fn new(model: &'m NarxModel, y_init: &[f64], u_init: &[f64]) -> Result<Self> {
        check_history(model, y_init.len(), u_init.len())?;
        let y_depth = model.output_depth();
        let u_depth = model.input_depth();
        Ok(Self {
            model,
            y_hist: y_init[..y_depth].iter().copied().collect(),
            u_hist: u_init[..u_depth].iter().copied().collect(),
            y_depth,
            u_depth,
            step: 0,
        })
    }

    /// Emits `y(k)` and then records `u(k)` for later steps.
    pub fn step(&mut self, u: f64) -> Result<f64> {
        let y = self.peek();
        if !y.is_finite() {
            return Err(Error::NonFinite { step: self.step });
        }
        push_front(&mut self.y_hist, y, self.y_depth);
        push_front(&mut self.u_hist, u, self.u_depth);
        self.step += 1;
        Ok(y)
    }

    /// `y(k)` from the current history, without advancing.
    pub fn peek(&self) -> f64 {
        self.model.eval_with(
            |lag| self.y_hist[lag as usize - 1],
            |lag| self.u_hist[lag as usize - 1],
        )
    }
}

fn push_front(buf: &mut VecDeque<f64>, x: f64, depth: usize) {
    if depth == 0 {
        return;
    }
    if buf.len() == depth {
        buf.pop_back();
    }
    buf.push_front(x);
}

/// Free-run simulation with the input at rest at `u[0]` before the start.
/// `y_init` is most recent first.
pub fn simulate_free_run(model: &NarxModel, u: &[f64], y_init: &[f64]) -> Result<Vec<f64>> {
    let Some(&u0) = u.first() else {
        return Ok(Vec::new());
    };
    simulate_with_history(model, u, y_init, &vec![u0; model.input_depth()])
}

/// Free-run simulation from explicit histories (most recent first).
pub fn simulate_with_history(
    model: &NarxModel,
    u: &[f64],
    y_init: &[f64],
    u_init: &[f64],
) -> Result<Vec<f64>> {
    let mut sim = FreeRun::new(model, y_init, u_init)?;
    u.iter().map(|&uk| sim.step(uk)).collect()
}
