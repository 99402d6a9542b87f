//! Compensators that invert a NARX model sample by sample.
//!
//! Each step builds the model equation as a polynomial in the unknown input
//! (for hysteretic models, one polynomial per branch) and picks the real
//! root inside the input range that is closest to the previous input. With
//! no admissible root the previous input is held.

mod dynamic;
mod select;
mod session;
mod statics;

use alloc::vec;
use alloc::vec::Vec;

pub use dynamic::{
    dynamic_comp_poly, hysteresis_comp_polys, past_inputs_needed, step_residual, BranchPolynomials,
    StepWindow,
};
pub use select::{admissible_roots, closest, select_root, Selection, BOUND_SNAP};
pub use session::{CompensationRun, CompensationSession, StepOutcome};
pub use statics::{solve_static, static_comp_poly, static_run};

use crate::error::{Error, Result};
use crate::narx::{
    hysteresis_loop, loop_inverse, HysteresisLoop, LoopExcitation, NarxModel, Regime,
};

/// Seed for a non-hysteretic compensator: the static inverse of the first
/// reference value in every past-input slot.
pub fn init_dynamic(model: &NarxModel, r_start: f64) -> Result<Vec<f64>> {
    let m = solve_static(model, r_start)?;
    Ok(vec![m; CompensationSession::history_depth(model)])
}

/// Seed for a hysteretic compensator from a simulated loop: the branch
/// follows the initial reference slope (rising or flat means loading), and
/// the seed is that branch's inverse at `r1`.
pub fn init_hysteresis(
    model: &NarxModel,
    lp: &HysteresisLoop,
    r0: f64,
    r1: f64,
) -> Result<(Vec<f64>, Regime)> {
    let regime = if r1 >= r0 {
        Regime::Loading
    } else {
        Regime::Unloading
    };
    let m = loop_inverse(lp, r1, regime)?;
    Ok((vec![m; CompensationSession::history_depth(model)], regime))
}

/// How the compensator history is seeded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Initialization {
    /// Static inverse of the first reference value.
    Static,
    /// Inverse of a simulated hysteresis loop.
    Loop(LoopExcitation),
    /// A fixed input in every slot.
    Constant(f64),
}

/// Seeds a session per `init` and compensates `reference`.
pub fn compensate(
    model: &NarxModel,
    reference: &[f64],
    init: &Initialization,
) -> Result<CompensationRun> {
    if reference.is_empty() {
        return Ok(CompensationRun::default());
    }
    let seed = initial_inputs(model, reference, init)?;
    CompensationSession::new(model, &seed)?.run(reference)
}

/// The past inputs `compensate` seeds its session with.
pub fn initial_inputs(
    model: &NarxModel,
    reference: &[f64],
    init: &Initialization,
) -> Result<Vec<f64>> {
    let Some(&r_first) = reference.first() else {
        return Err(Error::InsufficientHistory {
            signal: "reference",
            needed: 1,
            got: 0,
        });
    };
    Ok(match init {
        Initialization::Static => init_dynamic(model, r_first)?,
        Initialization::Loop(exc) => {
            let lp = hysteresis_loop(model, exc)?;
            let d = model.delay as usize;
            let at = |k: usize| reference[k.min(reference.len() - 1)];
            init_hysteresis(model, &lp, at(d - 1), at(d))?.0
        }
        Initialization::Constant(m) => vec![*m; CompensationSession::history_depth(model)],
    })
}
