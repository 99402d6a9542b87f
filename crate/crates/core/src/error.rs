use alloc::vec::Vec;

use thiserror::Error;

use crate::narx::Violation;
use crate::poly::RootSet;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expected a polynomial of degree {expected}, got degree {}", fmt_degree(*.found))]
    DegreeMismatch {
        expected: &'static str,
        found: Option<usize>,
    },
    #[error("root iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize, best: RootSet },
    #[error("{signal} history holds {got} samples, {needed} needed")]
    InsufficientHistory {
        signal: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("response did not become periodic within {periods} periods")]
    NotPeriodic { periods: usize },
    #[error("non-finite value at sample {step}")]
    NonFinite { step: usize },
    #[error("invalid model: {} violation(s)", .0.len())]
    InvalidModel(Vec<Violation>),
    #[error("operation needs a {expected} model")]
    ModelClass { expected: &'static str },
    #[error("static polynomial vanishes identically at u = {u_bar}")]
    DegenerateStatics { u_bar: f64 },
    #[error("no stable fixed point inside the output range at u = {u_bar}")]
    NoStableFixedPoint { u_bar: f64 },
    #[error("target {target} is outside the loop's output span [{lo}, {hi}]")]
    OutOfLoopRange { target: f64, lo: f64, hi: f64 },
    #[error("compensation polynomial vanishes identically")]
    IdenticallyZero,
    #[error("no feasible compensation root for reference {reference}")]
    NoFeasibleRoot { reference: f64 },
    #[error(
        "a factor with lag {lag} needs an input later than the current sample (delay {delay})"
    )]
    UnknownFutureInput { lag: u32, delay: u32 },
    #[error("series lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("target series has zero range")]
    DegenerateRange,
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument {
        name: &'static str,
        reason: &'static str,
    },
}

fn fmt_degree(found: Option<usize>) -> i64 {
    found.map_or(-1, |d| d as i64)
}
