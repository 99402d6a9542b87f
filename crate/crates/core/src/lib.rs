//! NARX polynomial models and per-step algebraic compensation.
//!
//! A compensator inverts an identified NARX polynomial model one sample at a
//! time: the model equation, with the output replaced by the reference, is a
//! polynomial in the unknown input, and a feasible root of that polynomial is
//! the input applied to the plant.
//!
//! The crate is `no_std` and only needs `alloc`.
//!
//! Module overview:
//! - [`poly`]: dense real polynomials and their roots (closed form up to
//!   cubic, Aberth iteration beyond).
//! - [`narx`]: model representation, simulation, fixed points, hysteresis loops.
//! - [`compensator`]: static, dynamic and hysteretic compensators.
//! - [`plant`]: reference plants (Hammerstein heater, Bouc–Wen) and signals.
//! - [`eval`]: MAPE, compensation effort, Monte Carlo and table experiments.

#![no_std]
#![forbid(unsafe_code)]
// Negated comparisons reject NaN along with the ordinary failure case.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod compensator;
pub mod error;
pub mod eval;
pub mod narx;
pub mod plant;
pub mod poly;

pub use error::{Error, Result};
