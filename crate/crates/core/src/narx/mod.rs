//! Polynomial NARX models: representation, simulation and steady-state analysis.
//!
//! A model is a sum of terms, each a coefficient times a product of lagged
//! signal factors. Besides the output `y` and input `u`, hysteretic models use
//! the input increment `u(k) - u(k-1)` and its sign.

mod hysteresis;
mod simulate;
mod statics;

use alloc::vec::Vec;
use core::fmt;

pub use hysteresis::{hysteresis_loop, loop_inverse, HysteresisLoop, LoopExcitation};
pub use simulate::{one_step, simulate_free_run, simulate_with_history, FreeRun};
pub use statics::{
    fixed_points, fixed_points_on_branch, jacobian_eigen, static_curve, static_polynomial,
    FixedPoint,
};

/// The signal a factor reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Signal {
    Output,
    Input,
    /// `u(k) - u(k-1)`.
    InputIncrement,
    /// Sign of the input increment, with `sign(0) = 0`.
    IncrementSign,
}

impl Signal {
    pub fn is_increment(self) -> bool {
        matches!(self, Signal::InputIncrement | Signal::IncrementSign)
    }
}

/// `signal(k - lag)^power`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Factor {
    pub signal: Signal,
    pub lag: u32,
    pub power: u32,
}

impl Factor {
    pub const fn new(signal: Signal, lag: u32, power: u32) -> Self {
        Self { signal, lag, power }
    }

    pub const fn output(lag: u32) -> Self {
        Self::new(Signal::Output, lag, 1)
    }

    pub const fn input(lag: u32) -> Self {
        Self::new(Signal::Input, lag, 1)
    }

    pub const fn increment(lag: u32) -> Self {
        Self::new(Signal::InputIncrement, lag, 1)
    }

    pub const fn increment_sign(lag: u32) -> Self {
        Self::new(Signal::IncrementSign, lag, 1)
    }

    pub const fn pow(self, power: u32) -> Self {
        Self { power, ..self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coefficient: f64,
    /// Empty for a constant term.
    pub factors: Vec<Factor>,
}

impl Term {
    pub fn new(coefficient: f64, factors: Vec<Factor>) -> Self {
        Self {
            coefficient,
            factors,
        }
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|f| f.power).sum()
    }
}

/// Closed real interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn span(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Grows both ends by `fraction` of the span.
    pub fn widened(&self, fraction: f64) -> Self {
        let pad = fraction * self.span();
        Self::new(self.lo - pad, self.hi + pad)
    }
}

/// Direction of the input motion on a hysteresis loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Input increasing.
    Loading,
    /// Input decreasing.
    Unloading,
}

impl Regime {
    /// Value the increment sign takes on this branch.
    pub fn sign(self) -> f64 {
        match self {
            Regime::Loading => 1.0,
            Regime::Unloading => -1.0,
        }
    }
}

/// Identified NARX polynomial model.
#[derive(Debug, Clone, PartialEq)]
pub struct NarxModel {
    pub terms: Vec<Term>,
    /// Largest admissible output lag.
    pub max_output_lag: u32,
    /// Largest admissible input lag.
    pub max_input_lag: u32,
    /// Pure delay: the smallest admissible input lag.
    pub delay: u32,
    /// Maximum total degree of a term.
    pub degree: u32,
    pub input_range: Interval,
    pub output_range: Interval,
}

/// A broken model invariant; `term` is the index into [`NarxModel::terms`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DelayBelowOne,
    InputLagsBelowDelay { max_input_lag: u32, delay: u32 },
    NoOutputLag,
    ZeroDegree,
    OutputLagOutOfRange { term: usize, lag: u32 },
    InputLagBelowDelay { term: usize, lag: u32 },
    InputLagAboveMax { term: usize, lag: u32 },
    IncrementLagZero { term: usize },
    ZeroPower { term: usize },
    TermDegree { term: usize, degree: u32 },
    NonFiniteCoefficient { term: usize },
    EmptyRange { which: &'static str },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DelayBelowOne => f.write_str("pure delay must be at least 1"),
            Violation::InputLagsBelowDelay {
                max_input_lag,
                delay,
            } => write!(
                f,
                "max input lag {max_input_lag} is below the pure delay {delay}"
            ),
            Violation::NoOutputLag => f.write_str("max output lag must be at least 1"),
            Violation::ZeroDegree => f.write_str("degree must be at least 1"),
            Violation::OutputLagOutOfRange { term, lag } => {
                write!(
                    f,
                    "term {term}: output lag {lag} outside [1, max output lag]"
                )
            }
            Violation::InputLagBelowDelay { term, lag } => {
                write!(f, "term {term}: input lag {lag} below pure delay")
            }
            Violation::InputLagAboveMax { term, lag } => {
                write!(f, "term {term}: input lag {lag} above max input lag")
            }
            Violation::IncrementLagZero { term } => {
                write!(f, "term {term}: increment factors need lag >= 1")
            }
            Violation::ZeroPower { term } => write!(f, "term {term}: factor with power 0"),
            Violation::TermDegree { term, degree } => {
                write!(f, "term {term}: degree {degree} exceeds model degree")
            }
            Violation::NonFiniteCoefficient { term } => {
                write!(f, "term {term}: coefficient is not finite")
            }
            Violation::EmptyRange { which } => write!(f, "{which} range is empty"),
        }
    }
}

impl NarxModel {
    /// Checks every structural invariant and returns all violations.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        if self.delay < 1 {
            out.push(Violation::DelayBelowOne);
        }
        if self.max_input_lag < self.delay {
            out.push(Violation::InputLagsBelowDelay {
                max_input_lag: self.max_input_lag,
                delay: self.delay,
            });
        }
        if self.max_output_lag < 1 {
            out.push(Violation::NoOutputLag);
        }
        if self.degree < 1 {
            out.push(Violation::ZeroDegree);
        }
        for (which, r) in [("input", self.input_range), ("output", self.output_range)] {
            if !(r.lo < r.hi) {
                out.push(Violation::EmptyRange { which });
            }
        }
        for (term, t) in self.terms.iter().enumerate() {
            if !t.coefficient.is_finite() {
                out.push(Violation::NonFiniteCoefficient { term });
            }
            if t.degree() > self.degree {
                out.push(Violation::TermDegree {
                    term,
                    degree: t.degree(),
                });
            }
            for f in &t.factors {
                if f.power == 0 {
                    out.push(Violation::ZeroPower { term });
                }
                match f.signal {
                    Signal::Output if f.lag < 1 || f.lag > self.max_output_lag => {
                        out.push(Violation::OutputLagOutOfRange { term, lag: f.lag })
                    }
                    Signal::Input if f.lag < self.delay => {
                        out.push(Violation::InputLagBelowDelay { term, lag: f.lag })
                    }
                    Signal::Input if f.lag > self.max_input_lag => {
                        out.push(Violation::InputLagAboveMax { term, lag: f.lag })
                    }
                    Signal::InputIncrement | Signal::IncrementSign if f.lag < 1 => {
                        out.push(Violation::IncrementLagZero { term })
                    }
                    _ => {}
                }
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    pub fn is_hysteretic(&self) -> bool {
        self.factors().any(|f| f.signal.is_increment())
    }

    /// Sum of the coefficients of the linear output terms `theta * y(k-i)`.
    pub fn sigma_y(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| {
                matches!(
                    t.factors.as_slice(),
                    [Factor {
                        signal: Signal::Output,
                        power: 1,
                        ..
                    }]
                )
            })
            .map(|t| t.coefficient)
            .sum()
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.coefficient).collect()
    }

    /// Same structure with new coefficients, in term order.
    ///
    /// # Panics
    /// If `coefficients` has a different length than the term list.
    pub fn with_coefficients(&self, coefficients: &[f64]) -> Self {
        assert_eq!(
            coefficients.len(),
            self.terms.len(),
            "one coefficient per term"
        );
        let mut out = self.clone();
        for (t, &c) in out.terms.iter_mut().zip(coefficients) {
            t.coefficient = c;
        }
        out
    }

    /// Number of past outputs a simulation step reads.
    pub fn output_depth(&self) -> usize {
        self.factors()
            .filter(|f| f.signal == Signal::Output)
            .map(|f| f.lag as usize)
            .max()
            .unwrap_or(0)
    }

    /// Number of past inputs a simulation step reads; increments at lag `j`
    /// also need `u(k-j-1)`.
    pub fn input_depth(&self) -> usize {
        self.factors()
            .map(|f| match f.signal {
                Signal::Input => f.lag as usize,
                Signal::InputIncrement | Signal::IncrementSign => f.lag as usize + 1,
                Signal::Output => 0,
            })
            .max()
            .unwrap_or(0)
    }

    fn factors(&self) -> impl Iterator<Item = &Factor> {
        self.terms.iter().flat_map(|t| t.factors.iter())
    }

    /// Evaluates the model sum given lag accessors for `y` and `u`.
    pub(crate) fn eval_with(&self, y: impl Fn(u32) -> f64, u: impl Fn(u32) -> f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.factors.iter().fold(t.coefficient, |acc, f| {
                    let v = match f.signal {
                        Signal::Output => y(f.lag),
                        Signal::Input => u(f.lag),
                        Signal::InputIncrement => u(f.lag) - u(f.lag + 1),
                        Signal::IncrementSign => sign(u(f.lag) - u(f.lag + 1)),
                    };
                    acc * powu(v, f.power)
                })
            })
            .sum()
    }
}

/// Sign with `sign(0) = 0`.
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub(crate) fn powu(x: f64, n: u32) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        2 => x * x,
        _ => (0..n).fold(1.0, |acc, _| acc * x),
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    //! Models used across unit tests.
    use super::*;
    use alloc::vec;

    pub const HEATER_THETA: [f64; 3] = [8.958185e-1, 6.393347e-2, -1.746750e-2];

    /// `y(k) = t1 y(k-1) + t2 u(k-2)^2 + t3 y(k-2)`.
    pub fn heater() -> NarxModel {
        let [t1, t2, t3] = HEATER_THETA;
        NarxModel {
            terms: vec![
                Term::new(t1, vec![Factor::output(1)]),
                Term::new(t2, vec![Factor::input(2).pow(2)]),
                Term::new(t3, vec![Factor::output(2)]),
            ],
            max_output_lag: 2,
            max_input_lag: 2,
            delay: 2,
            degree: 2,
            input_range: Interval::new(0.0, 1.0),
            output_range: Interval::new(0.0, 0.5),
        }
    }

    /// `y(k) = t1 y(k-1) + t2 u(k-1) + t3 u(k-1)u(k-2) + t4 u(k-1)^2 + t5 u(k-1)^3`.
    pub fn cubic_example(theta: [f64; 5]) -> NarxModel {
        NarxModel {
            terms: vec![
                Term::new(theta[0], vec![Factor::output(1)]),
                Term::new(theta[1], vec![Factor::input(1)]),
                Term::new(theta[2], vec![Factor::input(1), Factor::input(2)]),
                Term::new(theta[3], vec![Factor::input(1).pow(2)]),
                Term::new(theta[4], vec![Factor::input(1).pow(3)]),
            ],
            max_output_lag: 1,
            max_input_lag: 2,
            delay: 1,
            degree: 3,
            input_range: Interval::new(-2.0, 2.0),
            output_range: Interval::new(-10.0, 10.0),
        }
    }

    /// `y(k) = .8 y(k-1) + .4 u(k-1)^3 + .2 |du(k-1)| u(k-1) + .1 |du(k-1)| y(k-1)`.
    pub fn hysteretic_example() -> NarxModel {
        let abs_du = [Factor::increment(1), Factor::increment_sign(1)];
        NarxModel {
            terms: vec![
                Term::new(0.8, vec![Factor::output(1)]),
                Term::new(0.4, vec![Factor::input(1).pow(3)]),
                Term::new(0.2, vec![abs_du[0], abs_du[1], Factor::input(1)]),
                Term::new(0.1, vec![abs_du[0], abs_du[1], Factor::output(1)]),
            ],
            max_output_lag: 1,
            max_input_lag: 2,
            delay: 1,
            degree: 3,
            input_range: Interval::new(-1.0, 3.0),
            output_range: Interval::new(-5.0, 15.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use alloc::vec;

    #[test]
    fn heater_is_valid() {
        assert_eq!(heater().validate(), Ok(()));
        assert!(!heater().is_hysteretic());
        assert!(hysteretic_example().is_hysteretic());
    }

    #[test]
    fn input_lag_below_delay() {
        let mut m = heater();
        m.delay = 1;
        m.terms.push(Term::new(1.0, vec![Factor::input(0)]));
        let v = m.validate().unwrap_err();
        assert!(v.contains(&Violation::InputLagBelowDelay { term: 3, lag: 0 }));
        assert_eq!(
            alloc::format!("{}", v[0]),
            "term 3: input lag 0 below pure delay"
        );
    }

    #[test]
    fn term_degree_above_model_degree() {
        let mut m = cubic_example([0.5, 1.0, 1.0, 1.0, 1.0]);
        m.terms.push(Term::new(1.0, vec![Factor::input(1).pow(4)]));
        assert_eq!(
            m.validate(),
            Err(vec![Violation::TermDegree { term: 5, degree: 4 }])
        );
    }

    #[test]
    fn reports_every_violation() {
        let mut m = heater();
        m.delay = 0;
        m.max_output_lag = 0;
        m.input_range = Interval::new(1.0, 1.0);
        m.terms[0].coefficient = f64::NAN;
        let v = m.validate().unwrap_err();
        assert!(v.contains(&Violation::DelayBelowOne));
        assert!(v.contains(&Violation::NoOutputLag));
        assert!(v.contains(&Violation::EmptyRange { which: "input" }));
        assert!(v.contains(&Violation::NonFiniteCoefficient { term: 0 }));
        assert!(v.contains(&Violation::OutputLagOutOfRange { term: 0, lag: 1 }));
    }

    #[test]
    fn sigma_y_counts_only_linear_output_terms() {
        let [t1, _, t3] = HEATER_THETA;
        assert_eq!(heater().sigma_y(), t1 + t3);
        // The |du| y(k-1) term is not linear in y alone.
        assert_eq!(hysteretic_example().sigma_y(), 0.8);
    }

    #[test]
    fn depths() {
        assert_eq!(heater().output_depth(), 2);
        assert_eq!(heater().input_depth(), 2);
        assert_eq!(hysteretic_example().input_depth(), 2);
    }

    #[test]
    fn sign_of_zero_is_zero() {
        assert_eq!(sign(0.0), 0.0);
        assert_eq!(sign(-0.0), 0.0);
        assert_eq!(sign(-3.0), -1.0);
    }
}
