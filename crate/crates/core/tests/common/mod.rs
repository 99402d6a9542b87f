#![allow(dead_code)]

use narxcomp_core::narx::{Factor, Interval, NarxModel, Term};

/// `y(k) = t1 y(k-1) + t2 u(k-2)^2 + t3 y(k-2)`, the identified heater.
pub fn heater() -> NarxModel {
    NarxModel {
        terms: vec![
            Term::new(8.958185e-1, vec![Factor::output(1)]),
            Term::new(6.393347e-2, vec![Factor::input(2).pow(2)]),
            Term::new(-1.746750e-2, vec![Factor::output(2)]),
        ],
        max_output_lag: 2,
        max_input_lag: 2,
        delay: 2,
        degree: 2,
        input_range: Interval::new(0.0, 1.0),
        output_range: Interval::new(0.0, 0.5),
    }
}

/// `y(k) = .5 y(k-1) + u(k-1) + .1 u(k-1)u(k-2) + .2 u(k-1)^2 + .3 u(k-1)^3`:
/// monotone in `u(k-1)` on the input range, so every step has one real root.
pub fn cubic() -> NarxModel {
    NarxModel {
        terms: vec![
            Term::new(0.5, vec![Factor::output(1)]),
            Term::new(1.0, vec![Factor::input(1)]),
            Term::new(0.1, vec![Factor::input(1), Factor::input(2)]),
            Term::new(0.2, vec![Factor::input(1).pow(2)]),
            Term::new(0.3, vec![Factor::input(1).pow(3)]),
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
pub fn hysteretic() -> NarxModel {
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

/// `y(k) = 1.2 y(k-1) - .2 y(k-1)^2 + u(k-1)`: for `u >= 0` one stable and
/// one unstable equilibrium.
pub fn logistic() -> NarxModel {
    NarxModel {
        terms: vec![
            Term::new(1.2, vec![Factor::output(1)]),
            Term::new(-0.2, vec![Factor::output(1).pow(2)]),
            Term::new(1.0, vec![Factor::input(1)]),
        ],
        max_output_lag: 1,
        max_input_lag: 1,
        delay: 1,
        degree: 2,
        input_range: Interval::new(0.0, 1.0),
        output_range: Interval::new(-3.0, 3.0),
    }
}
