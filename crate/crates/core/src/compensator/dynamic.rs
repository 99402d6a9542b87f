//! Per-step compensation polynomials.
//!
//! Shifting the model equation forward by the pure delay `d`, the output at
//! `k + d` depends on `m(k)` and earlier inputs. Replacing every output by
//! the reference leaves a polynomial in the single unknown `m(k)`.

use super::Result;
use crate::error::Error;
use crate::narx::{powu, sign, NarxModel, Regime, Signal};
use crate::poly::Polynomial;

/// Known signals around step `k`.
#[derive(Debug, Clone, Copy)]
pub struct StepWindow<'a> {
    /// `r(k+d), r(k+d-1), ...`, at least one more than the largest output lag.
    pub reference: &'a [f64],
    /// `m(k-1), m(k-2), ...`, at least [`past_inputs_needed`] values.
    pub past_inputs: &'a [f64],
}

/// Loading and unloading polynomials of a hysteretic step.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchPolynomials {
    /// Valid for `m(k) > pivot`.
    pub loading: Polynomial,
    /// Valid for `m(k) < pivot`.
    pub unloading: Polynomial,
    /// `m(k-1)`.
    pub pivot: f64,
}

impl BranchPolynomials {
    pub fn branch(&self, regime: Regime) -> &Polynomial {
        match regime {
            Regime::Loading => &self.loading,
            Regime::Unloading => &self.unloading,
        }
    }
}

/// Number of past inputs `m(k-1), m(k-2), ...` a step reads.
pub fn past_inputs_needed(model: &NarxModel) -> usize {
    let d = model.delay as usize;
    model
        .terms
        .iter()
        .flat_map(|t| &t.factors)
        .map(|f| {
            let lag = f.lag as usize;
            match f.signal {
                Signal::Output => 0,
                Signal::Input => lag.saturating_sub(d),
                Signal::InputIncrement | Signal::IncrementSign => (lag + 1).saturating_sub(d),
            }
        })
        .max()
        .unwrap_or(0)
}

/// Polynomial in `m(k)` for a model without increment regressors.
pub fn dynamic_comp_poly(model: &NarxModel, window: &StepWindow<'_>) -> Result<Polynomial> {
    if model.is_hysteretic() {
        return Err(Error::ModelClass {
            expected: "non-hysteretic",
        });
    }
    build(model, window, None)
}

/// Both branch polynomials of a hysteretic model: the increment at the
/// unknown step becomes `m(k) - m(k-1)` and its sign becomes `+1` (loading)
/// or `-1` (unloading).
pub fn hysteresis_comp_polys(
    model: &NarxModel,
    window: &StepWindow<'_>,
) -> Result<BranchPolynomials> {
    if !model.is_hysteretic() {
        return Err(Error::ModelClass {
            expected: "hysteretic",
        });
    }
    Ok(BranchPolynomials {
        loading: build(model, window, Some(Regime::Loading))?,
        unloading: build(model, window, Some(Regime::Unloading))?,
        pivot: pivot(window)?,
    })
}

/// Shifted model equation in zero form, `f(...) - r(k+d)`, evaluated
/// directly at `m(k) = x` without any branch split.
pub fn step_residual(model: &NarxModel, window: &StepWindow<'_>, x: f64) -> Result<f64> {
    check_window(model, window)?;
    let d = model.delay;
    let input = |lag: u32| {
        if lag == d {
            x
        } else {
            window.past_inputs[(lag - d) as usize - 1]
        }
    };
    Ok(model.eval_with(|lag| window.reference[lag as usize], input) - window.reference[0])
}

fn pivot(window: &StepWindow<'_>) -> Result<f64> {
    window
        .past_inputs
        .first()
        .copied()
        .ok_or(Error::InsufficientHistory {
            signal: "input",
            needed: 1,
            got: 0,
        })
}

fn check_window(model: &NarxModel, window: &StepWindow<'_>) -> Result<()> {
    let needed = model.output_depth() + 1;
    if window.reference.len() < needed {
        return Err(Error::InsufficientHistory {
            signal: "reference",
            needed,
            got: window.reference.len(),
        });
    }
    let needed = past_inputs_needed(model);
    if window.past_inputs.len() < needed {
        return Err(Error::InsufficientHistory {
            signal: "input",
            needed,
            got: window.past_inputs.len(),
        });
    }
    let d = model.delay;
    for f in model.terms.iter().flat_map(|t| &t.factors) {
        if f.signal != Signal::Output && f.lag < d {
            return Err(Error::UnknownFutureInput {
                lag: f.lag,
                delay: d,
            });
        }
    }
    Ok(())
}

/// A factor value: a known number or a polynomial in `m(k)`.
enum Value {
    Known(f64),
    Unknown(Polynomial),
}

fn build(model: &NarxModel, window: &StepWindow<'_>, branch: Option<Regime>) -> Result<Polynomial> {
    check_window(model, window)?;
    let d = model.delay;
    let past = |n: u32| window.past_inputs[n as usize - 1];
    let mut out = Polynomial::constant(-window.reference[0]);
    for t in &model.terms {
        let mut scalar = t.coefficient;
        let mut poly = Polynomial::constant(1.0);
        for f in &t.factors {
            let value = match (f.signal, f.lag == d) {
                (Signal::Output, _) => Value::Known(window.reference[f.lag as usize]),
                (Signal::Input, true) => Value::Unknown(Polynomial::monomial(1.0, 1)),
                (Signal::Input, false) => Value::Known(past(f.lag - d)),
                (Signal::InputIncrement, true) => {
                    Value::Unknown(Polynomial::new(alloc::vec![-pivot(window)?, 1.0]))
                }
                (Signal::IncrementSign, true) => match branch {
                    Some(regime) => Value::Known(regime.sign()),
                    None => {
                        return Err(Error::ModelClass {
                            expected: "hysteretic",
                        })
                    }
                },
                (Signal::InputIncrement, false) => {
                    Value::Known(past(f.lag - d) - past(f.lag - d + 1))
                }
                (Signal::IncrementSign, false) => {
                    Value::Known(sign(past(f.lag - d) - past(f.lag - d + 1)))
                }
            };
            match value {
                Value::Known(v) => scalar *= powu(v, f.power),
                Value::Unknown(p) => poly = &poly * &p.pow(f.power),
            }
        }
        out = &out + &poly.scale(scalar);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::narx::fixtures::*;
    use crate::narx::{Factor, Interval, Term};
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    fn assert_coeffs(p: &Polynomial, expected: &[f64]) {
        for (i, want) in expected.iter().enumerate() {
            assert_abs_diff_eq!(p.coeff(i), want, epsilon = 1e-12);
        }
        for i in expected.len()..p.coeffs().len() {
            assert_abs_diff_eq!(p.coeff(i), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn heater_step_polynomial() {
        // Delay two: r(k+2), r(k+1), r(k).
        let [t1, t2, t3] = HEATER_THETA;
        let r = [0.21, 0.2, 0.18];
        let w = StepWindow {
            reference: &r,
            past_inputs: &[],
        };
        let p = dynamic_comp_poly(&heater(), &w).unwrap();
        assert_coeffs(&p, &[t1 * r[1] + t3 * r[2] - r[0], 0.0, t2]);
        assert_eq!(past_inputs_needed(&heater()), 0);
    }

    #[test]
    fn cubic_example_step_polynomial() {
        let th = [0.5, 0.3, 0.2, 0.1, 0.05];
        let (r_next, r_now, m_prev) = (0.9, 0.7, 0.4);
        let w = StepWindow {
            reference: &[r_next, r_now],
            past_inputs: &[m_prev],
        };
        let p = dynamic_comp_poly(&cubic_example(th), &w).unwrap();
        assert_coeffs(
            &p,
            &[th[0] * r_now - r_next, th[1] + th[2] * m_prev, th[3], th[4]],
        );
    }

    #[test]
    fn hysteretic_example_branches() {
        // Hand expansion with |du| = +-(x - m_prev):
        // loading:   c3 = t2, c2 = t3, c1 = -t3 m + t4 r, c0 = t1 r - t4 m r - r+
        // unloading: c3 = t2, c2 = -t3, c1 = t3 m - t4 r, c0 = t1 r + t4 m r - r+
        let (t1, t2, t3, t4) = (0.8, 0.4, 0.2, 0.1);
        let (r_next, r_now, m) = (1.7, 1.3, 0.6);
        let w = StepWindow {
            reference: &[r_next, r_now],
            past_inputs: &[m, 0.5],
        };
        let b = hysteresis_comp_polys(&hysteretic_example(), &w).unwrap();
        assert_eq!(b.pivot, m);
        assert_coeffs(
            &b.loading,
            &[
                t1 * r_now - t4 * m * r_now - r_next,
                -t3 * m + t4 * r_now,
                t3,
                t2,
            ],
        );
        assert_coeffs(
            &b.unloading,
            &[
                t1 * r_now + t4 * m * r_now - r_next,
                t3 * m - t4 * r_now,
                -t3,
                t2,
            ],
        );
    }

    #[test]
    fn branches_agree_with_unsplit_equation() {
        let m = hysteretic_example();
        let w = StepWindow {
            reference: &[1.7, 1.3],
            past_inputs: &[0.6, 0.5],
        };
        let b = hysteresis_comp_polys(&m, &w).unwrap();
        for x in [0.61, 0.9, 2.5] {
            let direct = step_residual(&m, &w, x).unwrap();
            assert_abs_diff_eq!(b.loading.eval(x), direct, epsilon = 1e-12);
        }
        for x in [-0.9, 0.1, 0.59] {
            let direct = step_residual(&m, &w, x).unwrap();
            assert_abs_diff_eq!(b.unloading.eval(x), direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn older_increments_are_known_values() {
        // y(k) = 0.5 y(k-1) + 0.3 |du(k-2)| + u(k-1)
        let model = NarxModel {
            terms: vec![
                Term::new(0.5, vec![Factor::output(1)]),
                Term::new(0.3, vec![Factor::increment(2), Factor::increment_sign(2)]),
                Term::new(1.0, vec![Factor::input(1)]),
            ],
            max_output_lag: 1,
            max_input_lag: 3,
            delay: 1,
            degree: 2,
            input_range: Interval::new(-5.0, 5.0),
            output_range: Interval::new(-5.0, 5.0),
        };
        assert_eq!(past_inputs_needed(&model), 2);
        let w = StepWindow {
            reference: &[1.0, 0.4],
            past_inputs: &[0.2, 0.7],
        };
        let b = hysteresis_comp_polys(&model, &w).unwrap();
        // |m(k-1) - m(k-2)| = 0.5 is known; the unknown enters linearly.
        assert_coeffs(&b.loading, &[0.5 * 0.4 + 0.3 * 0.5 - 1.0, 1.0]);
        assert_eq!(b.loading, b.unloading);
    }

    #[test]
    fn future_inputs_are_rejected() {
        let mut model = heater();
        model.terms.push(Term::new(0.1, vec![Factor::input(1)]));
        let w = StepWindow {
            reference: &[0.1, 0.1, 0.1],
            past_inputs: &[0.0, 0.0],
        };
        assert_eq!(
            dynamic_comp_poly(&model, &w),
            Err(Error::UnknownFutureInput { lag: 1, delay: 2 })
        );
    }

    #[test]
    fn short_windows_are_rejected() {
        let w = StepWindow {
            reference: &[0.1, 0.1],
            past_inputs: &[],
        };
        assert!(matches!(
            dynamic_comp_poly(&heater(), &w),
            Err(Error::InsufficientHistory {
                signal: "reference",
                ..
            })
        ));
    }

    #[test]
    fn steady_reference_is_self_consistent() {
        // At a fixed point the previous input solves the step polynomial.
        let th = [0.5, 0.3, 0.2, 0.1, 0.05];
        let model = cubic_example(th);
        let u = 0.6;
        let y = (th[1] * u + (th[2] + th[3]) * u * u + th[4] * u * u * u) / (1.0 - th[0]);
        let w = StepWindow {
            reference: &[y, y],
            past_inputs: &[u],
        };
        let p = dynamic_comp_poly(&model, &w).unwrap();
        assert_abs_diff_eq!(p.eval(u), 0.0, epsilon = 1e-14);
    }
}
