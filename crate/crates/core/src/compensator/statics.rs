use alloc::vec;
use alloc::vec::Vec;

use super::select::admissible_roots;
use super::session::CompensationRun;
use crate::error::{Error, Result};
use crate::narx::{fixed_points, powu, NarxModel, Signal};
use crate::poly::{solve_roots, Polynomial};

/// The steady-state relation with the output fixed at `r_bar`, as a
/// polynomial in the steady input.
pub fn static_comp_poly(model: &NarxModel, r_bar: f64) -> Result<Polynomial> {
    if model.is_hysteretic() {
        return Err(Error::ModelClass {
            expected: "non-hysteretic",
        });
    }
    let mut out = Polynomial::constant(-r_bar);
    for t in &model.terms {
        let mut scalar = t.coefficient;
        let mut u_power = 0;
        for f in &t.factors {
            match f.signal {
                Signal::Output => scalar *= powu(r_bar, f.power),
                Signal::Input => u_power += f.power as usize,
                Signal::InputIncrement | Signal::IncrementSign => unreachable!(),
            }
        }
        out = &out + &Polynomial::monomial(scalar, u_power);
    }
    if out.is_zero() {
        return Err(Error::IdenticallyZero);
    }
    Ok(out)
}

/// Steady input that holds the output at `r_bar`.
///
/// Keeps real roots inside the input range whose fixed point is stable and
/// reproduces `r_bar`; the smallest in magnitude wins.
pub fn solve_static(model: &NarxModel, r_bar: f64) -> Result<f64> {
    let poly = static_comp_poly(model, r_bar)?;
    let no_root = Error::NoFeasibleRoot { reference: r_bar };
    if poly.degree() == Some(0) {
        return Err(no_root);
    }
    let roots = solve_roots(&poly)?;
    let tol = 1e-6 * model.output_range.span();
    let mut feasible = Vec::new();
    for m in admissible_roots(&roots, 0.0, model.input_range, None) {
        let reproduces = fixed_points(model, m)?
            .iter()
            .any(|fp| fp.stable && (fp.y_bar - r_bar).abs() < tol);
        if reproduces {
            feasible.push(m);
        }
    }
    feasible
        .into_iter()
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        .ok_or(no_root)
}

/// Static compensation of every sample: `m(k)` is the steady input for
/// `r(k + d)`. A sample without a feasible steady input holds the previous one;
/// the first sample must have one.
pub fn static_run(model: &NarxModel, reference: &[f64]) -> Result<CompensationRun> {
    let n = reference.len();
    let d = model.delay as usize;
    let mut out = CompensationRun {
        inputs: Vec::with_capacity(n),
        regimes: vec![None; n],
        ..Default::default()
    };
    for k in 0..n {
        let r = reference[(k + d).min(n - 1)];
        let m = match (solve_static(model, r), out.inputs.last()) {
            (Ok(m), _) => m,
            (Err(Error::NoFeasibleRoot { .. }), Some(&prev)) => {
                out.holds.push(k);
                prev
            }
            (Err(e), _) => return Err(e),
        };
        out.inputs.push(m);
    }
    Ok(out)
}
