use alloc::vec;
use alloc::vec::Vec;

use super::{powu, NarxModel, Regime, Signal};
use crate::error::{Error, Result};
use crate::poly::{solve_roots, Polynomial, DEFAULT_IM_TOL};

/// Fixed points are searched in the output range widened by this fraction of
/// its span on each side.
const RANGE_BAND: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub u_bar: f64,
    pub y_bar: f64,
    /// Eigenvalue magnitudes of the linearization, largest first.
    pub eigen_mags: Vec<f64>,
    pub stable: bool,
}

/// Steady-state value of an increment-type factor: the increment is zero and
/// its sign is the branch sign (zero off-branch).
fn steady_increment(signal: Signal, branch: Option<Regime>) -> f64 {
    match signal {
        Signal::InputIncrement => 0.0,
        Signal::IncrementSign => branch.map_or(0.0, Regime::sign),
        _ => unreachable!("not an increment factor"),
    }
}

/// The steady-state relation `f(y, ..., u, ...) - y` as a polynomial in the
/// steady output, at constant input `u_bar`.
pub fn static_polynomial(model: &NarxModel, u_bar: f64, branch: Option<Regime>) -> Polynomial {
    let mut out = Polynomial::monomial(-1.0, 1);
    for t in &model.terms {
        let mut scalar = t.coefficient;
        let mut y_power = 0;
        for f in &t.factors {
            match f.signal {
                Signal::Output => y_power += f.power as usize,
                Signal::Input => scalar *= powu(u_bar, f.power),
                s => scalar *= powu(steady_increment(s, branch), f.power),
            }
        }
        out = &out + &Polynomial::monomial(scalar, y_power);
    }
    out
}

/// Steady output values under a constant input with the increment regressors
/// at rest.
pub fn fixed_points(model: &NarxModel, u_bar: f64) -> Result<Vec<FixedPoint>> {
    fixed_points_on_branch(model, u_bar, None)
}

/// As [`fixed_points`], with the increment sign held at the branch sign.
pub fn fixed_points_on_branch(
    model: &NarxModel,
    u_bar: f64,
    branch: Option<Regime>,
) -> Result<Vec<FixedPoint>> {
    let poly = static_polynomial(model, u_bar, branch);
    let scale = 1.0
        + model
            .terms
            .iter()
            .fold(0.0, |m, t| f64::max(m, t.coefficient.abs()));
    if poly.coeffs().iter().all(|c| c.abs() <= 1e-12 * scale) {
        return Err(Error::DegenerateStatics { u_bar });
    }
    let candidates = match poly.degree() {
        Some(d) if d >= 1 => solve_roots(&poly)?.real_roots(DEFAULT_IM_TOL),
        _ => Vec::new(),
    };
    let band = model.output_range.widened(RANGE_BAND);
    let mut out = Vec::new();
    for y_bar in candidates.into_iter().filter(|&y| band.contains(y)) {
        let eigen_mags = jacobian_eigen_on_branch(model, u_bar, y_bar, branch)?;
        let stable = eigen_mags.iter().all(|&m| m < 1.0);
        out.push(FixedPoint {
            u_bar,
            y_bar,
            eigen_mags,
            stable,
        });
    }
    out.sort_by(|a, b| a.y_bar.total_cmp(&b.y_bar));
    Ok(out)
}

/// Eigenvalue magnitudes (largest first) of the model linearized about the
/// equilibrium `(u_bar, y_bar)`.
///
/// With `a_i` the partial derivative with respect to `y(k-i)`, the
/// eigenvalues are the roots of `z^n - a_1 z^(n-1) - ... - a_n`, where `n` is
/// the largest output lag present. A model without output lags has none.
pub fn jacobian_eigen(model: &NarxModel, u_bar: f64, y_bar: f64) -> Result<Vec<f64>> {
    jacobian_eigen_on_branch(model, u_bar, y_bar, None)
}

fn jacobian_eigen_on_branch(
    model: &NarxModel,
    u_bar: f64,
    y_bar: f64,
    branch: Option<Regime>,
) -> Result<Vec<f64>> {
    let n = model.output_depth();
    if n == 0 {
        return Ok(Vec::new());
    }
    let steady = |signal: Signal, power: u32| match signal {
        Signal::Output => powu(y_bar, power),
        Signal::Input => powu(u_bar, power),
        s => powu(steady_increment(s, branch), power),
    };
    let mut partials = vec![0.0; n + 1];
    for t in &model.terms {
        for (i, f) in t.factors.iter().enumerate() {
            if f.signal != Signal::Output {
                continue;
            }
            let rest: f64 = t
                .factors
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, g)| steady(g.signal, g.power))
                .product();
            partials[f.lag as usize] +=
                t.coefficient * f.power as f64 * powu(y_bar, f.power.saturating_sub(1)) * rest;
        }
    }
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    for i in 1..=n {
        coeffs[n - i] = -partials[i];
    }
    let roots = solve_roots(&Polynomial::new(coeffs))?;
    let mut mags: Vec<f64> = roots.roots().iter().map(|z| z.norm()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    Ok(mags)
}

/// For each grid input, the stable fixed point inside the (banded) output
/// range with the smallest magnitude.
pub fn static_curve(model: &NarxModel, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    grid.iter()
        .map(|&u_bar| {
            fixed_points(model, u_bar)?
                .into_iter()
                .filter(|fp| fp.stable)
                .min_by(|a, b| a.y_bar.abs().total_cmp(&b.y_bar.abs()))
                .map(|fp| (u_bar, fp.y_bar))
                .ok_or(Error::NoStableFixedPoint { u_bar })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::narx::fixtures::*;
    use crate::narx::{simulate_free_run, Factor, Interval, Term};
    use approx::assert_abs_diff_eq;

    #[test]
    fn cubic_example_static_polynomial_is_linear() {
        let th = [0.5, 0.3, 0.2, 0.1, 0.05];
        let m = cubic_example(th);
        let u = 0.7;
        let p = static_polynomial(&m, u, None).trimmed();
        assert_eq!(p.degree(), Some(1));
        assert_abs_diff_eq!(p.coeff(1), th[0] - 1.0, epsilon = 1e-15);
        let c0 = th[4] * u * u * u + (th[2] + th[3]) * u * u + th[1] * u;
        assert_abs_diff_eq!(p.coeff(0), c0, epsilon = 1e-15);
        let fps = fixed_points(&m, u).unwrap();
        assert_eq!(fps.len(), 1);
        assert_abs_diff_eq!(fps[0].eigen_mags[0], th[0], epsilon = 1e-15);
    }

    #[test]
    fn heater_fixed_point_and_eigenvalues() {
        let [t1, t2, t3] = HEATER_THETA;
        let fps = fixed_points(&heater(), 0.5).unwrap();
        assert_eq!(fps.len(), 1);
        let fp = &fps[0];
        assert_abs_diff_eq!(fp.y_bar, t2 * 0.25 / (1.0 - t1 - t3), epsilon = 1e-14);
        assert_abs_diff_eq!(fp.y_bar, 0.1314, epsilon = 1e-4);
        assert!(fp.stable);
        assert_abs_diff_eq!(fp.eigen_mags[0], 0.8759, epsilon = 5e-4);
        assert_abs_diff_eq!(fp.eigen_mags[1], 0.0199, epsilon = 5e-4);
    }

    #[test]
    fn heater_eigenvalues_match_quadratic_formula() {
        // Independent route: roots of z^2 - t1 z - t3 by hand.
        let [t1, _, t3] = HEATER_THETA;
        let disc = (t1 * t1 + 4.0 * t3).sqrt();
        let mags = jacobian_eigen(&heater(), 0.3, 0.07).unwrap();
        assert_abs_diff_eq!(mags[0], (t1 + disc) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(mags[1], (t1 - disc) / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn heater_zero_input() {
        let fps = fixed_points(&heater(), 0.0).unwrap();
        assert_eq!(fps.len(), 1);
        assert_eq!(fps[0].y_bar, 0.0);
        assert!(fps[0].stable);
    }

    #[test]
    fn pure_input_model_has_no_eigenvalues() {
        let m = NarxModel {
            terms: vec![Term::new(1.0, vec![Factor::input(1)])],
            max_output_lag: 1,
            max_input_lag: 1,
            delay: 1,
            degree: 1,
            input_range: Interval::new(0.0, 1.0),
            output_range: Interval::new(0.0, 1.0),
        };
        assert!(jacobian_eigen(&m, 0.5, 0.5).unwrap().is_empty());
        let fps = fixed_points(&m, 0.5).unwrap();
        assert!(fps[0].stable);
    }

    #[test]
    fn rest_state_of_rate_independent_model_is_degenerate() {
        let m = NarxModel {
            terms: vec![
                Term::new(1.0, vec![Factor::output(1)]),
                Term::new(0.3, vec![Factor::increment(1), Factor::input(1)]),
            ],
            max_output_lag: 1,
            max_input_lag: 2,
            delay: 1,
            degree: 2,
            input_range: Interval::new(0.0, 1.0),
            output_range: Interval::new(0.0, 1.0),
        };
        assert_eq!(
            fixed_points(&m, 0.5),
            Err(Error::DegenerateStatics { u_bar: 0.5 })
        );
    }

    #[test]
    fn heater_static_curve() {
        let [t1, t2, t3] = HEATER_THETA;
        let curve = static_curve(&heater(), &[0.0, 0.5, 1.0]).unwrap();
        for &(u, y) in &curve {
            assert_abs_diff_eq!(y, t2 * u * u / (1.0 - t1 - t3), epsilon = 1e-14);
        }
        assert_abs_diff_eq!(curve[2].1, 0.5256, epsilon = 1e-4);
    }

    #[test]
    fn linear_model_static_curve_is_identity() {
        let m = NarxModel {
            terms: vec![
                Term::new(0.5, vec![Factor::output(1)]),
                Term::new(0.5, vec![Factor::input(1)]),
            ],
            max_output_lag: 1,
            max_input_lag: 1,
            delay: 1,
            degree: 1,
            input_range: Interval::new(0.0, 1.0),
            output_range: Interval::new(0.0, 1.0),
        };
        let grid = [0.0, 0.25, 0.8];
        for (u, y) in static_curve(&m, &grid).unwrap() {
            assert_abs_diff_eq!(u, y, epsilon = 1e-15);
        }
        assert_eq!(static_curve(&m, &[0.3]).unwrap().len(), 1);
    }

    #[test]
    fn unstable_fixed_point_is_rejected_by_curve() {
        let m = NarxModel {
            terms: vec![
                Term::new(1.5, vec![Factor::output(1)]),
                Term::new(-0.5, vec![Factor::input(1)]),
            ],
            max_output_lag: 1,
            max_input_lag: 1,
            delay: 1,
            degree: 1,
            input_range: Interval::new(0.0, 1.0),
            output_range: Interval::new(0.0, 1.0),
        };
        assert_eq!(
            static_curve(&m, &[0.5]),
            Err(Error::NoStableFixedPoint { u_bar: 0.5 })
        );
    }

    #[test]
    fn stable_fixed_point_holds_in_free_run() {
        let m = heater();
        for fp in fixed_points(&m, 0.8).unwrap() {
            let y = simulate_free_run(&m, &[0.8; 10_000], &[fp.y_bar, fp.y_bar]).unwrap();
            assert!(y.iter().all(|v| (v - fp.y_bar).abs() < 1e-9));
        }
    }
}
