//! Closed-form solvers up to degree three and an Aberth iteration for the rest.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::Polynomial;
use crate::error::{Error, Result};

/// Default relative tolerance on imaginary parts for a root to count as real.
pub const DEFAULT_IM_TOL: f64 = 1e-9;
/// Iteration budget of [`solve_iterative`].
pub const MAX_ITERATIONS: usize = 500;

const STEP_TOL: f64 = 1e-12;
/// Fractional part of the golden ratio; keeps the starting points off any
/// symmetry axis of the polynomial.
const ANGLE_OFFSET: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootMethod {
    Analytic,
    Iterative,
}

/// All complex roots of a polynomial, with multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    roots: Vec<Complex64>,
    method: RootMethod,
}

impl RootSet {
    pub fn new(roots: Vec<Complex64>, method: RootMethod) -> Self {
        Self { roots, method }
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn method(&self) -> RootMethod {
        self.method
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Real parts of the roots with `|im| <= im_tol * max(1, |re|)`.
    pub fn real_roots(&self, im_tol: f64) -> Vec<f64> {
        self.roots
            .iter()
            .filter(|z| z.im.abs() <= im_tol * z.re.abs().max(1.0))
            .map(|z| z.re)
            .collect()
    }
}

fn require_degree(p: &Polynomial, degree: usize, expected: &'static str) -> Result<Polynomial> {
    let trimmed = p.trimmed();
    match trimmed.degree() {
        Some(d) if d == degree => Ok(trimmed),
        found => Err(Error::DegreeMismatch { expected, found }),
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn solve_linear(p: &Polynomial) -> Result<RootSet> {
    let p = require_degree(p, 1, "1")?;
    Ok(RootSet::new(
        vec![real(-p.coeff(0) / p.coeff(1))],
        RootMethod::Analytic,
    ))
}

pub fn solve_quadratic(p: &Polynomial) -> Result<RootSet> {
    let p = require_degree(p, 2, "2")?;
    let (a0, a1, a2) = (p.coeff(0), p.coeff(1), p.coeff(2));
    let disc = a1 * a1 - 4.0 * a2 * a0;
    let roots = if disc >= 0.0 {
        // q never cancels: both terms share a sign.
        let q = -0.5 * (a1 + a1.signum() * disc.sqrt());
        if q == 0.0 {
            vec![real(0.0), real(0.0)]
        } else {
            vec![real(q / a2), real(a0 / q)]
        }
    } else {
        let re = -a1 / (2.0 * a2);
        let im = (-disc).sqrt() / (2.0 * a2);
        vec![Complex64::new(re, im), Complex64::new(re, -im)]
    };
    Ok(RootSet::new(roots, RootMethod::Analytic))
}

/// Cardano's formula with the cube root taken on the larger of the two
/// candidate radicands, followed by a few guarded Newton steps.
pub fn solve_cubic(p: &Polynomial) -> Result<RootSet> {
    let p = require_degree(p, 3, "3")?;
    let (a0, a1, a2, a3) = (p.coeff(0), p.coeff(1), p.coeff(2), p.coeff(3));
    let d0 = a2 * a2 - 3.0 * a3 * a1;
    let d1 = 2.0 * a2.powi(3) - 9.0 * a3 * a2 * a1 + 27.0 * a3 * a3 * a0;
    let radical = real(d1 * d1 - 4.0 * d0.powi(3)).sqrt();
    let plus = (real(d1) + radical) * 0.5;
    let minus = (real(d1) - radical) * 0.5;
    let c_cubed = if plus.norm() >= minus.norm() {
        plus
    } else {
        minus
    };

    if c_cubed.norm() == 0.0 {
        let x = real(-a2 / (3.0 * a3));
        return Ok(RootSet::new(vec![x; 3], RootMethod::Analytic));
    }

    let c = c_cubed.cbrt();
    let xi = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let deriv = p.derivative();
    let mut rotation = real(1.0);
    let mut roots = Vec::with_capacity(3);
    for _ in 0..3 {
        let ck = c * rotation;
        let x = -(real(a2) + ck + real(d0) / ck) / (3.0 * a3);
        roots.push(polish(&p, &deriv, x));
        rotation *= xi;
    }
    Ok(RootSet::new(roots, RootMethod::Analytic))
}

fn polish(p: &Polynomial, deriv: &Polynomial, mut x: Complex64) -> Complex64 {
    let mut residual = p.eval_complex(x).norm();
    for _ in 0..3 {
        let slope = deriv.eval_complex(x);
        if residual == 0.0 || slope.norm() == 0.0 {
            break;
        }
        let next = x - p.eval_complex(x) / slope;
        let next_residual = p.eval_complex(next).norm();
        if !(next_residual < residual) {
            break;
        }
        x = next;
        residual = next_residual;
    }
    x
}

/// Aberth–Ehrlich simultaneous iteration for any degree >= 1.
///
/// Stops when every correction is below `1e-12` relative to the iterate, or
/// when every residual is at the rounding level of its evaluation.
pub fn solve_iterative(p: &Polynomial) -> Result<RootSet> {
    if p.coeffs().iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument {
            name: "coefficients",
            reason: "must be finite",
        });
    }
    let p = p.trimmed();
    let n = match p.degree() {
        Some(d) if d >= 1 => d,
        found => {
            return Err(Error::DegreeMismatch {
                expected: ">= 1",
                found,
            })
        }
    };
    let lead = p.coeff(n);
    let radius = 1.0
        + (0..n)
            .map(|i| (p.coeff(i) / lead).abs())
            .fold(0.0, f64::max);
    let mut zs: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(radius, TAU * j as f64 / n as f64 + ANGLE_OFFSET))
        .collect();

    let deriv = p.derivative();
    let abs_coeffs = Polynomial::new(p.coeffs().iter().map(|c| c.abs()).collect());

    for _ in 0..MAX_ITERATIONS {
        let mut max_step = 0.0_f64;
        let mut at_rounding_level = true;
        for j in 0..n {
            let z = zs[j];
            let value = p.eval_complex(z);
            let bound = 8.0 * f64::EPSILON * abs_coeffs.eval(z.norm());
            if value.norm() > bound {
                at_rounding_level = false;
            }
            if value.norm() == 0.0 {
                continue;
            }
            let slope = deriv.eval_complex(z);
            if slope.norm() == 0.0 {
                zs[j] = z + Complex64::new(1e-8, 1e-8) * radius;
                max_step = f64::INFINITY;
                continue;
            }
            let newton = value / slope;
            let repulsion: Complex64 = zs
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, &zi)| (z - zi).inv())
                .sum();
            let step = newton / (real(1.0) - newton * repulsion);
            zs[j] = z - step;
            max_step = max_step.max(step.norm() / z.norm().max(1.0));
        }
        if max_step < STEP_TOL || at_rounding_level {
            return Ok(RootSet::new(zs, RootMethod::Iterative));
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        best: RootSet::new(zs, RootMethod::Iterative),
    })
}

/// Closed form for degree <= 3, [`solve_iterative`] above.
pub fn solve_roots(p: &Polynomial) -> Result<RootSet> {
    match p.degree() {
        Some(1) => solve_linear(p),
        Some(2) => solve_quadratic(p),
        Some(3) => solve_cubic(p),
        Some(d) if d >= 4 => solve_iterative(p),
        found => Err(Error::DegreeMismatch {
            expected: ">= 1",
            found,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(c: &[f64]) -> Polynomial {
        Polynomial::new(c.to_vec())
    }

    fn sorted_re(rs: &RootSet) -> Vec<f64> {
        let mut v: Vec<f64> = rs.roots().iter().map(|z| z.re).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn linear() {
        assert_eq!(
            solve_linear(&p(&[-3.0, 1.5])).unwrap().roots(),
            &[real(2.0)]
        );
        assert_eq!(
            solve_linear(&p(&[0.0, 7.0]))
                .unwrap()
                .real_roots(DEFAULT_IM_TOL),
            vec![0.0]
        );
        assert!(matches!(
            solve_linear(&p(&[1.0, 2.0, 3.0])),
            Err(Error::DegreeMismatch { found: Some(2), .. })
        ));
        assert!(matches!(
            solve_linear(&p(&[0.0])),
            Err(Error::DegreeMismatch { found: None, .. })
        ));
    }

    #[test]
    fn quadratic() {
        let rs = solve_quadratic(&p(&[-1.0, 0.0, 1.0])).unwrap();
        assert_eq!(sorted_re(&rs), vec![-1.0, 1.0]);
        let rs = solve_quadratic(&p(&[1.0, 0.0, 1.0])).unwrap();
        assert!(rs.roots().contains(&Complex64::new(0.0, 1.0)));
        assert!(rs.roots().contains(&Complex64::new(0.0, -1.0)));
        assert!(rs.real_roots(DEFAULT_IM_TOL).is_empty());
        // Small root must not be lost to cancellation.
        let rs = solve_quadratic(&p(&[1.0, 1e8, 1.0])).unwrap();
        assert_abs_diff_eq!(sorted_re(&rs)[1], -1e-8, epsilon = 1e-20);
    }

    #[test]
    fn cubic_examples() {
        let rs = solve_cubic(&p(&[-6.0, 11.0, -6.0, 1.0])).unwrap();
        for (got, want) in sorted_re(&rs).iter().zip([1.0, 2.0, 3.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert_eq!(
            solve_cubic(&p(&[0.0, 0.0, 0.0, 1.0])).unwrap().roots(),
            &[real(0.0); 3]
        );

        let rs = solve_cubic(&p(&[-1.0, 0.0, 0.0, 1.0])).unwrap();
        let xi = Complex64::new(-0.5, 3.0_f64.sqrt() / 2.0);
        for want in [real(1.0), xi, xi.conj()] {
            assert!(
                rs.roots().iter().any(|z| (z - want).norm() < 1e-12),
                "{want}"
            );
        }
    }

    #[test]
    fn cubic_double_root() {
        // (x - 1)^2 (x + 2)
        let rs = solve_cubic(&Polynomial::from_roots(&[1.0, 1.0, -2.0])).unwrap();
        let v = sorted_re(&rs);
        assert_abs_diff_eq!(v[0], -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1], 1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(v[2], 1.0, epsilon = 1e-7);
    }

    #[test]
    fn quartic_dispatches_to_iteration() {
        let rs = solve_roots(&p(&[24.0, -50.0, 35.0, -10.0, 1.0])).unwrap();
        assert_eq!(rs.method(), RootMethod::Iterative);
        for (got, want) in sorted_re(&rs).iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-10);
        }
        assert!(rs.roots().iter().all(|z| z.im.abs() < 1e-10));
    }

    #[test]
    fn dispatch_matches_cubic() {
        let q = p(&[0.3, -1.7, 0.2, 2.5]);
        assert_eq!(solve_roots(&q).unwrap(), solve_cubic(&q).unwrap());
    }

    #[test]
    fn real_root_filter() {
        let rs = RootSet::new(vec![real(1.0), real(2.0)], RootMethod::Analytic);
        assert_eq!(rs.real_roots(DEFAULT_IM_TOL), vec![1.0, 2.0]);
        let rs = RootSet::new(vec![Complex64::new(1.0, 1e-13)], RootMethod::Analytic);
        assert_eq!(rs.real_roots(DEFAULT_IM_TOL), vec![1.0]);
        // Relative to |re| when it exceeds one.
        let rs = RootSet::new(vec![Complex64::new(1e6, 1e-4)], RootMethod::Analytic);
        assert_eq!(rs.real_roots(DEFAULT_IM_TOL), vec![1e6]);
    }

    #[test]
    fn iterative_rejects_constants() {
        assert!(matches!(
            solve_iterative(&p(&[3.0])),
            Err(Error::DegreeMismatch { found: Some(0), .. })
        ));
        assert!(solve_iterative(&p(&[f64::NAN, 1.0])).is_err());
    }
}
