use alloc::vec;
use alloc::vec::Vec;

use super::Plant;
use crate::error::Result;

/// Gain of the inverse law identified for the pneumatic valve.
pub const VALVE_INVERSE_GAIN: f64 = 10.0 / 7.21;

const INVERSE_ITERATIONS: usize = 100;
const ZERO_CROSSING_ITERATIONS: usize = 60;

/// Bouc–Wen hysteresis: `dh/dt = a du/dt - b |du/dt| h - c du/dt |h|`,
/// output `y = gain u - h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoucWenParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Linear input-to-output gain.
    pub gain: f64,
    /// Sampling and integration step in seconds.
    pub step: f64,
}

impl BoucWenParams {
    /// Piezoelectric actuator benchmark, in micrometres and volts.
    pub const PIEZO: Self = Self {
        alpha: 0.9,
        beta: 0.008,
        gamma: 0.008,
        gain: 1.6,
        step: 5e-3,
    };

    /// State derivative with `|h|` taken as `side * h`, which is smooth.
    fn state_rate(&self, h: f64, input_rate: f64, side: f64) -> f64 {
        self.alpha * input_rate
            - self.beta * input_rate.abs() * h
            - self.gamma * input_rate * side * h
    }

    /// One RK4 step of length `dt` on one side of `h = 0`, with the input
    /// rate varying linearly from `rate0` to `rate1` and not changing sign.
    fn rk4(&self, h: f64, rate0: f64, rate1: f64, dt: f64, side: f64) -> f64 {
        let mid = 0.5 * (rate0 + rate1);
        let k1 = self.state_rate(h, rate0, side);
        let k2 = self.state_rate(h + 0.5 * dt * k1, mid, side);
        let k3 = self.state_rate(h + 0.5 * dt * k2, mid, side);
        let k4 = self.state_rate(h + dt * k3, rate1, side);
        h + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    }

    /// Advances `h` by `dt` with the input rate varying linearly from
    /// `rate0` to `rate1`. The step is split where the rate changes sign and
    /// where `h` crosses zero, so RK4 never straddles a kink of the
    /// right-hand side.
    fn advance(&self, h: f64, rate0: f64, rate1: f64, dt: f64) -> f64 {
        if rate0 * rate1 < 0.0 {
            let at = rate0 / (rate0 - rate1);
            let h = self.advance_one_signed(h, rate0, 0.0, at * dt);
            self.advance_one_signed(h, 0.0, rate1, (1.0 - at) * dt)
        } else {
            self.advance_one_signed(h, rate0, rate1, dt)
        }
    }

    fn advance_one_signed(&self, h: f64, rate0: f64, rate1: f64, dt: f64) -> f64 {
        let side_of = |h: f64| {
            if h != 0.0 {
                h.signum()
            } else if rate0 + rate1 < 0.0 {
                -1.0
            } else {
                1.0
            }
        };
        let side = side_of(h);
        let end = self.rk4(h, rate0, rate1, dt, side);
        if end * side >= 0.0 {
            return end;
        }
        // Regula falsi (Illinois) on the fraction of the step where the
        // one-sided solution reaches zero.
        let rate_at = |t: f64| rate0 + (rate1 - rate0) * t;
        let value = |t: f64| self.rk4(h, rate0, rate_at(t), t * dt, side);
        let (mut lo, mut hi) = ((0.0, h), (1.0, end));
        let mut t = 1.0;
        for _ in 0..ZERO_CROSSING_ITERATIONS {
            t = (lo.0 * hi.1 - hi.0 * lo.1) / (hi.1 - lo.1);
            let v = value(t);
            if v.abs() <= 1e-15 * (1.0 + h.abs()) || hi.0 - lo.0 < 1e-15 {
                break;
            }
            if v * side > 0.0 {
                lo = (t, v);
                hi.1 *= 0.5;
            } else {
                hi = (t, v);
                lo.1 *= 0.5;
            }
        }
        let rate = rate_at(t);
        let side = if rate0 + rate1 < 0.0 { -1.0 } else { 1.0 };
        self.rk4(0.0, rate, rate1, (1.0 - t) * dt, side)
    }
}

impl Default for BoucWenParams {
    fn default() -> Self {
        Self::PIEZO
    }
}

/// Bouc–Wen plant driven by sampled inputs, starting from `h = initial_state`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoucWen {
    pub params: BoucWenParams,
    pub initial_state: f64,
}

impl BoucWen {
    pub fn new(params: BoucWenParams) -> Self {
        Self {
            params,
            initial_state: 0.0,
        }
    }

    /// Input rates by finite differences: forward at the first sample,
    /// central inside, backward at the last.
    pub fn input_rates(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        let dt = self.params.step;
        if n < 2 {
            return vec![0.0; n];
        }
        (0..n)
            .map(|k| match k {
                0 => (u[1] - u[0]) / dt,
                k if k == n - 1 => (u[k] - u[k - 1]) / dt,
                k => (u[k + 1] - u[k - 1]) / (2.0 * dt),
            })
            .collect()
    }

    /// Internal state `h(k)` at every sample, integrating each sampling
    /// interval in `substeps` RK4 steps.
    pub fn states(&self, u: &[f64], substeps: usize) -> Vec<f64> {
        let rates = self.input_rates(u);
        let n_sub = substeps.max(1);
        let dt = self.params.step / n_sub as f64;
        let mut h = self.initial_state;
        let mut out = Vec::with_capacity(u.len());
        for k in 0..u.len() {
            out.push(h);
            if k + 1 == u.len() {
                break;
            }
            let (r0, r1) = (rates[k], rates[k + 1]);
            for j in 0..n_sub {
                let a = j as f64 / n_sub as f64;
                let b = (j + 1) as f64 / n_sub as f64;
                h = self
                    .params
                    .advance(h, r0 + (r1 - r0) * a, r0 + (r1 - r0) * b, dt);
            }
        }
        out
    }

    /// Output at every sample with `substeps` RK4 steps per sampling interval.
    pub fn simulate_substeps(&self, u: &[f64], substeps: usize) -> Vec<f64> {
        self.states(u, substeps)
            .iter()
            .zip(u)
            .map(|(h, u)| self.params.gain * u - h)
            .collect()
    }

    pub fn simulate(&self, u: &[f64]) -> Vec<f64> {
        self.simulate_substeps(u, 1)
    }

    /// Inverse law `m = (r + h) / gain`, with `h` advanced by the plant's own
    /// dynamics driven by `m`.
    pub fn inverse(&self, reference: &[f64]) -> Vec<f64> {
        self.inverse_with_gain(reference, 1.0 / self.params.gain)
    }

    /// Inverse law `m = gain * (r + h)`.
    ///
    /// The input rate over each step is `(m(k+1) - m(k)) / dt`, and `m(k+1)`
    /// depends on the state it drives to, so each step is a fixed-point
    /// iteration (a contraction while `alpha * gain < 1`).
    pub fn inverse_with_gain(&self, reference: &[f64], gain: f64) -> Vec<f64> {
        let dt = self.params.step;
        let mut h = self.initial_state;
        let mut out = Vec::with_capacity(reference.len());
        for (k, &r) in reference.iter().enumerate() {
            let m = gain * (r + h);
            out.push(m);
            if let Some(&r_next) = reference.get(k + 1) {
                let mut h_next = h;
                for _ in 0..INVERSE_ITERATIONS {
                    let rate = (gain * (r_next + h_next) - m) / dt;
                    let h_new = self.params.advance(h, rate, rate, dt);
                    let done = (h_new - h_next).abs() <= 1e-13 * (1.0 + h_new.abs());
                    h_next = h_new;
                    if done {
                        break;
                    }
                }
                h = h_next;
            }
        }
        out
    }
}

impl Default for BoucWen {
    fn default() -> Self {
        Self::new(BoucWenParams::PIEZO)
    }
}

impl Plant for BoucWen {
    fn respond(&self, input: &[f64]) -> Result<Vec<f64>> {
        Ok(self.simulate(input))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::TAU;

    fn sine(amplitude: f64, freq: f64, n: usize) -> Vec<f64> {
        let dt = BoucWenParams::PIEZO.step;
        (0..n)
            .map(|k| amplitude * (TAU * freq * k as f64 * dt).sin())
            .collect()
    }

    #[test]
    fn zero_input_zero_output() {
        assert!(BoucWen::default()
            .simulate(&[0.0; 100])
            .iter()
            .all(|&y| y == 0.0));
    }

    #[test]
    fn sinusoid_traces_a_closed_loop_with_area() {
        // Eight periods at 1 Hz; the last one repeats the one before.
        let period = 200;
        let n = 8 * period;
        let u = sine(30.0, 1.0, n + 1);
        let y = BoucWen::default().simulate(&u);
        for k in n - period..=n {
            assert!((y[k] - y[k - period]).abs() < 1e-2);
        }
        // Shoelace area over the last period.
        let area: f64 = (n - period..n)
            .map(|k| 0.5 * (u[k] * y[k + 1] - u[k + 1] * y[k]))
            .sum();
        assert!(area.abs() > 10.0, "loop area {area}");
    }

    #[test]
    fn step_refinement_changes_little() {
        let u: Vec<f64> = (0..10_000).map(|k| k as f64 / 9_999.0).collect();
        let plant = BoucWen::default();
        let coarse = plant.simulate(&u);
        let fine = plant.simulate_substeps(&u, 10);
        let worst = coarse
            .iter()
            .zip(&fine)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn inverse_law_reads() {
        let plant = BoucWen::default();
        assert!(plant.inverse(&[0.0; 50]).iter().all(|&m| m == 0.0));
        assert_eq!(plant.inverse(&[1.6])[0], 1.0);
    }

    #[test]
    fn inverse_law_tracks_reference() {
        let plant = BoucWen::default();
        let r = sine(30.0, 1.0, 600);
        let y = plant.simulate(&plant.inverse(&r));
        let worst = r
            .iter()
            .zip(&y)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(worst < 0.5, "{worst}");
    }
}
