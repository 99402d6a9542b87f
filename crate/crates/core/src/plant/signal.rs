use alloc::vec::Vec;
use core::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Waveform {
    Sine,
    /// Staircase of `levels` equally spaced values from `offset` to
    /// `offset + amplitude`, climbing once per period.
    Steps {
        levels: usize,
    },
    /// Sine frozen at its value at sample `hold_at`.
    SineThenHold {
        hold_at: usize,
    },
}

/// `offset + amplitude * sin(2 pi f k Ts + phase)` and variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalSpec {
    pub waveform: Waveform,
    pub amplitude: f64,
    /// Hz, or cycles per sample when `Ts = 1`.
    pub frequency: f64,
    /// Radians.
    pub phase: f64,
    pub offset: f64,
}

impl SignalSpec {
    pub fn sine(amplitude: f64, frequency: f64, phase: f64, offset: f64) -> Self {
        Self {
            waveform: Waveform::Sine,
            amplitude,
            frequency,
            phase,
            offset,
        }
    }

    pub fn constant(value: f64) -> Self {
        Self::sine(0.0, 1.0, 0.0, value)
    }

    /// Samples per period, rounded.
    pub fn period_samples(&self, sample_period: f64) -> usize {
        (1.0 / (self.frequency * sample_period)).round() as usize
    }

    /// Value at sample `k`.
    pub fn value(&self, k: i64, sample_period: f64) -> f64 {
        let angle = |k: i64| TAU * self.frequency * k as f64 * sample_period + self.phase;
        match self.waveform {
            Waveform::Sine => self.offset + self.amplitude * angle(k).sin(),
            Waveform::SineThenHold { hold_at } => {
                let k = k.min(hold_at as i64);
                self.offset + self.amplitude * angle(k).sin()
            }
            Waveform::Steps { levels } => {
                if levels < 2 {
                    return self.offset;
                }
                let cycles = angle(k) / TAU;
                let frac = cycles - cycles.floor();
                let level = ((frac * levels as f64) as usize).min(levels - 1);
                self.offset + self.amplitude * level as f64 / (levels - 1) as f64
            }
        }
    }

    /// Samples `k = 0 .. n`.
    pub fn generate(&self, n: usize, sample_period: f64) -> Vec<f64> {
        self.generate_from(0, n, sample_period)
    }

    /// Samples `k = start .. start + n`.
    pub fn generate_from(&self, start: i64, n: usize, sample_period: f64) -> Vec<f64> {
        (0..n as i64)
            .map(|i| self.value(start + i, sample_period))
            .collect()
    }
}
