use crate::error::{Error, Result};

/// Mean absolute error normalized by the target's range, in percent.
pub fn mape(target: &[f64], actual: &[f64]) -> Result<f64> {
    if target.len() != actual.len() {
        return Err(Error::LengthMismatch {
            left: target.len(),
            right: actual.len(),
        });
    }
    if target.len() < 2 {
        return Err(Error::InvalidArgument {
            name: "series",
            reason: "needs at least two samples",
        });
    }
    let (lo, hi) = target
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
            (lo.min(y), hi.max(y))
        });
    let range = hi - lo;
    if range == 0.0 {
        return Err(Error::DegenerateRange);
    }
    let total: f64 = target.iter().zip(actual).map(|(s, y)| (s - y).abs()).sum();
    Ok(100.0 * total / (target.len() as f64 * range))
}

/// Energy and spread of the compensation effort `|m - r|` over a window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Effort {
    /// Sum of squares of the effort.
    pub energy: f64,
    /// Population standard deviation of the effort.
    pub std_dev: f64,
}

/// Effort over the last `window` samples.
pub fn effort(inputs: &[f64], reference: &[f64], window: usize) -> Result<Effort> {
    if inputs.len() != reference.len() {
        return Err(Error::LengthMismatch {
            left: inputs.len(),
            right: reference.len(),
        });
    }
    if window == 0 || window > inputs.len() {
        return Err(Error::InvalidArgument {
            name: "window",
            reason: "must be between 1 and the series length",
        });
    }
    let start = inputs.len() - window;
    let delta = || {
        inputs[start..]
            .iter()
            .zip(&reference[start..])
            .map(|(m, r)| (m - r).abs())
    };
    let energy = delta().map(|d| d * d).sum();
    let mean = delta().sum::<f64>() / window as f64;
    let var = delta().map(|d| (d - mean) * (d - mean)).sum::<f64>() / window as f64;
    Ok(Effort {
        energy,
        std_dev: var.sqrt(),
    })
}
