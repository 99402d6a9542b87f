//! Signal descriptions such as `sine:G0=30,f=2,phase=1.5708`.
//!
//! Kinds: `sine`, `steps` (needs `levels`), `hold` (sine frozen at `hold_at`)
//! and `const:<value>`. Keys: amplitude (`A`, `G`, `G0`, `amp`), frequency
//! (`f`, `freq`), `phase` in radians, `offset` (or `u0`), `levels`, `hold_at`.

use narxcomp_core::plant::{SignalSpec, Waveform};

pub fn parse_signal(text: &str) -> Result<SignalSpec, String> {
    let (kind, params) = text.split_once(':').unwrap_or((text, ""));
    let kind = kind.trim().to_ascii_lowercase();
    if kind == "const" {
        let v: f64 = params
            .trim()
            .parse()
            .map_err(|_| format!("signal: `{params}` is not a number"))?;
        return Ok(SignalSpec::constant(v));
    }
    let mut spec = SignalSpec::sine(0.0, f64::NAN, 0.0, 0.0);
    let mut levels = None;
    let mut hold_at = None;
    for pair in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("signal: expected key=value, found `{pair}`"))?;
        let key = key.trim();
        let number = || {
            value
                .trim()
                .parse::<f64>()
                .map_err(|_| format!("signal: {key} = `{value}` is not a number"))
        };
        let count = || {
            value
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("signal: {key} = `{value}` is not a count"))
        };
        match key {
            "A" | "G" | "G0" | "amp" | "amplitude" => spec.amplitude = number()?,
            "f" | "freq" | "frequency" => spec.frequency = number()?,
            "phase" => spec.phase = number()?,
            "offset" | "u0" => spec.offset = number()?,
            "levels" => levels = Some(count()?),
            "hold_at" => hold_at = Some(count()?),
            _ => return Err(format!("signal: unknown key `{key}`")),
        }
    }
    if !(spec.frequency > 0.0 && spec.frequency.is_finite()) {
        return Err("signal: f must be given and positive".into());
    }
    spec.waveform = match kind.as_str() {
        "sine" => Waveform::Sine,
        "steps" => Waveform::Steps {
            levels: levels.ok_or("signal: steps need levels")?,
        },
        "hold" => Waveform::SineThenHold {
            hold_at: hold_at.ok_or("signal: hold needs hold_at")?,
        },
        other => return Err(format!("signal: unknown kind `{other}`")),
    };
    Ok(spec)
}
