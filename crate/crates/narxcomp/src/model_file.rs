//! JSON model files.
//!
//! ```json
//! {"version": 1, "name": "heater", "ts": 12.0, "n_y": 2, "n_u": 2, "tau_d": 2, "ell": 2,
//!  "input_range": [0.0, 1.0], "output_range": [0.0, 0.5],
//!  "terms": [{"coeff": 0.8958185, "factors": [{"sig": "y", "lag": 1, "pow": 1}]}]}
//! ```

use std::fs;
use std::path::Path;

use narxcomp_core::narx::{Factor, Interval, NarxModel, Signal, Term};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalTag {
    Y,
    U,
    Phi1,
    Phi2,
}

impl From<SignalTag> for Signal {
    fn from(tag: SignalTag) -> Self {
        match tag {
            SignalTag::Y => Signal::Output,
            SignalTag::U => Signal::Input,
            SignalTag::Phi1 => Signal::InputIncrement,
            SignalTag::Phi2 => Signal::IncrementSign,
        }
    }
}

impl From<Signal> for SignalTag {
    fn from(signal: Signal) -> Self {
        match signal {
            Signal::Output => SignalTag::Y,
            Signal::Input => SignalTag::U,
            Signal::InputIncrement => SignalTag::Phi1,
            Signal::IncrementSign => SignalTag::Phi2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorEntry {
    pub sig: SignalTag,
    pub lag: u32,
    #[serde(default = "one")]
    pub pow: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermEntry {
    pub coeff: f64,
    pub factors: Vec<FactorEntry>,
}

/// On-disk form of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub version: u32,
    #[serde(default)]
    pub name: String,
    /// Sampling period in seconds.
    pub ts: f64,
    pub n_y: u32,
    pub n_u: u32,
    pub tau_d: u32,
    pub ell: u32,
    pub input_range: [f64; 2],
    pub output_range: [f64; 2],
    pub terms: Vec<TermEntry>,
}

/// A validated model with its metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedModel {
    pub name: String,
    pub sample_period: f64,
    pub model: NarxModel,
}

impl ModelFile {
    pub fn into_model(self) -> AppResult<LoadedModel> {
        if self.version != FORMAT_VERSION {
            return Err(AppError::config(format!(
                "version: expected {FORMAT_VERSION}, found {}",
                self.version
            )));
        }
        if !(self.ts > 0.0 && self.ts.is_finite()) {
            return Err(AppError::config("ts: must be a positive sampling period"));
        }
        let terms = self
            .terms
            .into_iter()
            .map(|t| {
                let factors = t
                    .factors
                    .into_iter()
                    .map(|f| Factor::new(f.sig.into(), f.lag, f.pow))
                    .collect();
                Term::new(t.coeff, factors)
            })
            .collect();
        let model = NarxModel {
            terms,
            max_output_lag: self.n_y,
            max_input_lag: self.n_u,
            delay: self.tau_d,
            degree: self.ell,
            input_range: Interval::new(self.input_range[0], self.input_range[1]),
            output_range: Interval::new(self.output_range[0], self.output_range[1]),
        };
        if let Err(violations) = model.validate() {
            let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
            return Err(AppError::config(format!("terms: {}", list.join("; "))));
        }
        Ok(LoadedModel {
            name: self.name,
            sample_period: self.ts,
            model,
        })
    }

    pub fn from_model(name: &str, sample_period: f64, model: &NarxModel) -> Self {
        Self {
            version: FORMAT_VERSION,
            name: name.to_owned(),
            ts: sample_period,
            n_y: model.max_output_lag,
            n_u: model.max_input_lag,
            tau_d: model.delay,
            ell: model.degree,
            input_range: [model.input_range.lo, model.input_range.hi],
            output_range: [model.output_range.lo, model.output_range.hi],
            terms: model
                .terms
                .iter()
                .map(|t| TermEntry {
                    coeff: t.coefficient,
                    factors: t
                        .factors
                        .iter()
                        .map(|f| FactorEntry {
                            sig: f.signal.into(),
                            lag: f.lag,
                            pow: f.power,
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

pub fn parse_model(json: &str) -> AppResult<LoadedModel> {
    let file: ModelFile =
        serde_json::from_str(json).map_err(|e| AppError::config(format!("model file: {e}")))?;
    file.into_model()
}

pub fn load_model(path: &Path) -> AppResult<LoadedModel> {
    let text = fs::read_to_string(path).map_err(|source| AppError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_model(&text).map_err(|e| match e {
        AppError::Config(msg) => AppError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn model_to_json(loaded: &LoadedModel) -> String {
    let file = ModelFile::from_model(&loaded.name, loaded.sample_period, &loaded.model);
    let mut out = serde_json::to_string_pretty(&file).expect("model files always serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEATER: &str = include_str!("../../../models/heater.json");

    #[test]
    fn heater_file_loads() {
        let m = parse_model(HEATER).unwrap();
        assert_eq!(m.sample_period, 12.0);
        assert_eq!(m.model.delay, 2);
        assert_eq!(m.model.terms.len(), 3);
        assert_eq!(m.model.terms[1].factors[0], Factor::input(2).pow(2));
    }

    #[test]
    fn json_round_trip() {
        let m = parse_model(HEATER).unwrap();
        assert_eq!(parse_model(&model_to_json(&m)).unwrap(), m);
    }

    #[test]
    fn bad_files_name_the_problem() {
        let unknown = HEATER.replacen("\"ell\"", "\"degree\"", 1);
        let err = parse_model(&unknown).unwrap_err().to_string();
        assert!(err.contains("degree"), "{err}");
        let bad_lag = HEATER.replacen("\"lag\": 2", "\"lag\": 0", 1);
        let err = parse_model(&bad_lag).unwrap_err().to_string();
        assert!(err.contains("terms"), "{err}");
        let version = HEATER.replacen("\"version\": 1", "\"version\": 7", 1);
        assert!(parse_model(&version)
            .unwrap_err()
            .to_string()
            .contains("version"));
    }
}
