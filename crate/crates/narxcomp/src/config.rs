//! Optional TOML experiment files. Every key mirrors a command-line flag;
//! flags given on the command line win.
//!
//! ```toml
//! model = "models/bw.json"
//! plant = "bouc_wen"
//! signal = "sine:G0=30,f=2,phase=1.5708"
//! mode = "hysteresis"
//! output = "bw_run.csv"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: Option<PathBuf>,
    pub plant: Option<String>,
    pub signal: Option<String>,
    pub mode: Option<String>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub runs: Option<usize>,
    pub rel_std: Option<f64>,
    pub n: Option<usize>,
    pub settle: Option<usize>,
    pub grid: Option<String>,
    pub experiment: Option<String>,
    pub loop_amplitude: Option<f64>,
    pub loop_frequency: Option<f64>,
    pub loop_center: Option<f64>,
    pub models_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> AppResult<Self> {
        toml::from_str(text).map_err(|e| AppError::config(format!("config: {}", e.message())))
    }

    /// Reads a config file; relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| AppError::Io {
            path: path.to_owned(),
            source,
        })?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.model, &mut cfg.output, &mut cfg.models_dir]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Flag value, else config value, else an error naming the key.
pub fn require<T>(flag: Option<T>, config: Option<T>, key: &str) -> AppResult<T> {
    flag.or(config).ok_or_else(|| {
        AppError::config(format!(
            "missing `{key}` (flag --{} or config key)",
            key.replace('_', "-")
        ))
    })
}

/// Parses `lo:hi:count` into `count` evenly spaced points, ends included.
pub fn parse_grid(text: &str) -> AppResult<Vec<f64>> {
    let bad = || AppError::config(format!("grid: expected lo:hi:count, found `{text}`"));
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let [lo, hi, count] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    let count: usize = count.parse().map_err(|_| bad())?;
    match count {
        0 => Err(bad()),
        1 => Ok(vec![lo]),
        _ => Ok((0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys() {
        let cfg =
            ExperimentConfig::parse("model = \"m.json\"\nseed = 3\nrel_std = 0.005\n").unwrap();
        assert_eq!(cfg.model, Some(PathBuf::from("m.json")));
        assert_eq!(cfg.seed, Some(3));
        assert_eq!(cfg.rel_std, Some(0.005));
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ExperimentConfig::parse("modle = \"m.json\"\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("modle"), "{err}");
    }

    #[test]
    fn relative_paths_follow_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.toml");
        std::fs::write(&path, "model = \"heater.json\"\n").unwrap();
        let cfg = ExperimentConfig::load(&path).unwrap();
        assert_eq!(cfg.model.unwrap(), dir.path().join("heater.json"));
    }

    #[test]
    fn flags_win_over_config() {
        assert_eq!(require(Some(1), Some(2), "seed").unwrap(), 1);
        assert_eq!(require(None, Some(2), "seed").unwrap(), 2);
        let err = require::<u64>(None, None, "rel_std")
            .unwrap_err()
            .to_string();
        assert!(
            err.contains("rel_std") && err.contains("--rel-std"),
            "{err}"
        );
    }

    #[test]
    fn grids() {
        assert_eq!(
            parse_grid("0:1:5").unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        assert_eq!(parse_grid("0.3:1:1").unwrap(), vec![0.3]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }
}
