//! Numeric CSV output with a fixed 12-significant-digit format.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{AppError, AppResult};

const SIGNIFICANT: i32 = 12;

/// Formats `v` in plain decimal notation with 12 significant digits.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (SIGNIFICANT - 1 - magnitude).clamp(0, 40) as usize;
    format!("{v:.decimals$}")
}

/// A header plus rows of numbers, with optional text columns on the right.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    header: Vec<String>,
    body: String,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|s| s.as_ref().to_owned()).collect(),
            body: String::new(),
        }
    }

    pub fn push(&mut self, row: &[f64]) {
        self.push_mixed(row, &[]);
    }

    /// A row led by an integer sample index.
    pub fn push_indexed(&mut self, index: usize, numbers: &[f64]) {
        debug_assert_eq!(numbers.len() + 1, self.header.len());
        self.body.push_str(&index.to_string());
        for &v in numbers {
            self.body.push(',');
            self.body.push_str(&format_number(v));
        }
        self.body.push('\n');
    }

    /// A row of numbers followed by text fields.
    pub fn push_mixed(&mut self, numbers: &[f64], text: &[&str]) {
        debug_assert_eq!(numbers.len() + text.len(), self.header.len());
        let fields = numbers
            .iter()
            .map(|&v| format_number(v))
            .chain(text.iter().map(|s| (*s).to_owned()));
        for (i, f) in fields.enumerate() {
            if i > 0 {
                self.body.push(',');
            }
            self.body.push_str(&f);
        }
        self.body.push('\n');
    }

    pub fn render(&self) -> String {
        let mut out = String::with_capacity(self.body.len() + 64);
        let _ = writeln!(out, "{}", self.header.join(","));
        out.push_str(&self.body);
        out
    }
}

/// Writes `content` to `path` through a sibling temporary file, so a failed
/// run never leaves a partial output behind.
pub fn write_atomic(path: &Path, content: &str) -> AppResult<()> {
    let io_err = |source| AppError::Io {
        path: path.to_owned(),
        source,
    };
    let file_name = path.file_name().ok_or_else(|| {
        AppError::config(format!("output: {} is not a file path", path.display()))
    })?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".partial");
    let tmp = path.with_file_name(tmp_name);
    let result = fs::File::create(&tmp)
        .and_then(|mut f| {
            f.write_all(content.as_bytes())?;
            f.sync_all()
        })
        .and_then(|()| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(io_err(e));
    }
    Ok(())
}
