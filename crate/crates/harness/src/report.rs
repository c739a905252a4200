//! Report envelopes and their JSON/CSV rendering.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Wall-clock seconds per named phase. Kept apart from the results so that
/// reports can be compared byte for byte with this object removed.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Timing(BTreeMap<String, f64>);

impl Timing {
    pub fn time<T>(&mut self, name: impl Into<String>, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0.insert(name.into(), start.elapsed().as_secs_f64());
        out
    }

    pub fn record(&mut self, name: impl Into<String>, seconds: f64) {
        self.0.insert(name.into(), seconds);
    }

    /// Adds the time of `f` to the running total for `name`.
    pub fn accumulate<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.0.entry(name.to_string()).or_insert(0.0) += start.elapsed().as_secs_f64();
        out
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }
}

/// Results that also flatten into long-format CSV rows.
pub trait Tabular {
    type Row: Serialize;
    fn rows(&self) -> Vec<Self::Row>;
}

#[derive(Debug, Serialize)]
pub struct Report<'a, T> {
    pub command: &'a str,
    pub version: &'a str,
    pub config: &'a ExperimentConfig,
    pub results: &'a T,
    pub timing: &'a Timing,
}

impl<'a, T: Serialize + Tabular> Report<'a, T> {
    pub fn new(command: &'a str, config: &'a ExperimentConfig, results: &'a T, timing: &'a Timing) -> Self {
        Self {
            command,
            version: bilinop_core::VERSION,
            config,
            results,
            timing,
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self)?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for row in self.results.rows() {
                    w.serialize(row)?;
                }
                let bytes = w.into_inner().map_err(|e| e.into_error())?;
                Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
            }
        }
    }
}

/// Drops the top-level `timing` object of a rendered JSON report.
pub fn without_timing(json: &str) -> Result<serde_json::Value> {
    let mut v: serde_json::Value = serde_json::from_str(json)?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove("timing");
    }
    Ok(v)
}
