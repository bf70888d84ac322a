//! Seeded Monte Carlo experiments and their CSV tables.

mod config;
mod mimo;
mod predict;
mod siso;

use std::collections::HashSet;
use std::time::Duration;

pub use config::{DecoderConfig, ExperimentConfig, ModeSelection, Range, Scenario, SearchConfig};
pub use mimo::{run_mimo, simulate_mimo_trial, MimoPoint, MimoSetup};
pub use predict::run_predict;
pub use siso::{run_siso, simulate_siso_trial, SisoPoint, SisoSetup};

use crate::error::{Error, Result};
use crate::tree_code::{DecodeMode, Message};

/// Per-user probability of error of one trial.
pub fn pupe(sent: &[Message], decoded: &[Message]) -> Result<f64> {
    if sent.is_empty() {
        return Err(Error::invalid("PUPE needs at least one active user"));
    }
    if decoded.len() > sent.len() {
        return Err(Error::invalid(format!(
            "{} decoded messages for {} users; truncate first",
            decoded.len(),
            sent.len()
        )));
    }
    let found: HashSet<&Message> = decoded.iter().collect();
    let missed = sent.iter().filter(|m| !found.contains(m)).count();
    Ok(missed as f64 / sent.len() as f64)
}

/// Keeps the first `users` messages, which come in root confidence order.
/// Returns how many were dropped.
pub fn truncate_decoded(decoded: &mut Vec<Message>, users: usize) -> usize {
    let dropped = decoded.len().saturating_sub(users);
    decoded.truncate(users);
    dropped
}

/// Outcome of one decoding mode within a trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeTrial {
    pub mode: DecodeMode,
    pub decoded: Vec<Message>,
    pub truncated: usize,
    pub pupe: f64,
    /// Searched columns (SISO) or `|S_ℓ|` (MIMO) per slot.
    pub columns: Vec<u64>,
    pub decode_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub sent: Vec<Message>,
    pub modes: Vec<ModeTrial>,
}

impl TrialResult {
    pub fn mode(&self, mode: DecodeMode) -> Option<&ModeTrial> {
        self.modes.iter().find(|m| m.mode == mode)
    }
}

/// A CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            writer.write_record(row).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("ASCII CSV")
    }
}

/// Fixed 17-significant-digit formatting.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

pub(crate) fn run_trials<T, F>(workers: Option<usize>, trials: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    use rayon::prelude::*;
    let work = || (0..trials).into_par_iter().map(&f).collect::<Result<Vec<T>>>();
    match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}
