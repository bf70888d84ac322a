use std::path::PathBuf;

use serde::Deserialize;

use crate::analysis::default_siso_profile;
use crate::ccs_siso::{NnlsOptions, DEFAULT_MATRIX_BUDGET};
use crate::error::{Error, Result};
use crate::mimo_activity::ActivityOptions;
use crate::tree_code::{DecodeMode, DecodeOptions, ParityProfile, DEFAULT_PATH_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Siso,
    Mimo,
    Predict,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Siso => "siso",
            Scenario::Mimo => "mimo",
            Scenario::Predict => "predict",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModeSelection {
    Original,
    Enhanced,
    #[default]
    Both,
}

impl ModeSelection {
    pub fn modes(self) -> Vec<DecodeMode> {
        match self {
            ModeSelection::Original => vec![DecodeMode::Original],
            ModeSelection::Enhanced => vec![DecodeMode::Enhanced],
            ModeSelection::Both => vec![DecodeMode::Original, DecodeMode::Enhanced],
        }
    }
}

/// Either an explicit list or an inclusive arithmetic range.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Range<T> {
    List(Vec<T>),
    Span { start: T, end: T, step: T },
}

impl Range<usize> {
    pub fn values(&self) -> Vec<usize> {
        match self {
            Range::List(v) => v.clone(),
            Range::Span { start, end, step } if *step > 0 => (*start..=*end).step_by(*step).collect(),
            Range::Span { .. } => Vec::new(),
        }
    }
}

impl Range<f64> {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Range::List(v) => v.clone(),
            Range::Span { start, end, step } if *step > 0.0 => {
                let count = ((end - start) / step + 1e-9).floor() as usize;
                (0..=count).map(|i| start + i as f64 * step).collect()
            }
            Range::Span { .. } => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderConfig {
    #[serde(default = "default_path_cap")]
    pub path_cap: usize,
    #[serde(default)]
    pub force_full_patterns: bool,
    #[serde(default = "default_kkt_tol")]
    pub nnls_kkt_tol: f64,
    pub nnls_max_iterations: Option<usize>,
    #[serde(default = "default_sweeps")]
    pub sweeps: usize,
    #[serde(default = "default_activity_tol")]
    pub activity_tol: f64,
    #[serde(default = "default_budget")]
    pub matrix_budget: u128,
}

fn default_path_cap() -> usize {
    DEFAULT_PATH_CAP
}
fn default_kkt_tol() -> f64 {
    1e-8
}
fn default_sweeps() -> usize {
    10
}
fn default_activity_tol() -> f64 {
    1e-6
}
fn default_budget() -> u128 {
    DEFAULT_MATRIX_BUDGET
}
fn default_true() -> bool {
    true
}
fn default_noise_power() -> f64 {
    1.0
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            path_cap: default_path_cap(),
            force_full_patterns: false,
            nnls_kkt_tol: default_kkt_tol(),
            nnls_max_iterations: None,
            sweeps: default_sweeps(),
            activity_tol: default_activity_tol(),
            matrix_budget: default_budget(),
        }
    }
}

impl DecoderConfig {
    pub fn decode_options(&self) -> DecodeOptions {
        DecodeOptions {
            path_cap: self.path_cap,
            force_full_patterns: self.force_full_patterns,
        }
    }

    pub fn nnls_options(&self) -> NnlsOptions {
        NnlsOptions {
            kkt_tol: self.nnls_kkt_tol,
            max_iterations: self.nnls_max_iterations,
        }
    }

    pub fn activity_options(&self) -> ActivityOptions {
        ActivityOptions {
            max_sweeps: self.sweeps,
            tol: self.activity_tol,
            ..ActivityOptions::default()
        }
    }
}

/// Bisection for the smallest Eb/N0 reaching a target PUPE.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub target_pupe: f64,
    pub low_db: f64,
    pub high_db: f64,
    #[serde(default = "default_resolution")]
    pub resolution_db: f64,
}

fn default_resolution() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Option<Scenario>,
    pub users: Range<usize>,
    pub antennas: Option<Range<usize>>,
    pub ebn0_db: Option<Range<f64>>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub profile: Option<ParityProfile>,
    /// Channel uses per slot or coherence block.
    pub block_len: Option<usize>,
    /// Fixed list size; defaults to `K + list_extra`.
    pub list_size: Option<usize>,
    #[serde(default)]
    pub list_extra: usize,
    #[serde(default)]
    pub mode: ModeSelection,
    #[serde(default)]
    pub master_seed: u64,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
    /// Record wall-clock columns; off makes every CSV byte reproducible.
    #[serde(default = "default_true")]
    pub timing: bool,
    #[serde(default = "default_noise_power")]
    pub noise_power: f64,
    #[serde(default)]
    pub decoder: DecoderConfig,
    pub search: Option<SearchConfig>,
}

fn default_trials() -> usize {
    1
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| text[s].lines().next().unwrap_or_default().to_string())
                .unwrap_or_default();
            Error::config(field, e.message().to_string())
        })
    }

    /// Minimal configuration for a scenario; every optional field at its default.
    pub fn new(scenario: Scenario, users: Vec<usize>) -> Self {
        ExperimentConfig {
            scenario: Some(scenario),
            users: Range::List(users),
            antennas: None,
            ebn0_db: None,
            trials: 1,
            profile: None,
            block_len: None,
            list_size: None,
            list_extra: 0,
            mode: ModeSelection::Both,
            master_seed: 0,
            output: None,
            workers: None,
            timing: true,
            noise_power: 1.0,
            decoder: DecoderConfig::default(),
            search: None,
        }
    }

    pub fn list_size(&self, users: usize) -> usize {
        self.list_size.unwrap_or(users + self.list_extra)
    }

    pub fn profile_or_default(&self) -> ParityProfile {
        self.profile.clone().unwrap_or_else(default_siso_profile)
    }

    /// Checks the fields a scenario needs; reports the offending field by name.
    pub fn validate(&self, scenario: Scenario) -> Result<()> {
        if let Some(s) = self.scenario {
            if s != scenario {
                return Err(Error::config(
                    "scenario",
                    format!("config is for `{}` but `{}` was requested", s.as_str(), scenario.as_str()),
                ));
            }
        }
        let users = self.users.values();
        if users.is_empty() {
            return Err(Error::config("users", "range is empty"));
        }
        if users.contains(&0) {
            return Err(Error::config("users", "K must be at least 1"));
        }
        if scenario == Scenario::Predict {
            return Ok(());
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "need at least one trial"));
        }
        if self.profile.is_none() {
            return Err(Error::config("profile", "required for simulations"));
        }
        match self.block_len {
            None => return Err(Error::config("block_len", "required for simulations")),
            Some(0) => return Err(Error::config("block_len", "must be at least 1")),
            Some(_) => {}
        }
        if self.list_size == Some(0) {
            return Err(Error::config("list_size", "must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(Error::config("workers", "must be at least 1"));
        }
        if self.decoder.sweeps == 0 {
            return Err(Error::config("decoder.sweeps", "must be at least 1"));
        }
        let ebn0 = self.ebn0_db.as_ref().map(|r| r.values()).unwrap_or_default();
        match scenario {
            Scenario::Siso => {
                if ebn0.is_empty() && self.search.is_none() {
                    return Err(Error::config("ebn0_db", "give a sweep or a [search] section"));
                }
                if let Some(s) = &self.search {
                    if s.low_db >= s.high_db || s.low_db.is_nan() || s.high_db.is_nan() || s.resolution_db <= 0.0 {
                        return Err(Error::config("search", "need low_db < high_db and resolution_db > 0"));
                    }
                    if !(0.0..=1.0).contains(&s.target_pupe) {
                        return Err(Error::config("search.target_pupe", "must lie in [0, 1]"));
                    }
                }
            }
            Scenario::Mimo => {
                if ebn0.len() != 1 {
                    return Err(Error::config("ebn0_db", "MIMO runs take exactly one Eb/N0"));
                }
                let antennas = self.antennas.as_ref().map(|r| r.values()).unwrap_or_default();
                if antennas.is_empty() || antennas.contains(&0) {
                    return Err(Error::config("antennas", "need a nonempty list of M >= 1"));
                }
                if self.noise_power <= 0.0 {
                    return Err(Error::config("noise_power", "must be positive"));
                }
                if self.search.is_some() {
                    return Err(Error::config("search", "only supported for siso"));
                }
            }
            Scenario::Predict => unreachable!(),
        }
        Ok(())
    }
}
