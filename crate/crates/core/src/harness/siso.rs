use std::time::Instant;

use super::{fmt_real, mean, pupe, run_trials, truncate_decoded, ExperimentConfig, ModeTrial, Scenario, Table, TrialResult};
use crate::ccs_siso::{decode_siso, SensingMatrix, SisoDecodeOptions};
use crate::channel::{ebn0_to_amplitude, gmac_transmit, SisoChannelConfig};
use crate::error::Result;
use crate::seeds::{Purpose, TrialSeeds};
use crate::tree_code::{DecodeMode, Message, ParityProfile, TreeCodebook};

/// Everything a SISO trial needs besides `(K, Eb/N0, trial)`.
#[derive(Debug, Clone)]
pub struct SisoSetup {
    pub profile: ParityProfile,
    pub block_len: usize,
    pub list_size: Option<usize>,
    pub list_extra: usize,
    pub options: SisoDecodeOptions,
    pub matrix_budget: u128,
    pub master_seed: u64,
}

impl SisoSetup {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate(Scenario::Siso)?;
        Ok(SisoSetup {
            profile: cfg.profile_or_default(),
            block_len: cfg.block_len.expect("validated"),
            list_size: cfg.list_size,
            list_extra: cfg.list_extra,
            options: SisoDecodeOptions {
                nnls: cfg.decoder.nnls_options(),
                decode: cfg.decoder.decode_options(),
            },
            matrix_budget: cfg.decoder.matrix_budget,
            master_seed: cfg.master_seed,
        })
    }

    fn list_size(&self, users: usize) -> usize {
        self.list_size.unwrap_or(users + self.list_extra)
    }
}

/// One frame: draw messages, codebook, dictionaries and noise, then decode in each mode.
///
/// All randomness is keyed by `(master_seed, K, trial)`, so every mode and every
/// Eb/N0 of a trial share the same realizations up to the amplitude.
pub fn simulate_siso_trial(setup: &SisoSetup, users: usize, ebn0_db: f64, trial: usize, modes: &[DecodeMode]) -> Result<TrialResult> {
    let profile = &setup.profile;
    let sections = profile.sections();
    let seeds = TrialSeeds::new(setup.master_seed, users as u64, trial as u64);
    let mut rng = seeds.rng(Purpose::Messages);
    let sent: Vec<Message> = (0..users).map(|_| Message::random(profile, &mut rng)).collect();
    let codebook = TreeCodebook::new(profile.clone(), seeds.seed(Purpose::Codebook));
    let encoded = sent.iter().map(|m| codebook.encode(m)).collect::<Result<Vec<_>>>()?;

    let matrices = (0..sections)
        .map(|slot| {
            SensingMatrix::gaussian(
                setup.block_len,
                profile.fragment_bits(slot),
                seeds.slot_seed(Purpose::Matrix, slot),
                setup.matrix_budget,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let amplitude = ebn0_to_amplitude(ebn0_db, profile.message_bits(), sections);
    let observations = (0..sections)
        .map(|slot| {
            let signals: Vec<Vec<f64>> = encoded
                .iter()
                .map(|v| matrices[slot].column(v[slot] as usize).to_vec())
                .collect();
            let channel = SisoChannelConfig::new(amplitude, seeds.slot_seed(Purpose::Noise, slot));
            gmac_transmit(setup.block_len, &signals, &channel)
        })
        .collect::<Result<Vec<_>>>()?;

    let list_size = setup.list_size(users);
    let modes = modes
        .iter()
        .map(|&mode| {
            let start = Instant::now();
            let out = decode_siso(&observations, &matrices, &codebook, list_size, mode, setup.options)?;
            let decode_time = start.elapsed();
            let mut decoded = out.outcome.decoded.messages;
            let truncated = truncate_decoded(&mut decoded, users);
            Ok(ModeTrial {
                mode,
                pupe: pupe(&sent, &decoded)?,
                decoded,
                truncated,
                columns: out.outcome.slots.iter().map(|s| s.active_columns).collect(),
                decode_time,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialResult { trial, sent, modes })
}

/// Aggregate of one `(K, Eb/N0, mode)` combination.
#[derive(Debug, Clone, PartialEq)]
pub struct SisoPoint {
    pub users: usize,
    pub ebn0_db: f64,
    pub mode: DecodeMode,
    pub trials: usize,
    pub pupe: f64,
    pub mean_columns: Vec<f64>,
    pub mean_decode_ms: f64,
    pub trial_pupe: Vec<f64>,
}

fn aggregate(users: usize, ebn0_db: f64, mode: DecodeMode, results: &[TrialResult], sections: usize) -> SisoPoint {
    let runs: Vec<&ModeTrial> = results.iter().filter_map(|r| r.mode(mode)).collect();
    SisoPoint {
        users,
        ebn0_db,
        mode,
        trials: runs.len(),
        pupe: mean(runs.iter().map(|r| r.pupe)),
        mean_columns: (0..sections).map(|s| mean(runs.iter().map(|r| r.columns[s] as f64))).collect(),
        mean_decode_ms: mean(runs.iter().map(|r| r.decode_time.as_secs_f64() * 1e3)),
        trial_pupe: runs.iter().map(|r| r.pupe).collect(),
    }
}

fn run_point(cfg: &ExperimentConfig, setup: &SisoSetup, users: usize, ebn0_db: f64, modes: &[DecodeMode]) -> Result<Vec<SisoPoint>> {
    let results = run_trials(cfg.workers, cfg.trials, |t| simulate_siso_trial(setup, users, ebn0_db, t, modes))?;
    let sections = setup.profile.sections();
    Ok(modes.iter().map(|&m| aggregate(users, ebn0_db, m, &results, sections)).collect())
}

/// Smallest Eb/N0 on the search grid whose PUPE meets the target, by bisection.
fn required_ebn0(cfg: &ExperimentConfig, setup: &SisoSetup, users: usize, mode: DecodeMode) -> Result<SisoPoint> {
    let search = cfg.search.as_ref().expect("search mode");
    let eval = |db: f64| -> Result<SisoPoint> { Ok(run_point(cfg, setup, users, db, &[mode])?.remove(0)) };
    let mut hi = eval(search.high_db)?;
    if hi.pupe > search.target_pupe {
        return Ok(hi);
    }
    let mut lo_db = search.low_db;
    while hi.ebn0_db - lo_db > search.resolution_db {
        let mid = 0.5 * (lo_db + hi.ebn0_db);
        let point = eval(mid)?;
        if point.pupe <= search.target_pupe {
            hi = point;
        } else {
            lo_db = mid;
        }
    }
    Ok(hi)
}

pub fn siso_header(sections: usize) -> Vec<String> {
    let mut header: Vec<String> = ["K", "ebn0_db", "mode", "trials", "pupe"].map(String::from).to_vec();
    header.extend((1..=sections).map(|s| format!("mean_cols_slot_{s}")));
    header.push("mean_decode_ms".into());
    header
}

pub fn run_siso(cfg: &ExperimentConfig) -> Result<(Table, Vec<SisoPoint>)> {
    let setup = SisoSetup::from_config(cfg)?;
    let modes = cfg.mode.modes();
    let mut points = Vec::new();
    for users in cfg.users.values() {
        if cfg.search.is_some() {
            for &mode in &modes {
                points.push(required_ebn0(cfg, &setup, users, mode)?);
            }
        } else {
            for db in cfg.ebn0_db.as_ref().expect("validated").values() {
                points.extend(run_point(cfg, &setup, users, db, &modes)?);
            }
        }
    }
    let mut table = Table::new(siso_header(setup.profile.sections()));
    for p in &points {
        let mut row = vec![
            p.users.to_string(),
            fmt_real(p.ebn0_db),
            p.mode.as_str().to_string(),
            p.trials.to_string(),
            fmt_real(p.pupe),
        ];
        row.extend(p.mean_columns.iter().map(|&c| fmt_real(c)));
        row.push(fmt_real(if cfg.timing { p.mean_decode_ms } else { 0.0 }));
        table.rows.push(row);
    }
    Ok((table, points))
}
