use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{fmt_real, mean, pupe, run_trials, truncate_decoded, ExperimentConfig, ModeTrial, Scenario, Table, TrialResult};
use crate::channel::{ebn0_to_power, mimo_block_transmit, mimo_sensing_matrix, MimoChannelConfig};
use crate::error::Result;
use crate::mimo_activity::{decode_mimo, MimoDecodeOptions};
use crate::seeds::{Purpose, TrialSeeds};
use crate::tree_code::{DecodeMode, Message, ParityProfile, TreeCodebook};

#[derive(Debug, Clone)]
pub struct MimoSetup {
    pub profile: ParityProfile,
    pub block_len: usize,
    pub list_size: Option<usize>,
    pub list_extra: usize,
    pub ebn0_db: f64,
    pub noise_power: f64,
    pub options: MimoDecodeOptions,
    pub matrix_budget: u128,
    pub master_seed: u64,
}

impl MimoSetup {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate(Scenario::Mimo)?;
        Ok(MimoSetup {
            profile: cfg.profile_or_default(),
            block_len: cfg.block_len.expect("validated"),
            list_size: cfg.list_size,
            list_extra: cfg.list_extra,
            ebn0_db: cfg.ebn0_db.as_ref().expect("validated").values()[0],
            noise_power: cfg.noise_power,
            options: MimoDecodeOptions {
                activity: cfg.decoder.activity_options(),
                decode: cfg.decoder.decode_options(),
            },
            matrix_budget: cfg.decoder.matrix_budget,
            master_seed: cfg.master_seed,
        })
    }

    /// Per-symbol power fixed by the Eb/N0 convention.
    pub fn power(&self) -> f64 {
        ebn0_to_power(
            self.ebn0_db,
            self.profile.message_bits(),
            self.profile.sections(),
            self.block_len,
            self.noise_power,
        )
    }
}

/// One frame over `L` independent coherence blocks, decoded in each requested mode.
pub fn simulate_mimo_trial(setup: &MimoSetup, users: usize, antennas: usize, trial: usize, modes: &[DecodeMode]) -> Result<TrialResult> {
    let profile = &setup.profile;
    let sections = profile.sections();
    let point = ((users as u64) << 32) | antennas as u64;
    let seeds = TrialSeeds::new(setup.master_seed, point, trial as u64);
    let mut rng = seeds.rng(Purpose::Messages);
    let sent: Vec<Message> = (0..users).map(|_| Message::random(profile, &mut rng)).collect();
    let codebook = TreeCodebook::new(profile.clone(), seeds.seed(Purpose::Codebook));
    let encoded = sent.iter().map(|m| codebook.encode(m)).collect::<Result<Vec<_>>>()?;

    let power = setup.power();
    let dictionaries: Vec<DMatrix<Complex64>> = (0..sections)
        .map(|slot| {
            mimo_sensing_matrix(
                setup.block_len,
                profile.fragment_bits(slot),
                power,
                seeds.slot_seed(Purpose::Matrix, slot),
                setup.matrix_budget,
            )
        })
        .collect::<Result<_>>()?;
    let observations: Vec<DMatrix<Complex64>> = (0..sections)
        .map(|slot| {
            let indices: Vec<u64> = encoded.iter().map(|v| v[slot]).collect();
            let channel = MimoChannelConfig {
                antennas,
                noise_power: setup.noise_power,
                fading_seed: seeds.slot_seed(Purpose::Fading, slot),
                noise_seed: seeds.slot_seed(Purpose::Noise, slot),
            };
            mimo_block_transmit(&indices, &dictionaries[slot], &channel)
        })
        .collect::<Result<_>>()?;

    let list_size = setup.list_size.unwrap_or(users + setup.list_extra);
    let modes = modes
        .iter()
        .map(|&mode| {
            let start = Instant::now();
            let out = decode_mimo(&observations, &dictionaries, &codebook, setup.noise_power, list_size, mode, setup.options)?;
            let decode_time = start.elapsed();
            let mut decoded = out.decoded.messages;
            let truncated = truncate_decoded(&mut decoded, users);
            Ok(ModeTrial {
                mode,
                pupe: pupe(&sent, &decoded)?,
                decoded,
                truncated,
                columns: out.slots.iter().map(|s| s.active_columns).collect(),
                decode_time,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialResult { trial, sent, modes })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MimoPoint {
    pub users: usize,
    pub antennas: usize,
    pub mode: DecodeMode,
    pub trials: usize,
    pub pupe: f64,
    pub mean_support: Vec<f64>,
    pub mean_decode_ms: f64,
    /// Mean enhanced decode time over mean original decode time on the same trials.
    pub runtime_ratio: Option<f64>,
    pub trial_pupe: Vec<f64>,
}

pub fn mimo_header(sections: usize) -> Vec<String> {
    let mut header: Vec<String> = ["K", "M", "mode", "trials", "pupe"].map(String::from).to_vec();
    header.extend((1..=sections).map(|s| format!("mean_S_{s}")));
    header.push("runtime_ratio".into());
    header
}

pub fn run_mimo(cfg: &ExperimentConfig) -> Result<(Table, Vec<MimoPoint>)> {
    let setup = MimoSetup::from_config(cfg)?;
    let modes = cfg.mode.modes();
    let sections = setup.profile.sections();
    let mut points = Vec::new();
    for users in cfg.users.values() {
        for antennas in cfg.antennas.as_ref().expect("validated").values() {
            let results = run_trials(cfg.workers, cfg.trials, |t| simulate_mimo_trial(&setup, users, antennas, t, &modes))?;
            let time_of = |mode| mean(results.iter().filter_map(|r| r.mode(mode)).map(|m| m.decode_time.as_secs_f64()));
            let ratio = (modes.len() == 2).then(|| time_of(DecodeMode::Enhanced) / time_of(DecodeMode::Original));
            for &mode in &modes {
                let runs: Vec<&ModeTrial> = results.iter().filter_map(|r| r.mode(mode)).collect();
                points.push(MimoPoint {
                    users,
                    antennas,
                    mode,
                    trials: runs.len(),
                    pupe: mean(runs.iter().map(|r| r.pupe)),
                    mean_support: (0..sections).map(|s| mean(runs.iter().map(|r| r.columns[s] as f64))).collect(),
                    mean_decode_ms: mean(runs.iter().map(|r| r.decode_time.as_secs_f64() * 1e3)),
                    runtime_ratio: ratio,
                    trial_pupe: runs.iter().map(|r| r.pupe).collect(),
                });
            }
        }
    }
    let mut table = Table::new(mimo_header(sections));
    for p in &points {
        let mut row = vec![
            p.users.to_string(),
            p.antennas.to_string(),
            p.mode.as_str().to_string(),
            p.trials.to_string(),
            fmt_real(p.pupe),
        ];
        row.extend(p.mean_support.iter().map(|&c| fmt_real(c)));
        row.push(match (cfg.timing, p.runtime_ratio) {
            (true, Some(r)) => fmt_real(r),
            (false, Some(_)) => fmt_real(0.0),
            (_, None) => String::new(),
        });
        table.rows.push(row);
    }
    Ok((table, points))
}
