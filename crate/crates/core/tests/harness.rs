use std::process::Command;

use ccs_ura::harness::{pupe, run_mimo, run_predict, run_siso, ExperimentConfig, Range, Scenario};
use ccs_ura::tree_code::{Message, ParityProfile};

fn siso_config() -> ExperimentConfig {
    ExperimentConfig::from_toml(
        r#"
scenario = "siso"
users = [2, 3]
ebn0_db = [6.0, 10.0]
trials = 6
block_len = 32
profile = { info = [6, 5, 5], parity = [0, 1, 5] }
master_seed = 17
timing = false
"#,
    )
    .unwrap()
}

fn mimo_config() -> ExperimentConfig {
    ExperimentConfig::from_toml(
        r#"
scenario = "mimo"
users = [2]
antennas = [16, 32]
ebn0_db = [0.0]
trials = 5
block_len = 8
profile = { info = [4, 3, 0], parity = [0, 1, 3] }
master_seed = 3
timing = false
"#,
    )
    .unwrap()
}

#[test]
fn pupe_counts_missing_senders() {
    let profile = ParityProfile::new(vec![2, 2], vec![0, 1]).unwrap();
    let m = |a, b| Message::from_bits(&profile, &[a, b, false, true]).unwrap();
    let sent = vec![m(false, false), m(false, true), m(true, true)];
    assert_eq!(pupe(&sent, &[]).unwrap(), 1.0);
    assert!((pupe(&sent, &[m(false, true)]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    assert_eq!(pupe(&sent, &sent).unwrap(), 0.0);
    assert!(pupe(&[], &[]).is_err());
}

#[test]
fn siso_tables_are_reproducible() {
    let cfg = siso_config();
    let (a, points) = run_siso(&cfg).unwrap();
    let (b, _) = run_siso(&cfg).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(points.len(), 2 * 2 * 2);
    assert_eq!(a.header.len(), 5 + 3 + 1);
    let mut other = cfg.clone();
    other.workers = Some(3);
    assert_eq!(run_siso(&other).unwrap().0.to_csv(), a.to_csv());
}

#[test]
fn timing_only_touches_timing_columns() {
    let cfg = siso_config();
    let mut timed = cfg.clone();
    timed.timing = true;
    let (a, _) = run_siso(&cfg).unwrap();
    let (b, _) = run_siso(&timed).unwrap();
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        assert_eq!(ra[..ra.len() - 1], rb[..rb.len() - 1]);
    }
}

#[test]
fn mimo_tables_are_reproducible() {
    let cfg = mimo_config();
    let (a, points) = run_mimo(&cfg).unwrap();
    assert_eq!(a.to_csv(), run_mimo(&cfg).unwrap().0.to_csv());
    assert_eq!(points.len(), 4);
    assert!(points.iter().all(|p| p.runtime_ratio.is_some()));
}

#[test]
fn predict_table_has_one_row_per_slot_and_variant() {
    let mut cfg = ExperimentConfig::new(Scenario::Predict, Vec::new());
    cfg.users = Range::Span { start: 25, end: 150, step: 5 };
    let table = run_predict(&cfg).unwrap();
    assert_eq!(table.rows.len(), 26 * 11 * 2);
    assert_eq!(table.header, ["K", "slot", "variant", "E_L", "P", "P_patterns", "R"]);
    assert_eq!(table.rows[0][..3], ["25", "1", "full"]);
}

#[test]
fn missing_fields_are_named() {
    let mut cfg = siso_config();
    cfg.block_len = None;
    match run_siso(&cfg) {
        Err(ccs_ura::Error::Config { field, .. }) => assert_eq!(field, "block_len"),
        other => panic!("expected a config error, got {other:?}"),
    }
}

fn ura() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ura"))
}

#[test]
fn cli_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("siso.toml");
    std::fs::write(
        &config,
        "scenario = \"siso\"\nusers = [2]\nebn0_db = [8.0]\ntrials = 4\nblock_len = 32\nmaster_seed = 5\n\
         profile = { info = [6, 5, 5], parity = [0, 1, 5] }\n",
    )
    .unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = ura()
            .args(["siso", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .args(["--no-timing", "--seed", "11"])
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let first = run("a.csv");
    assert_eq!(first, run("b.csv"));
    assert!(String::from_utf8(first).unwrap().starts_with("K,ebn0_db,mode,trials,pupe,"));
}

#[test]
fn cli_predict_needs_no_config() {
    let out = ura().arg("predict").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 26 * 11 * 2);
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "scenario = \"siso\"\nusers = [2]\nbogus = 1\n").unwrap();
    assert_eq!(ura().args(["siso", "--config"]).arg(&bad).output().unwrap().status.code(), Some(2));
    assert_eq!(ura().arg("siso").output().unwrap().status.code(), Some(2));

    let huge = dir.path().join("huge.toml");
    std::fs::write(
        &huge,
        "scenario = \"siso\"\nusers = [2]\nebn0_db = [0.0]\nblock_len = 64\n\
         profile = { info = [30, 10], parity = [0, 20] }\n",
    )
    .unwrap();
    assert_eq!(ura().args(["siso", "--config"]).arg(&huge).output().unwrap().status.code(), Some(3));
}
