use std::path::Path;
use std::process::{Command, Output};

use fadeq::manifest::RunManifest;

fn fadeq(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fadeq"))
        .args(args)
        .current_dir(dir)
        .env("FADEQ_THREADS", "2")
        .output()
        .expect("spawn fadeq")
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

const SMALL: &[&str] = &["--snr", "4,8", "--streams", "50", "--training-length", "200"];

#[test]
fn presets_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = fadeq(&["presets"], dir.path());
    ok(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    for row in ["RX-TX1   3.21   7.81  LOS", "RX-TX2   3.13   3.76  unknown", "RX-TX5   2.64   0.71  NLOS"] {
        assert!(text.contains(row), "{text}");
    }
}

#[test]
fn ber_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.cfg"), "equalizer = rls\nchannel_taps = 2\n").unwrap();
    for name in ["a.csv", "b.csv"] {
        let mut args = vec!["ber", "--config", "c.cfg", "--seed", "42", "--out", name];
        args.extend(SMALL);
        ok(&fadeq(&args, dir.path()));
    }
    let a = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read_to_string(dir.path().join("b.csv")).unwrap());
    assert!(a.starts_with("x,y,ci_low,ci_high,n_errors,n_bits\n4,"));
    assert_eq!(a.lines().count(), 3);

    let m = RunManifest::read(&dir.path().join("a.manifest.json")).unwrap();
    assert_eq!(m.command, "ber");
    assert_eq!(m.master_seed, 42);
    assert_eq!(m.results.len(), 1);
    assert_eq!(m.results[0].csv, "a.csv");
    assert_eq!(m.results[0].points.len(), 2);
    assert!(m.config.contains("equalizer = rls"));
    assert!(m.config.contains("channel_taps = 2"));
    assert!(m.config.contains("training_length = 200"));
}

#[test]
fn manifest_config_reproduces_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["ber", "--seed", "7", "--preset", "rxtx5", "--equalizer", "zf", "--out", "first.csv"];
    args.extend(SMALL);
    ok(&fadeq(&args, dir.path()));
    let m = RunManifest::read(&dir.path().join("first.manifest.json")).unwrap();
    std::fs::write(dir.path().join("echo.cfg"), &m.config).unwrap();
    ok(&fadeq(&["ber", "--config", "echo.cfg", "--out", "second.csv"], dir.path()));
    assert_eq!(
        std::fs::read(dir.path().join("first.csv")).unwrap(),
        std::fs::read(dir.path().join("second.csv")).unwrap()
    );
}

#[test]
fn converge_writes_one_row_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    ok(&fadeq(&["converge", "--snr", "20", "--training-length", "120", "--out", "mse.csv"], dir.path()));
    let csv = std::fs::read_to_string(dir.path().join("mse.csv")).unwrap();
    assert_eq!(csv.lines().count(), 121);
    assert!(dir.path().join("mse.manifest.json").exists());
}

#[test]
fn sweep_writes_one_csv_per_value_and_one_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["sweep", "--param", "training_length", "--values", "100,500,1000", "--out", "sw"];
    args.extend(&["--snr", "6", "--streams", "20"]);
    ok(&fadeq(&args, dir.path()));
    let sw = dir.path().join("sw");
    let mut names: Vec<String> = std::fs::read_dir(&sw)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "manifest.json",
            "training_length_100.csv",
            "training_length_1000.csv",
            "training_length_500.csv"
        ]
    );
    let m = RunManifest::read(&sw.join("manifest.json")).unwrap();
    assert_eq!(m.sweep_param.as_deref(), Some("training_length"));
    let labels: Vec<_> = m.results.iter().map(|r| r.label.clone().unwrap()).collect();
    assert_eq!(labels, ["100", "500", "1000"]);
}

#[test]
fn preset_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--param", "preset", "--values", "rxtx1,RX-TX5", "--snr", "6", "--streams", "10", "--out", "p"];
    ok(&fadeq(&args, dir.path()));
    assert!(dir.path().join("p/preset_rxtx5.csv").exists());
}

#[test]
fn errors_exit_nonzero_with_context() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.cfg"), "colour = blue\n").unwrap();
    let cases: [&[&str]; 5] = [
        &["ber", "--config", "bad.cfg"],
        &["ber", "--config", "missing.cfg"],
        &["ber", "--training-length", "-100"],
        &["sweep", "--param", "stream_length", "--values", "1"],
        &["ber", "--equalizer", "dfe"],
    ];
    let expected = ["colour", "missing.cfg", "training_length", "--param", "equalizer"];
    for (args, needle) in cases.iter().zip(expected) {
        let out = fadeq(args, dir.path());
        assert!(!out.status.success(), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{args:?}: {err}");
    }
}
