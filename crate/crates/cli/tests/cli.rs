use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;
use xychain_cli::output::{fmt_g, manifest_path, round_sig, FIELD_SWEEP_HEADER, TIME_SERIES_HEADER};
use xychain_cli::{EXIT_BREACH, EXIT_CONFIG, EXIT_OK, EXIT_USAGE};
use xychain_core::sweep::{time_series, uniform_grid};
use xychain_core::{ChainParams, Engine, SweepRow, TimePoint};

fn xychain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xychain")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn two_spin_time_series_matches_golden_file() {
    // independent closed form a = (g/λ)² sin²(λt), formatted with C's %.12g
    let golden = include_str!("golden/time_series_n2.csv");
    let out =
        xychain(&["time-series", "--n", "2", "--b", "0.2", "--v", "1", "--g", "1", "--t-max", "3", "--t-steps", "7"]);
    assert_eq!(code(&out), EXIT_OK);
    assert_eq!(stdout(&out), golden);
}

#[test]
fn csv_dialect() {
    let out = xychain(&["time-series", "--n", "5", "--t-max", "4", "--t-steps", "33"]);
    let text = stdout(&out);
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(TIME_SERIES_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 33);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 5);
        for x in &cols[..4] {
            let v: f64 = x.parse().unwrap();
            assert_eq!(fmt_g(v), *x, "not canonical 12-digit text");
        }
        assert!(["pos", "neg", "none"].contains(&cols[4]));
    }

    let out =
        xychain(&["field-sweep", "--n", "3", "--b-min", "0", "--b-max", "2", "--b-steps", "5", "--t-steps", "64"]);
    assert_eq!(code(&out), EXIT_OK);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some(FIELD_SWEEP_HEADER));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn even_ring_oracle_sweep_writes_nan_envelope() {
    let out = xychain(&[
        "field-sweep",
        "--n",
        "4",
        "--engine",
        "oracle",
        "--b-min",
        "0",
        "--b-max",
        "1",
        "--b-steps",
        "2",
        "--t-max",
        "5",
        "--t-steps",
        "32",
    ]);
    assert_eq!(code(&out), EXIT_OK);
    assert!(stdout(&out).lines().skip(1).all(|l| l.ends_with(",nan")));
}

#[test]
fn json_round_trip_is_exact_to_twelve_digits() {
    let p = ChainParams::new(7, 0.3, 1.0, 0.6).unwrap();
    let grid = uniform_grid(6.0, 50).unwrap();
    let rows = time_series(&p, &grid, Engine::Analytic).unwrap();
    let out = xychain(&[
        "time-series",
        "--n",
        "7",
        "--b",
        "0.3",
        "--g",
        "0.6",
        "--t-max",
        "6",
        "--t-steps",
        "50",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), EXIT_OK);
    let parsed: Vec<TimePoint> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed.len(), rows.len());
    for (got, want) in parsed.iter().zip(&rows) {
        assert_eq!(got.t, round_sig(want.t));
        assert_eq!(got.a, round_sig(want.a));
        assert_eq!(got.c1, round_sig(want.c1));
        assert_eq!(got.c2, round_sig(want.c2));
        assert_eq!(got.channel, want.channel);
    }

    let out = xychain(&[
        "field-sweep",
        "--n",
        "5",
        "--b-min",
        "0",
        "--b-max",
        "1",
        "--b-steps",
        "3",
        "--t-steps",
        "64",
        "--format",
        "json",
    ]);
    let rows: Vec<SweepRow> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.a_envelope.is_some()));
}

fn manifest(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(manifest_path(out)).unwrap()).unwrap()
}

#[test]
fn manifest_echoes_every_resolved_setting() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ts.csv");
    let out = xychain(&["time-series", "--t-steps", "16", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), EXIT_OK);
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with(TIME_SERIES_HEADER));
    let m = manifest(&path);
    assert_eq!(m["command"], "time-series");
    assert_eq!(m["tool_version"], env!("CARGO_PKG_VERSION"));
    assert!(m["wall_time"].as_f64().unwrap() >= 0.0);
    let echo = &m["config_echo"];
    for key in ["n", "b", "v", "g", "t_max", "t_max_policy", "t_steps", "engine", "format", "out", "time_unit"] {
        assert!(echo.get(key).is_some(), "missing {key}");
    }
    assert_eq!(echo["n"], 5);
    assert_eq!(echo["engine"], "analytic");
    assert!(echo["t_max"].as_f64().unwrap() > 0.0);

    let path = dir.path().join("sweep.json");
    let out = xychain(&[
        "field-sweep",
        "--b-steps",
        "2",
        "--t-steps",
        "16",
        "--refine",
        "false",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), EXIT_OK);
    let echo = &manifest(&path)["config_echo"];
    for key in
        ["n", "v", "g", "b_min", "b_max", "b_steps", "t_max", "t_steps", "refine", "engine", "format", "t_max_policy"]
    {
        assert!(echo.get(key).is_some(), "missing {key}");
    }
    assert_eq!(echo["refine"], false);
    assert_eq!(echo["b_min"], -4.0);
}

#[test]
fn exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["time-series", "--n", "4", "--engine", "analytic"], EXIT_CONFIG),
        (&["time-series", "--t-steps", "1"], EXIT_USAGE),
        (&["time-series", "--n", "0"], EXIT_USAGE),
        (&["time-series", "--n", "1"], EXIT_CONFIG),
        (&["time-series", "--engine", "exact"], EXIT_USAGE),
        (&["time-series", "--n", "15", "--engine", "oracle"], EXIT_CONFIG),
        (&["field-sweep", "--b-steps", "1"], EXIT_USAGE),
        (&["field-sweep", "--b-min", "2", "--b-max", "1"], EXIT_USAGE),
        (&["resonance", "--n", "15", "--g", "0.1", "--mode", "0"], EXIT_USAGE),
        (&["resonance", "--n", "15", "--g", "0.1", "--mode", "8"], EXIT_USAGE),
        (&["resonance", "--n", "15"], EXIT_USAGE),
        (&["verify", "--n-list", "3", "--points", "4", "--tolerance", "1e-18"], EXIT_BREACH),
        (&["verify", "--n-list", "4", "--points", "2"], EXIT_CONFIG),
        (&["frobnicate"], EXIT_USAGE),
        (&["--help"], EXIT_OK),
        (&["--version"], EXIT_OK),
    ];
    for (args, expected) in cases {
        let out = xychain(args);
        assert_eq!(code(&out), *expected, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = xychain(&["time-series", "--n", "4"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("odd n"));
}

#[test]
fn thread_variable_is_validated_and_does_not_change_results() {
    let args = ["field-sweep", "--n", "5", "--b-min", "0", "--b-max", "2", "--b-steps", "5", "--t-steps", "128"];
    let free = xychain(&args);
    let one = Command::new(env!("CARGO_BIN_EXE_xychain")).args(args).env("XYCHAIN_THREADS", "1").output().unwrap();
    assert_eq!(code(&one), EXIT_OK);
    assert_eq!(free.stdout, one.stdout);
    for bad in ["0", "-2", "many"] {
        let out = Command::new(env!("CARGO_BIN_EXE_xychain")).args(args).env("XYCHAIN_THREADS", bad).output().unwrap();
        assert_eq!(code(&out), EXIT_USAGE, "XYCHAIN_THREADS={bad}");
    }
}

#[test]
fn verify_passes_and_is_deterministic() {
    let out = xychain(&["verify", "--n-list", "3,5,7", "--points", "20"]);
    assert_eq!(code(&out), EXIT_OK);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    for entry in report["results"].as_array().unwrap() {
        assert!(entry["deviation"]["sz"].as_f64().unwrap() <= 1e-9);
    }

    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.json"), dir.path().join("b.json")];
    for p in &paths {
        let out = xychain(&["verify", "--n-list", "3", "--seed", "42", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&out), EXIT_OK);
    }
    assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
}

#[test]
fn resonance_report_shape() {
    let out = xychain(&["resonance", "--n", "15", "--g", "0.1", "--mode", "7", "--t-steps", "256"]);
    assert_eq!(code(&out), EXIT_OK);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["table"]["fields"].as_array().unwrap().len(), 7);
    let labels: Vec<&str> = r["series"].as_array().unwrap().iter().map(|s| s["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["on_peak", "tenth", "mid"]);
    assert_eq!(r["approximation"].as_array().unwrap().len(), 256);
    assert!(r["predicted_c2_peak"].as_f64().unwrap() > 0.0);
}

fn flag_value() -> impl Strategy<Value = String> {
    prop_oneof![
        (-3i32..16).prop_map(|k| k.to_string()),
        (-5.0..5.0f64).prop_map(|x| format!("{x:.3}")),
        Just("nan".to_string()),
        Just("inf".to_string()),
        Just("".to_string()),
        Just("abc".to_string()),
        Just("true".to_string()),
        Just("both".to_string()),
        Just("json".to_string()),
        Just("3,5".to_string()),
    ]
}

fn flag() -> impl Strategy<Value = (&'static str, String)> {
    let names = prop::sample::select(vec![
        "--n",
        "--b",
        "--v",
        "--g",
        "--t-max",
        "--t-steps",
        "--engine",
        "--format",
        "--b-min",
        "--b-max",
        "--b-steps",
        "--refine",
        "--mode",
        "--n-list",
        "--tolerance",
        "--seed",
        "--points",
        "--bogus",
    ]);
    (names, flag_value())
}

/// Keeps fuzzed runs cheap: large chains, huge grids and big oracle runs are skipped.
fn affordable(flags: &[(&str, String)]) -> bool {
    flags.iter().all(|(name, value)| match *name {
        "--n" | "--mode" => value.parse::<i64>().map_or(true, |k| k <= 9),
        "--t-steps" | "--b-steps" | "--points" => value.parse::<i64>().map_or(true, |k| k <= 16),
        "--n-list" => false,
        _ => true,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn fuzzed_flags_never_crash(
        sub in prop::sample::select(vec!["time-series", "field-sweep", "resonance", "verify"]),
        flags in prop::collection::vec(flag(), 0..5),
    ) {
        prop_assume!(affordable(&flags));
        let mut args = vec![sub.to_string()];
        if sub != "verify" {
            args.extend(["--t-steps".to_string(), "8".to_string()]);
        }
        if sub == "field-sweep" {
            args.extend(["--b-steps".to_string(), "3".to_string()]);
        }
        if sub == "verify" {
            args.extend(["--n-list".to_string(), "3".to_string(), "--points".to_string(), "2".to_string()]);
        }
        for (name, value) in &flags {
            args.push(format!("{name}={value}"));
        }
        let out = Command::new(env!("CARGO_BIN_EXE_xychain")).args(&args).output().unwrap();
        let code = out.status.code();
        prop_assert!(matches!(code, Some(0..=3)), "{args:?} -> {code:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
