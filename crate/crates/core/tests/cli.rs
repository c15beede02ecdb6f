use std::fs;
use std::process::{Command, Output};

use bosonic::cli::output::json_rows;
use bosonic::converse::cap_lower_thermal;

fn bosonic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bosonic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = bosonic(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn single_point_bounds() {
    let text = stdout(&[
        "bounds", "--set", "eta=0.5", "--set", "n_s=1", "--set", "n_b=1",
    ]);
    let lines = data_lines(&text);
    assert_eq!(
        lines[0],
        "eta,n_s,n_b,lower,upper_gio,upper_ks,gap_gio,gap_ks"
    );
    let lower: f64 = lines[1].split(',').nth(3).unwrap().parse().unwrap();
    assert_eq!(lower, cap_lower_thermal(0.5, 1.0, 1.0).unwrap());
}

#[test]
fn json_rows_round_trip_exactly() {
    let text = stdout(&["bounds", "--set", "grid=3", "--format", "json"]);
    let rows = json_rows(&text).unwrap();
    assert_eq!(rows.len(), 27);
    for row in rows {
        let (eta, n_s, n_b) = (
            row["eta"].as_f64().unwrap(),
            row["n_s"].as_f64().unwrap(),
            row["n_b"].as_f64().unwrap(),
        );
        assert_eq!(
            row["lower"].as_f64().unwrap(),
            cap_lower_thermal(eta, n_s, n_b).unwrap()
        );
    }
}

#[test]
fn csv_reals_parse_back_bit_exact() {
    let text = stdout(&[
        "dist",
        "--set",
        "channel=loss",
        "--set",
        "k=5",
        "--set",
        "eta=0.3",
        "--set",
        "dim=8",
    ]);
    let lines = data_lines(&text);
    assert_eq!(lines[0], "l,prob,cumulative");
    let p: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(p.len(), 8);
    // binomial thinning of five photons
    let want = [0.16807, 0.36015, 0.3087, 0.1323, 0.02835, 0.00243];
    for (a, b) in p.iter().zip(want) {
        assert!((a - b).abs() < 1e-15, "{a} vs {b}");
    }
    assert!(p[6..].iter().all(|&v| v == 0.0));
    assert!(text.contains("# diag.mean_checked = true"));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    fs::write(&path, "channel = \"additive\"\nn_s = 2.0\nn_bar = 3\n").unwrap();
    let cfg = path.to_str().unwrap();
    let text = stdout(&["bounds", "--config", cfg, "--set", "n_s=1"]);
    assert!(text.contains("# config.channel = additive"));
    assert!(text.contains("# config.n_s = 1.0"));
    assert!(text.contains("# config.n_bar = 3.0"));
    let row = data_lines(&text)[1];
    assert!(row.starts_with("1.0000000000000000e0,1.0000000000000000e0,3.0000000000000000e0,"));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let args = ["envelope", "--set", "n_max=500", "--format", "json"];
    let direct = stdout(&args);
    let mut with_file = args.to_vec();
    with_file.extend(["--output", path.to_str().unwrap()]);
    let out = bosonic(&with_file);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(fs::read_to_string(&path).unwrap(), direct);
}

#[test]
fn seeds_change_random_runs_only_through_the_seed() {
    let a = stdout(&["verify", "gentle", "--seed", "1", "--set", "trials=20"]);
    let b = stdout(&["verify", "gentle", "--seed", "1", "--set", "trials=20"]);
    let c = stdout(&["verify", "gentle", "--seed", "2", "--set", "trials=20"]);
    assert_eq!(a, b);
    assert_ne!(data_lines(&a), data_lines(&c));
}

#[test]
fn configuration_errors_exit_one() {
    for args in [
        &["bounds", "--set", "bogus=1"][..],
        &["bounds", "--set", "eta=abc"],
        &["bounds", "--set", "eta=1.5"],
        &["dist", "--set", "channel=warp"],
        &["envelope", "--set", "theorem=3"],
        &["bounds", "--config", "/nonexistent/run.toml"],
    ] {
        let out = bosonic(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn invalid_delta_tables_are_config_errors() {
    // schedules must be nonincreasing and cover every requested n
    let out = bosonic(&[
        "envelope",
        "--set",
        "d1_table=100:0.1,200:0.5",
        "--set",
        "n_max=200",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = bosonic(&[
        "envelope",
        "--set",
        "d1_table=100:0.1",
        "--set",
        "n_max=200",
    ]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn verification_suites_pass() {
    for args in [
        &["verify", "decompositions"][..],
        &["verify", "rank", "--set", "n_max=40"],
        &["verify", "smoothing", "--set", "trials=500"],
        &["verify", "qubit", "--set", "n_max=3", "--set", "trials=50"],
        &["demo", "mean-constraint"],
        &["demo", "concentration", "--set", "trials=1000"],
    ] {
        let out = bosonic(args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
