//! End-to-end tests of the `muxcast` binary: golden outputs, exit codes,
//! determinism, and configuration precedence.

use std::path::Path;
use std::process::{Command, Output};

fn muxcast(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_muxcast"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn write_fig1_fixture(dir: &Path) -> String {
    let path = dir.join("fig1.csv");
    std::fs::write(&path, "d1,d2\n1.7,2.3\n2.6,3.1\n").unwrap();
    path.to_string_lossy().into_owned()
}

fn write_sine_fixture(dir: &Path, n: usize) -> String {
    let path = dir.join("series.csv");
    let mut body = String::from("a,b\n");
    for t in 0..n {
        let x = 10.0 + 2.0 * (2.0 * std::f64::consts::PI * (t % 12) as f64 / 12.0).sin();
        let y = 50.0 + 5.0 * (2.0 * std::f64::consts::PI * (t % 8) as f64 / 8.0).cos();
        body.push_str(&format!("{x},{y}\n"));
    }
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn inspect_reproduces_worked_encodings() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fig1_fixture(dir.path());

    let vi = muxcast(
        dir.path(),
        &[
            "inspect", "--input", &input, "--mux", "vi", "--digits", "2", "--offset", "0",
            "--factor", "10",
        ],
    );
    assert!(vi.status.success());
    assert!(stdout(&vi).contains("1723,2631"), "{}", stdout(&vi));

    let vc = muxcast(
        dir.path(),
        &[
            "inspect", "--input", &input, "--mux", "vc", "--digits", "2", "--offset", "0",
            "--factor", "10",
        ],
    );
    assert!(stdout(&vc).contains("17,23,26,31"), "{}", stdout(&vc));

    let di = muxcast(
        dir.path(),
        &[
            "inspect", "--input", &input, "--mux", "di", "--digits", "2", "--offset", "0",
            "--factor", "10",
        ],
    );
    assert!(stdout(&di).contains("1273,2361"), "{}", stdout(&di));
}

#[test]
fn inspect_sax_prints_word_per_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sine_fixture(dir.path(), 24);
    let out = muxcast(
        dir.path(),
        &[
            "inspect", "--input", &input, "--mux", "vc", "--sax", "--segment-len", "3",
            "--alphabet-size", "5",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("sax word"), "{text}");
    assert!(text.contains("multiplexed (vc, b=1)"), "{text}");
}

#[test]
fn inspect_limit_zero_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fig1_fixture(dir.path());
    let out = muxcast(dir.path(), &["inspect", "--input", &input, "--limit", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--limit"));
}

#[test]
fn forecast_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sine_fixture(dir.path(), 96);
    for tag in ["one", "two"] {
        let out = muxcast(
            dir.path(),
            &[
                "forecast", "--input", &input, "--horizon", "12", "--mux", "vi", "--backend",
                "mock", "--seed", "7", "--output", &format!("{tag}.csv"),
            ],
        );
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let one = std::fs::read(dir.path().join("one.csv")).unwrap();
    let two = std::fs::read(dir.path().join("two.csv")).unwrap();
    assert_eq!(one, two);

    // same header as the input, horizon rows
    let text = String::from_utf8(one).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("a,b"));
    assert_eq!(lines.count(), 12);
}

#[test]
fn forecast_oracle_needs_oracle_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sine_fixture(dir.path(), 48);
    let out = muxcast(
        dir.path(),
        &[
            "forecast", "--input", &input, "--horizon", "4", "--backend", "oracle", "--output",
            "out.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--oracle-file"));
}

#[test]
fn forecast_oracle_file_recovers_future() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sine_fixture(dir.path(), 96);
    // hide the last 8 rows as the oracle's future
    let full = std::fs::read_to_string(dir.path().join("series.csv")).unwrap();
    let lines: Vec<&str> = full.lines().collect();
    let history: String = lines[..lines.len() - 8].join("\n") + "\n";
    let future: String =
        format!("{}\n{}\n", lines[0], lines[lines.len() - 8..].join("\n"));
    std::fs::write(dir.path().join("history.csv"), history).unwrap();
    std::fs::write(dir.path().join("future.csv"), &future).unwrap();
    let _ = input;

    let out = muxcast(
        dir.path(),
        &[
            "forecast", "--input", "history.csv", "--horizon", "8", "--backend", "oracle",
            "--oracle-file", "future.csv", "--digits", "4", "--output", "out.csv",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let recovered = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    let expected: Vec<Vec<f64>> = future
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    for (line, want) in recovered.lines().skip(1).zip(&expected) {
        for (field, expected_value) in line.split(',').zip(want) {
            let got: f64 = field.parse().unwrap();
            assert!(
                (got - expected_value).abs() < 1e-2,
                "{got} vs {expected_value}"
            );
        }
    }
}

#[test]
fn digital_alphabet_of_twenty_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fig1_fixture(dir.path());
    let out = muxcast(
        dir.path(),
        &[
            "inspect", "--input", &input, "--sax", "--alphabet", "digit", "--alphabet-size",
            "20",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("at most 10"),
        "expected the a <= 10 rule, got: {}",
        stderr(&out)
    );
}

#[test]
fn http_backend_without_endpoint_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fig1_fixture(dir.path());
    let out = muxcast(
        dir.path(),
        &[
            "forecast", "--input", &input, "--horizon", "2", "--backend", "http", "--output",
            "out.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("endpoint"));
}

#[test]
fn unreachable_http_backend_exits_with_backend_code() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sine_fixture(dir.path(), 48);
    let out = muxcast(
        dir.path(),
        &[
            "forecast",
            "--input",
            &input,
            "--horizon",
            "2",
            "--backend",
            "http",
            "--endpoint",
            "http://127.0.0.1:1/v1/completions",
            "--max-retry",
            "0",
            "--timeout-secs",
            "2",
            "--output",
            "out.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn missing_input_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = muxcast(
        dir.path(),
        &["inspect", "--input", "does-not-exist.csv"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_data_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "a,b\n1,2\nx,3\n").unwrap();
    let out = muxcast(
        dir.path(),
        &["inspect", "--input", path.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn unknown_method_is_usage_error_listing_valid_ones() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sine_fixture(dir.path(), 48);
    let out = muxcast(
        dir.path(),
        &["evaluate", "--input", &input, "--methods", "lstm"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("persistence"), "{}", stderr(&out));
    assert!(stderr(&out).contains("llm-vc"));
}

#[test]
fn evaluate_persistence_only_writes_one_method_row() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sine_fixture(dir.path(), 60);
    let out = muxcast(
        dir.path(),
        &[
            "evaluate", "--input", &input, "--methods", "persistence", "--report-json",
            "r.json", "--report-table", "r.txt",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap())
            .unwrap();
    let methods = report["methods"].as_array().unwrap();
    assert_eq!(methods.len(), 1);
    assert_eq!(methods[0]["name"], "persistence");
    assert!(methods[0]["per_dim_rmse"]["a"].is_number());
    assert!(dir.path().join("r.txt").exists());
}

#[test]
fn evaluate_plots_one_svg_per_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sine_fixture(dir.path(), 60);
    let out = muxcast(
        dir.path(),
        &[
            "evaluate", "--input", &input, "--methods", "persistence,ar", "--plots", "charts",
            "--report-json", "r.json", "--report-table", "r.txt",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let svgs: Vec<_> = std::fs::read_dir(dir.path().join("charts"))
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "svg"))
        .collect();
    assert_eq!(svgs.len(), 2);
}

#[test]
fn evaluate_test_len_equal_to_length_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sine_fixture(dir.path(), 30);
    let out = muxcast(
        dir.path(),
        &[
            "evaluate", "--input", &input, "--test-len", "30", "--methods", "persistence",
        ],
    );
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("bad split"), "{}", stderr(&out));
}

#[test]
fn help_lists_every_flag_with_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = muxcast(dir.path(), &["forecast", "--help"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for (flag, default) in [
        ("--mux", "[default: di]"),
        ("--digits", "[default: 3]"),
        ("--samples", "[default: 5]"),
        ("--segment-len", "[default: 6]"),
        ("--alphabet-size", "[default: 5]"),
        ("--alphabet", "[default: alpha]"),
        ("--backend", "[default: mock]"),
        ("--timeout-secs", "[default: 30]"),
        ("--temperature", "[default: 0.7]"),
        ("--top-p", "[default: 0.9]"),
        ("--max-retry", "[default: 2]"),
        ("--seed", "[default: 42]"),
    ] {
        assert!(text.contains(flag), "missing {flag} in help");
        assert!(
            text.contains(default),
            "missing '{default}' for {flag} in help"
        );
    }
    let eval_help = stdout(&muxcast(dir.path(), &["evaluate", "--help"]));
    assert!(eval_help.contains("--test-len"));
    assert!(eval_help.contains("--methods"));
    assert!(eval_help.contains("persistence,ar,llm"));
}

#[test]
fn config_precedence_flags_over_file_over_env() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fig1_fixture(dir.path());
    std::fs::write(dir.path().join("cfg.toml"), "digits = 4\nmux = \"vc\"\n").unwrap();

    // env alone applies
    let out = Command::new(env!("CARGO_BIN_EXE_muxcast"))
        .args(["inspect", "--input", &input])
        .env("MUXCAST_DIGITS", "5")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(stdout_of(&out).contains("b=5"), "{}", stdout_of(&out));

    // file beats env
    let out = Command::new(env!("CARGO_BIN_EXE_muxcast"))
        .args(["inspect", "--input", &input, "--config", "cfg.toml"])
        .env("MUXCAST_DIGITS", "5")
        .current_dir(dir.path())
        .output()
        .unwrap();
    let text = stdout_of(&out);
    assert!(text.contains("(vc, b=4)"), "{text}");

    // flag beats file
    let out = Command::new(env!("CARGO_BIN_EXE_muxcast"))
        .args([
            "inspect", "--input", &input, "--config", "cfg.toml", "--digits", "2", "--mux",
            "di",
        ])
        .env("MUXCAST_DIGITS", "5")
        .current_dir(dir.path())
        .output()
        .unwrap();
    let text = stdout_of(&out);
    assert!(text.contains("(di, b=2)"), "{text}");
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn seed_random_opts_into_entropy() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_sine_fixture(dir.path(), 48);
    let out = muxcast(
        dir.path(),
        &[
            "forecast", "--input", &input, "--horizon", "4", "--seed", "random", "--output",
            "out.csv",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let bad = muxcast(
        dir.path(),
        &[
            "forecast", "--input", &input, "--horizon", "4", "--seed", "sometimes", "--output",
            "out.csv",
        ],
    );
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn unknown_config_key_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fig1_fixture(dir.path());
    std::fs::write(dir.path().join("cfg.toml"), "diggits = 4\n").unwrap();
    let out = muxcast(
        dir.path(),
        &["inspect", "--input", &input, "--config", "cfg.toml"],
    );
    assert_eq!(out.status.code(), Some(1));
}
