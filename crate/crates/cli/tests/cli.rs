use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pathlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathlab"))
        .args(args)
        .env_remove("PATHLAB_OUTPUT_DIR")
        .output()
        .expect("run pathlab")
}

fn stdout(args: &[&str]) -> String {
    let out = pathlab(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// `# result name = value` lines.
fn result(text: &str, name: &str) -> String {
    let prefix = format!("# result {name} = ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no result `{name}` in\n{text}"))
        .to_string()
}

/// Column names and data rows of a table.
fn rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let columns = lines.next().unwrap().split(',').map(String::from).collect();
    let data = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (columns, data)
}

#[test]
fn interferometer_equal_settings_always_coincide() {
    let text = stdout(&["interferometer", "-p", "alpha=0", "-p", "beta=0"]);
    assert_eq!(result(&text, "coincidence"), "1");
    let (columns, data) = rows(&text);
    let p = columns.iter().position(|c| c == "probability").unwrap();
    let same: f64 = data
        .iter()
        .filter(|r| r[0] == "UU" || r[0] == "DD")
        .map(|r| r[p].parse::<f64>().unwrap())
        .sum();
    assert_eq!(same, 1.0);
}

#[test]
fn chsh_defaults_reach_the_quantum_value() {
    let text = stdout(&["chsh"]);
    let s: f64 = result(&text, "s").parse().unwrap();
    assert!((s - 2.828427).abs() < 1e-6);
    assert!(text.contains("# seed = "));
}

#[test]
fn classifies_a_sampled_2pi_loop() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("loop.csv");
    let mut text = String::from("# full turn about y\n");
    for k in 0..=100 {
        text.push_str(&format!("0, 1, 0, {}\n", 2.0 * PI * k as f64 / 100.0));
    }
    std::fs::write(&file, text).unwrap();
    let out = stdout(&["spin-classify", "-p", &format!("path={}", file.display())]);
    assert_eq!(result(&out, "class"), "nontrivial");
}

#[test]
fn correlation_scan_quarter_steps() {
    let text = stdout(&["correlation-scan", "-p", "delta=0:pi:pi/4"]);
    let (columns, data) = rows(&text);
    assert_eq!(data.len(), 5);
    let c = columns.iter().position(|c| c == "correlation").unwrap();
    for (k, row) in data.iter().enumerate() {
        let value: f64 = row[c].parse().unwrap();
        assert!((value - (PI * k as f64 / 4.0).cos()).abs() < 1e-11);
    }
}

#[test]
fn eq10_scan_reports_a_ratio_per_row() {
    let text = stdout(&["eq10-check", "-p", "beta=0.2", "-p", "alpha=0.2:1:0.1"]);
    let (columns, data) = rows(&text);
    let re = columns.iter().position(|c| c == "ratio_re").unwrap();
    let im = columns.iter().position(|c| c == "ratio_im").unwrap();
    assert_eq!(data.len(), 9);
    for row in &data {
        assert!(row[re].parse::<f64>().is_ok() && row[im].parse::<f64>().is_ok());
    }
    assert_eq!((data[0][re].as_str(), data[0][im].as_str()), ("1", "0"));
}

#[test]
fn rpp_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let outputs: Vec<(Vec<u8>, Vec<u8>)> = (0..2)
        .map(|i| {
            let table = dir.path().join(format!("run{i}.csv"));
            let log = dir.path().join(format!("log{i}.csv"));
            stdout(&[
                "rpp-trials",
                "--seed",
                "42",
                "-p",
                "alpha=pi/3",
                "-p",
                "trials=5000",
                "-p",
                &format!("log={}", log.display()),
                "--output",
                table.to_str().unwrap(),
            ]);
            (std::fs::read(table).unwrap(), std::fs::read(log).unwrap())
        })
        .collect();
    // the echoed log path differs between the runs
    let strip = |b: &[u8]| -> String {
        String::from_utf8(b.to_vec())
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with("# param log"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&outputs[0].0), strip(&outputs[1].0));
    assert_eq!(outputs[0].1, outputs[1].1);
    let log = String::from_utf8(outputs[0].1.clone()).unwrap();
    assert_eq!(log.lines().count(), 5001);
    assert!(strip(&outputs[0].0).contains("# seed = 42"));
}

#[test]
fn json_reparses_to_table_values() {
    for args in [
        vec!["chsh", "-p", "source=sampled", "-p", "trials=20000"],
        vec![
            "correlation-scan",
            "-p",
            "source=sawtooth",
            "-p",
            "trials=5000",
        ],
        vec!["ring-propagator", "-p", "alpha=0:6:0.5"],
        vec!["interferometer", "-p", "alpha=1", "-p", "r1=0.5"],
    ] {
        let table = stdout(&args);
        let mut json_args = args.clone();
        json_args.extend(["--format", "json"]);
        let doc: Value = serde_json::from_str(&stdout(&json_args)).unwrap();

        let (columns, data) = rows(&table);
        let json_columns: Vec<&str> = doc["columns"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c.as_str().unwrap())
            .collect();
        assert_eq!(columns, json_columns);
        let json_rows = doc["rows"].as_array().unwrap();
        assert_eq!(data.len(), json_rows.len());
        for (row, json_row) in data.iter().zip(json_rows) {
            for (cell, value) in row.iter().zip(json_row.as_array().unwrap()) {
                match value {
                    Value::Number(n) => {
                        assert_eq!(cell.parse::<f64>().unwrap(), n.as_f64().unwrap())
                    }
                    Value::String(s) => assert_eq!(cell, s),
                    Value::Bool(b) => assert_eq!(cell, &b.to_string()),
                    Value::Null => assert_eq!(cell, ""),
                    other => panic!("{other}"),
                }
            }
        }
        for (name, value) in doc["results"].as_object().unwrap() {
            let cell = result(&table, name);
            match value {
                Value::Number(n) => assert_eq!(cell.parse::<f64>().unwrap(), n.as_f64().unwrap()),
                Value::Null => assert_eq!(cell, ""),
                Value::Bool(b) => assert_eq!(cell, b.to_string()),
                Value::String(s) => assert_eq!(&cell, s),
                other => panic!("{other}"),
            }
        }
        assert_eq!(doc["seed"], 1);
    }
}

fn assert_fails(args: &[&str], code: i32, output: &Path) {
    let out = pathlab(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    assert!(!output.exists(), "{args:?} wrote {}", output.display());
}

#[test]
fn usage_errors_exit_2_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.csv");
    let t = target.to_str().unwrap();
    assert_fails(&["chsh", "-p", "gamma=1", "--output", t], 2, &target);
    assert_fails(&["chsh", "-p", "a", "--output", t], 2, &target);
    assert_fails(
        &["correlation-scan", "-p", "delta=1:0:0.1", "--output", t],
        2,
        &target,
    );
    assert_fails(
        &["correlation-scan", "-p", "delta=0:1:0", "--output", t],
        2,
        &target,
    );
    assert_fails(&["spin-classify", "--output", t], 2, &target);
    assert_fails(
        &["interferometer", "--format", "xml", "--output", t],
        2,
        &target,
    );

    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "colour = \"red\"\n").unwrap();
    assert_fails(
        &["chsh", "--config", config.to_str().unwrap(), "--output", t],
        2,
        &target,
    );
    std::fs::write(&config, "[params]\ngamma = 1\n").unwrap();
    assert_fails(
        &["chsh", "--config", config.to_str().unwrap(), "--output", t],
        2,
        &target,
    );
    std::fs::write(&config, "experiment = \"chsh\"\n").unwrap();
    assert_fails(
        &[
            "interferometer",
            "--config",
            config.to_str().unwrap(),
            "--output",
            t,
        ],
        2,
        &target,
    );
}

#[test]
fn computation_errors_exit_1_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.csv");
    let t = target.to_str().unwrap();
    // ordering requires beta <= alpha
    assert_fails(
        &[
            "eq10-check",
            "-p",
            "beta=0.5",
            "-p",
            "alpha=0.2",
            "--output",
            t,
        ],
        1,
        &target,
    );
    assert_fails(
        &["ring-propagator", "-p", "epsilon=0", "--output", t],
        1,
        &target,
    );
    let missing = dir.path().join("missing.csv");
    assert_fails(
        &[
            "spin-classify",
            "-p",
            &format!("path={}", missing.display()),
            "--output",
            t,
        ],
        1,
        &target,
    );
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("chsh.toml");
    std::fs::write(
        &config,
        "experiment = \"chsh\"\nseed = 7\nformat = \"json\"\n[params]\nsource = \"sawtooth\"\ntrials = 2000\nb = \"pi/8\"\n",
    )
    .unwrap();
    let doc: Value = serde_json::from_str(&stdout(&[
        "chsh",
        "--config",
        config.to_str().unwrap(),
        "-p",
        "trials=3000",
    ]))
    .unwrap();
    assert_eq!(doc["seed"], 7);
    assert_eq!(doc["params"]["trials"], 3000);
    assert_eq!(doc["params"]["source"], "sawtooth");
    assert!((doc["params"]["b"].as_f64().unwrap() - PI / 8.0).abs() < 1e-12);
    assert_eq!(doc["results"]["trials_per_pair"], 3000);
}

#[test]
fn output_directory_variable() {
    let dir = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_pathlab"))
            .args(args)
            .env("PATHLAB_OUTPUT_DIR", dir.path())
            .output()
            .unwrap();
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    };
    run(&["interferometer"]);
    assert!(dir.path().join("interferometer.csv").exists());
    run(&["chsh", "--format", "json", "--output", "sub/chsh.json"]);
    assert!(dir.path().join("sub/chsh.json").exists());
    run(&["rpp-trials", "-p", "trials=10", "-p", "log=trials.log"]);
    assert!(dir.path().join("trials.log").exists());
}
