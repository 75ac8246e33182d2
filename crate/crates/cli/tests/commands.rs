//! Exit codes, output routing and output shape of each subcommand.

use std::process::{Command, Output};

fn uniprep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uniprep"))
        .args(args)
        .output()
        .expect("spawn uniprep")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn prep_lists_closed_forms() {
    let out = uniprep(&["prep", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with(&format!("# uniprep {} prep n=7\n", uniprep::VERSION)));
    assert!(text.contains("1.4274487578895312    2*asin(sqrt(3/7))"));
    assert!(text.contains("anti-ctrl q1"));
    assert_eq!(text.matches("pi/2").count(), 2);
}

#[test]
fn prep_json_is_machine_readable() {
    let out = uniprep(&["prep", "22", "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["wires"], 5);
    assert_eq!(doc["two_wire_gates"], 4);
    let gates = doc["gates"].as_array().unwrap();
    assert_eq!(gates.len(), 6);
    assert_eq!(gates[1]["closed_form"], "2*asin(sqrt(3/11))");
    assert_eq!(gates[3]["polarity"], "negative");
}

#[test]
fn prep_writes_qasm_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("seven.qasm");
    let out = uniprep(&["prep", "7", "--qasm", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let program = uniprep::qasm::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let state = program.simulate().unwrap();
    assert!((state.amplitudes()[6].norm_sqr() - 1.0 / 7.0).abs() < 1e-12);
}

#[test]
fn out_flag_redirects_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("count.csv");
    let out = uniprep(&["count", "--max", "40", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, stdout(&uniprep(&["count", "--max", "40"])));
}

#[test]
fn count_reports_both_formulas() {
    let text = stdout(&uniprep(&["count", "--max", "32"]));
    let rows = data_lines(&text);
    assert_eq!(rows[0], "n,actual_two_wire,closed_form,sum_form,agree");
    assert_eq!(rows.len(), 32);
    assert!(rows.contains(&"7,3,3,4,false"));
    assert!(rows.contains(&"22,4,4,4,true"));
    assert!(rows.contains(&"16,0,0,-3,false"));
}

#[test]
fn verify_passes_and_notes_power_of_two() {
    let out = uniprep(&["verify", "27"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("result: pass"));
    let text = stdout(&uniprep(&["verify", "16"]));
    assert!(text.contains("no two-wire gates needed"));
}

#[test]
fn verify_json_fields() {
    let doc: serde_json::Value =
        serde_json::from_slice(&uniprep(&["verify", "22", "--json"]).stdout).unwrap();
    assert_eq!(doc["pass"], true);
    assert!(doc["max_probability_deviation"].as_f64().unwrap() < 1e-12);
}

#[test]
fn verify_with_impossible_tolerance_exits_one() {
    let out = uniprep(&["verify", "7", "--tol", "0"]);
    let text = stdout(&out);
    if text.contains("result: FAIL") {
        assert_eq!(out.status.code(), Some(1));
    } else {
        assert_eq!(out.status.code(), Some(0));
    }
}

#[test]
fn sample_rows_sum_to_shots() {
    let text = stdout(&uniprep(&["sample", "4", "--shots", "8", "--seed", "3"]));
    let rows = data_lines(&text);
    assert_eq!(rows[0], "state,count");
    assert_eq!(rows.len(), 5);
    let total: u64 = rows[1..]
        .iter()
        .map(|r| r.split_once(',').unwrap().1.parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 8);
    assert!(text.contains("seed=3"));
    assert!(text.contains("outside=0"));
}

#[test]
fn sample_seeds_change_the_histogram() {
    let a = uniprep(&["sample", "27", "--seed", "1"]).stdout;
    let b = uniprep(&["sample", "27", "--seed", "2"]).stdout;
    assert_ne!(a, b);
}

#[test]
fn grover_from_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(&path, r#"{"vertices": [{"colors": 3}, {"colors": 2}], "edges": [[0, 1]]}"#).unwrap();
    let out = uniprep(&["grover", "--graph", path.to_str().unwrap(), "--trials", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("search_space_hadamard=8 search_space_restricted=6"));
    let rows = data_lines(&text);
    assert_eq!(rows[0], "trial,repetitions,attempts,solved");
    assert_eq!(rows.len(), 11);
    assert!(text.contains("# summary mode=restricted trials=10 solved=10"));
}

#[test]
fn grover_capacity_error_names_wire_total() {
    let out = uniprep(&["grover", "--line", "7", "--colors", "7"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("28 wires"), "{err}");
}

#[test]
fn bad_graph_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"vertices": [{"colors": 3}, {"colors": 3}], "edges": [[0, 0]]}"#).unwrap();
    let out = uniprep(&["grover", "--graph", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_skips_oversized_points() {
    let out = uniprep(&["sweep", "--colors", "200", "--nodes", "1..3", "--trials", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("# skipped nodes=3"));
    assert!(String::from_utf8(out.stderr).unwrap().contains("warning: skipped nodes=3"));
    let rows = data_lines(&text);
    assert_eq!(rows[0], "nodes,mode,mean_repetitions,trials");
    assert_eq!(rows.len(), 1 + 2 * 2);
    assert!(rows[1].starts_with("1,restricted,"));
    assert!(rows[4].starts_with("2,hadamard,"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["prep", "0"],
        vec!["count", "--max", "1"],
        vec!["sample", "5", "--shots", "0"],
        vec!["grover", "--line", "3"],
        vec!["grover", "--line", "3", "--colors", "1"],
        vec!["sweep", "--colors", "3", "--nodes", "5..2"],
        vec!["grover", "--line", "3", "--colors", "3", "--lambda", "0.5"],
        vec!["frobnicate"],
    ] {
        let out = uniprep(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn oversized_state_count_is_a_capacity_error() {
    let out = uniprep(&["verify", "100000000"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(uniprep(&["--help"]).status.code(), Some(0));
    let out = uniprep(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains(uniprep::VERSION));
}
