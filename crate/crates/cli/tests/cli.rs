use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kmap-ecc"))
}

fn placement(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../placements")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_theorems_prints_pass_lines() {
    let o = run(&["verify-theorems"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| l.starts_with("PASS theorem ")));
}

#[test]
fn search_emits_one_four_data_placement() {
    let o = run(&["search", "--n", "7", "--d", "4", "--limit", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["placement"]["data"].as_array().unwrap().len(), 4);
}

#[test]
fn bad_placement_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let o = run(&["render", "--placement", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());

    let garbled = dir.path().join("garbled.json");
    std::fs::write(&garbled, "{\"n\": 7, \"data\": [").unwrap();
    let o = run(&["render", "--placement", garbled.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(run(&["search", "--bogus"]).status.code(), Some(1));
}

#[test]
fn invalid_placement_is_a_domain_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.json");
    std::fs::write(&path, r#"{"n": 7, "data": [106, 106, 79]}"#).unwrap();
    let o = run(&["validate", "--placement", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["valid"], false);

    let o = run(&["validate", "--placement", &placement("fig4.json")]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn encode_then_decode_corrects_a_double_error() {
    let fig = placement("fig4.json");
    let o = run(&["codec", "encode", "--placement", &fig, "--data", "101"]);
    assert_eq!(o.status.code(), Some(0));
    let word = stdout(&o).trim().to_string();
    assert_eq!(word.len(), 10);

    let mut bits: Vec<u8> = word.bytes().collect();
    for i in [0, 5] {
        bits[i] ^= 1;
    }
    let noisy = String::from_utf8(bits).unwrap();
    let o = run(&["codec", "decode", "--placement", &fig, "--word", &noisy]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with(&word));
}

#[test]
fn uncorrectable_word_exits_two() {
    let fig = placement("fig4.json");
    // zero codeword hit by P_1P_2P_3, which no single or double error matches
    let o = run(&["codec", "decode", "--placement", &fig, "--word", "0001110000"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("uncorrectable"));
}

#[test]
fn codec_build_writes_csv_table() {
    let o = run(&["codec", "build", "--placement", &placement("fig4.json"), "--triples"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("syndrome,pattern"));
    assert_eq!(lines.count(), 104);
}

#[test]
fn rendered_map_diffs_clean_against_itself_and_not_against_another() {
    let dir = tempfile::tempdir().unwrap();
    let mut paths = Vec::new();
    for name in ["fig3", "fig4"] {
        let o = run(&["render", "--placement", &placement(&format!("{name}.json")), "--format", "csv"]);
        assert_eq!(o.status.code(), Some(0));
        let path = dir.path().join(format!("{name}.csv"));
        std::fs::write(&path, &o.stdout).unwrap();
        paths.push(path.display().to_string());
    }
    assert_eq!(run(&["diff", &paths[0], &paths[0]]).status.code(), Some(0));
    assert_eq!(run(&["diff", &paths[0], &paths[1]]).status.code(), Some(2));
}

#[test]
fn burst_check_reports_unsafe_ordering() {
    let fig = placement("fig4.json");
    let ok = run(&["burst", "check", "--placement", &fig, "--ordering", "X1,P7,P3,P6,X3,P2,P4,P1,P5,X2"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = run(&["burst", "check", "--placement", &fig, "--ordering", "X1,X2,X3,P1,P2,P3,P4,P5,P6,P7"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stdout(&bad).starts_with("FAIL"));
}
