use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use submin_cli::format::InstanceFile;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_submin"))
}

fn write(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn run(args: &[&str], input: &Path) -> Output {
    bin().args(args).arg("--input").arg(input).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn pairwise_example() -> Value {
    json!({
        "version": 1, "nodes": 2, "unary": [[3, 0], [0, 2]],
        "terms": [{"type": "pairwise", "members": [0, 1], "a": 1, "b": 1}]
    })
}

fn cardinality_example() -> Value {
    json!({
        "version": 1, "nodes": 3, "unary": [[4, 1], [4, 1], [0, 5]],
        "terms": [{"type": "cardinality", "members": [0, 1, 2], "g": [0, 2, 2, 0]}]
    })
}

#[test]
fn solves_worked_examples() {
    let dir = TempDir::new().unwrap();
    for (value, minimum, minimizer) in [(pairwise_example(), 1, json!([0])), (cardinality_example(), 4, json!([0, 1]))] {
        let input = write(&dir, "in.json", &value);
        let result = stdout_json(&run(&["solve"], &input));
        assert_eq!(result["minimum"], minimum);
        assert_eq!(result["minimizer"], minimizer);
        assert!(result.get("wall_time_ms").is_none());
        assert!(result["phases"][0].get("twoDelta").is_some());
        let oracle = stdout_json(&run(&["oracle"], &input));
        assert_eq!(oracle["minimum"], minimum);
        assert_eq!(oracle["minimizer"], minimizer);
    }
}

#[test]
fn solve_flags_and_output_file() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", &pairwise_example());
    let output = dir.path().join("out.json");
    let out = bin()
        .args(["solve", "--audit", "--stats", "--input"])
        .arg(&input)
        .arg("--output")
        .arg(&output)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let result: Value = serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(result["audit_violations"], json!([]));
    assert!(result["wall_time_ms"].is_number());

    let text = run(&["solve", "--format", "text"], &input);
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.contains("minimum     1"));
    assert!(text.contains("minimizer   {0}"));
}

#[test]
fn invalid_instances_exit_2() {
    let dir = TempDir::new().unwrap();
    let mut negative = pairwise_example();
    negative["terms"][0]["a"] = json!(-1);
    let input = write(&dir, "neg.json", &negative);
    let out = run(&["solve"], &input);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("negative"));

    let mut unknown = pairwise_example();
    unknown["colour"] = json!("red");
    assert_eq!(run(&["solve"], &write(&dir, "unk.json", &unknown)).status.code(), Some(2));

    let mut version = pairwise_example();
    version["version"] = json!(7);
    assert_eq!(run(&["solve"], &write(&dir, "ver.json", &version)).status.code(), Some(2));

    let garbled = dir.path().join("garbled.json");
    std::fs::write(&garbled, "{ not json").unwrap();
    assert_eq!(run(&["solve"], &garbled).status.code(), Some(2));

    let mut out_of_range = pairwise_example();
    out_of_range["terms"][0]["members"] = json!([0, 5]);
    assert_eq!(run(&["solve"], &write(&dir, "range.json", &out_of_range)).status.code(), Some(2));
}

#[test]
fn missing_files_exit_1() {
    let out = run(&["solve"], Path::new("/nonexistent/instance.json"));
    assert_eq!(out.status.code(), Some(1));
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.json", &pairwise_example());
    let out = bin()
        .args(["solve", "--input"])
        .arg(&input)
        .args(["--output", "/nonexistent/dir/out.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn validate_examples() {
    let dir = TempDir::new().unwrap();
    let mut negative = pairwise_example();
    negative["terms"][0]["a"] = json!(-1);
    let out = run(&["validate"], &write(&dir, "neg.json", &negative));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("term value negative"));

    let out = run(&["validate"], &write(&dir, "card.json", &cardinality_example()));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "valid\n");

    let general = json!({
        "version": 1, "nodes": 2, "unary": [[0, 0], [0, 0]],
        "terms": [{"type": "general", "members": [0, 1], "table": [0, 0, 0, 1]}]
    });
    let out = run(&["validate"], &write(&dir, "gen.json", &general));
    assert_eq!(out.status.code(), Some(2));
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.contains("f(Q) ≠ 0"), "{report}");
    assert!(report.contains("not submodular"), "{report}");
}

fn normalize_file(dir: &TempDir, table: [i64; 4]) -> InstanceFile {
    let value = json!({
        "version": 1, "nodes": 3, "unary": [[0, 0], [0, 0], [0, 0]],
        "terms": [{"type": "general", "members": [1, 2], "table": table}]
    });
    let input = write(dir, "raw.json", &value);
    let output = dir.path().join("norm.json");
    let out = bin().args(["normalize", "--input"]).arg(&input).arg("--output").arg(&output).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(run(&["validate"], &output).status.code(), Some(0));
    serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap()
}

#[test]
fn normalize_examples_round_trip() {
    let dir = TempDir::new().unwrap();
    let greedy = normalize_file(&dir, [0, -2, 1, -1]);
    assert_eq!(greedy.unary, vec![[0, 0], [2, 0], [0, 1]]);
    assert_eq!(greedy.offset, -2);
    assert_eq!(serde_json::to_value(&greedy.terms[0]).unwrap()["table"], json!([0, 0, 0, 0]));

    let already = normalize_file(&dir, [0, 2, 1, 0]);
    assert_eq!(already.unary, vec![[0, 0]; 3]);
    assert_eq!(already.offset, 0);
    assert_eq!(serde_json::to_value(&already.terms[0]).unwrap()["table"], json!([0, 2, 1, 0]));

    let constant = normalize_file(&dir, [5, 5, 5, 5]);
    assert_eq!(constant.unary, vec![[0, 0]; 3]);
    assert_eq!(constant.offset, 5);
    assert_eq!(serde_json::to_value(&constant.terms[0]).unwrap()["table"], json!([0, 0, 0, 0]));
}

#[test]
fn normalize_rejects_fractional_slope() {
    let dir = TempDir::new().unwrap();
    let value = json!({
        "version": 1, "nodes": 2, "unary": [[0, 0], [0, 0]],
        "terms": [{"type": "cardinality", "members": [0, 1], "g": [4, 3, 1]}]
    });
    let out = run(&["normalize"], &write(&dir, "frac.json", &value));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_is_deterministic_and_valid() {
    let dir = TempDir::new().unwrap();
    let gen = |seed: &str, name: &str| {
        let path = dir.path().join(name);
        let out = bin()
            .args(["generate", "--nodes", "9", "--terms", "mixed:5:6,pairwise:3", "--max-value", "40", "--seed", seed])
            .arg("--output")
            .arg(&path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        path
    };
    let a = gen("11", "a.json");
    let b = gen("11", "b.json");
    let c = gen("12", "c.json");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
    for path in [&a, &c] {
        assert_eq!(run(&["validate"], path).status.code(), Some(0));
        // Seeds 11 and 12: the solver and the oracle agree.
        let solved = stdout_json(&run(&["solve"], path));
        let oracle = stdout_json(&run(&["oracle"], path));
        assert_eq!(solved["minimum"], oracle["minimum"]);
    }
    let bad = bin().args(["generate", "--nodes", "4", "--terms", "cubic:2"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn oracle_rejects_21_nodes() {
    let dir = TempDir::new().unwrap();
    let value = json!({"version": 1, "nodes": 21, "unary": vec![[0, 0]; 21], "terms": []});
    let input = write(&dir, "big.json", &value);
    assert_eq!(run(&["oracle"], &input).status.code(), Some(2));
    assert!(run(&["solve"], &input).status.success());
}
