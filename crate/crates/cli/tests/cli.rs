use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lienard_cli::report::ClassificationReport;
use serde_json::Value;

fn specs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs")
}

fn lienard(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lienard")).args(args).env_remove("LIENARD_JOBS").output().expect("binary runs")
}

fn spec(name: &str) -> String {
    specs().join(name).display().to_string()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

#[test]
fn golden_examples_exit_zero() {
    for (file, fig, center) in [
        ("system_a.json", "fig12-a", false),
        ("system_b.json", "fig12-b", false),
        ("system_c.json", "fig12-c", false),
        ("system_d.json", "fig12-d", true),
        ("system_e.json", "fig12-e", true),
    ] {
        let o = lienard(&["classify", &spec(file)]);
        assert_eq!(o.status.code(), Some(0), "{file}");
        let r = stdout_json(&o);
        assert_eq!(r["global"]["portrait"], fig, "{file}");
        assert_eq!(r["global"]["global_center"], center, "{file}");
        assert_eq!(r["verification"]["index_check"], true, "{file}");
    }
}

#[test]
fn table_gap_exits_two() {
    let o = lienard(&["classify", &spec("c4_gap.json"), "--at", "infinity"]);
    assert_eq!(o.status.code(), Some(2));
    let r = stdout_json(&o);
    assert_eq!(r["errors"][0]["kind"], "unclassified-by-table");
    assert!(r["infinity"].is_null());
}

#[test]
fn input_errors_exit_one() {
    let o = lienard(&["classify", &spec("linear.json"), "--at", "infinity"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout_json(&o)["error"]["kind"], "ell-one-out-of-scope");

    let origin_only = lienard(&["classify", &spec("linear.json"), "--at", "origin"]);
    assert_eq!(origin_only.status.code(), Some(0));

    let missing = lienard(&["classify", &spec("no_such_file.json")]);
    assert_eq!(missing.status.code(), Some(1));
    assert_eq!(stdout_json(&missing)["error"]["kind"], "io");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"phi": {"3": "1/0"}, "F": {"4": "1"}, "g": {"3": "-1"}}"#).unwrap();
    let o = lienard(&["classify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout_json(&o)["error"]["kind"], "bad-rational");
}

#[test]
fn out_file_matches_stdout_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.json");
    let to_file = lienard(&["classify", &spec("system_d.json"), "--verify", "both", "--out", path.to_str().unwrap()]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    let to_stdout = lienard(&["classify", &spec("system_d.json"), "--verify", "both"]);
    assert_eq!(written.as_bytes(), &to_stdout.stdout[..]);

    let report = ClassificationReport::from_json(&written).unwrap();
    assert_eq!(report.to_json() + "\n", written);
    let v: Value = serde_json::from_str(&written).unwrap();
    assert_eq!(v["verification"]["oracle_agreement"], true);
    assert!(v["verification"]["numeric"]["period_profile"].is_object());
}

#[test]
fn text_format() {
    let o = lienard(&["classify", &spec("system_e.json"), "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("global") && l.contains("fig12-e") && l.contains("global center")));
    assert!(text.lines().any(|l| l.starts_with("index") && l.contains("ok")));
}

#[test]
fn schema_lists_report_keys() {
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json")).unwrap())
            .unwrap();
    let required: Vec<&str> = schema["required"].as_array().unwrap().iter().map(|k| k.as_str().unwrap()).collect();
    for file in ["system_a.json", "system_d.json", "c4_gap.json"] {
        let r = stdout_json(&lienard(&["classify", &spec(file), "--verify", "oracle"]));
        let keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
        let mut sorted = required.clone();
        sorted.sort_unstable();
        let mut got = keys.clone();
        got.sort_unstable();
        assert_eq!(got, sorted, "{file}");
        for (key, def) in schema["properties"].as_object().unwrap() {
            if let Some(req) = def.get("required").and_then(Value::as_array) {
                for k in req {
                    assert!(r[key].get(k.as_str().unwrap()).is_some(), "{file}: {key}.{k}");
                }
            }
        }
    }
}

#[test]
fn render_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (i, disc) in ["local", "poincare", "poincare"].into_iter().enumerate() {
        let path = dir.path().join(format!("{i}.svg"));
        let o = lienard(&["render", &spec("system_e.json"), "--disc", disc, "--seed", "7", "--out", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let svg = std::fs::read_to_string(&path).unwrap();
        assert!(svg.contains("<svg") && svg.trim_end().ends_with("</svg>"));
        outputs.push(svg);
    }
    assert_ne!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);

    let path = dir.path().join("bad.svg");
    let o = lienard(&["render", &spec("linear.json"), "--disc", "poincare", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!path.exists());
}

#[test]
fn sweep_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"phi": {}, "F": {"4": ["1"]}, "g": {"3": ["-1"]}}"#).unwrap();
    let o = lienard(&["sweep", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["cells"], 0);

    let out = dir.path().join("boundary");
    let o = lienard(&["sweep", &spec("boundary_grid.json"), "--jobs", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let summary = stdout_json(&o);
    let on_disk: Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary, on_disk);
    let cells = summary["cells"].as_u64().unwrap() as usize;
    assert_eq!(std::fs::read_dir(out.join("cells")).unwrap().count(), cells);

    let gap = dir.path().join("gap.json");
    std::fs::write(&gap, r#"{"phi": {"1": ["-1"], "2": ["1", "-1"]}, "F": {"8": ["1"]}, "g": {"11": ["-1"]}, "at": "infinity"}"#).unwrap();
    let s = stdout_json(&lienard(&["sweep", gap.to_str().unwrap()]));
    assert_eq!((s["complete"].as_u64(), s["partial"].as_u64()), (Some(1), Some(1)));
    assert_eq!(s["failures"][0]["kind"], "unclassified-by-table");
}
