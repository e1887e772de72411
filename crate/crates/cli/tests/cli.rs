use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn regularize(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regularize")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn features(path: &Path) -> Vec<Value> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v["features"].as_array().unwrap().clone()
}

fn exterior_len(f: &Value) -> usize {
    // Closed ring: the first vertex is repeated at the end.
    f["geometry"]["coordinates"][0].as_array().unwrap().len() - 1
}

#[test]
fn missing_input_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let out = regularize(&["--in", s(&dir.path().join("absent.geojson")), "--out", s(&dir.path().join("o.geojson"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.geojson"));
}

#[test]
fn missing_out_flag_is_fatal() {
    let out = regularize(&["--in", "whatever.geojson"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--out"));
}

#[test]
fn synth_then_run() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.geojson");
    let out = regularize(&["synth", "--out", s(&corpus), "--shape", "rectangle", "--count", "5", "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(features(&corpus).len(), 5);

    let result = dir.path().join("result.geojson");
    let report = dir.path().join("report.json");
    let out = regularize(&["--in", s(&corpus), "--out", s(&result), "--report", s(&report), "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(features(&result).len(), 5);
    let entries: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let entries = entries.as_array().unwrap();
    assert_eq!(entries.len(), 5);
    for e in entries {
        assert_eq!(e["ring"], "exterior");
        assert!(e["report"]["failure"].is_null());
        assert!(e["report"]["output_vertex_count"].as_u64().unwrap() >= 3);
    }
}

#[test]
fn synth_with_clean_doubles_features() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.geojson");
    let out = regularize(&["synth", "--out", s(&corpus), "--count", "4", "--with-clean"]);
    assert!(out.status.success());
    assert_eq!(features(&corpus).len(), 8);
}

#[test]
fn seed_corpus_writes_input_and_regularizes() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.geojson");
    let result = dir.path().join("out.geojson");
    let out =
        regularize(&["--seed-corpus", "shape=l_shape,count=10,seed=7,burrs=5", "--in", s(&input), "--out", s(&result)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let noisy = features(&input);
    let clean = features(&result);
    assert_eq!(noisy.len(), 10);
    assert_eq!(clean.len(), 10);
    for (a, b) in noisy.iter().zip(&clean) {
        assert_eq!(a["properties"], b["properties"]);
        assert!(exterior_len(b) < exterior_len(a));
    }
}

#[test]
fn seed_corpus_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for k in 0..2 {
        let input = dir.path().join(format!("in{k}.geojson"));
        let result = dir.path().join(format!("out{k}.geojson"));
        let out = regularize(&["--seed-corpus", "count=6,seed=11,burrs=2", "--in", s(&input), "--out", s(&result)]);
        assert!(out.status.success());
        outputs.push(std::fs::read(&result).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn bad_corpus_spec_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let out = regularize(&[
        "--seed-corpus",
        "colour=red",
        "--in",
        s(&dir.path().join("i.geojson")),
        "--out",
        s(&dir.path().join("o.geojson")),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn presets_change_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.geojson");
    let mut eps = Vec::new();
    for preset in ["cadastral", "planning"] {
        let report = dir.path().join(format!("{preset}.json"));
        let out = regularize(&[
            "--seed-corpus",
            "count=2,seed=1",
            "--in",
            s(&input),
            "--out",
            s(&dir.path().join("o.geojson")),
            "--preset",
            preset,
            "--report",
            s(&report),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
        eps.push(v[0]["report"]["epsilon_used"].as_f64().unwrap());
    }
    assert_eq!(eps, vec![0.1, 1.0]);
}

#[test]
fn eps_and_preset_conflict() {
    let out = regularize(&["--in", "a.geojson", "--out", "b.geojson", "--eps", "0.3", "--preset", "planning"]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn invalid_eps_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.geojson");
    let out = regularize(&[
        "--seed-corpus",
        "count=1",
        "--in",
        s(&input),
        "--out",
        s(&dir.path().join("o.geojson")),
        "--eps=-1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn despike_first_on_wkt_with_svg() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.wkt");
    std::fs::write(&input, "POLYGON ((0 0, 10 0, 10 0.5, 10.4 0.6, 10 0.7, 10 6, 0 6, 0 0))\n").unwrap();
    let result = dir.path().join("out.wkt");
    let svg = dir.path().join("svg");
    let out = regularize(&[
        "--in",
        s(&input),
        "--out",
        s(&result),
        "--order",
        "despike-first",
        "--corner-mode",
        "project",
        "--svg-dir",
        s(&svg),
        "--jobs",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&result).unwrap();
    assert!(text.starts_with("0\tPOLYGON"), "{text}");
    assert!(!text.contains("10.4"));
    assert_eq!(std::fs::read_dir(&svg).unwrap().count(), 1);
}

#[test]
fn csv_format_flag() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    std::fs::write(&input, "x,y\n0,0\n8,0\n8,5\n0,5\n").unwrap();
    let result = dir.path().join("out.txt");
    let out = regularize(&["--in", s(&input), "--out", s(&result), "--format", "csv", "--gsd", "0.2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&result).unwrap();
    assert!(text.contains("8.000000000"), "{text}");
}
