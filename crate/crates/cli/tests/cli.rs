use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn trustmaze(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trustmaze"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn simulate(scenario: &str, dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["simulate", "--scenario", scenario, "--out-dir", dir.to_str().unwrap(), "--quiet"];
    args.extend_from_slice(extra);
    trustmaze(&args)
}

const GOOD: &str = r#"
schema_version = 1
[maze]
text = """
#####
#S.E#
#####
"""
[[agents]]
role = "leader"
heading = "east"
[[cpt.leader]]
then = { forward = 1.0 }
"#;

#[test]
fn validate_shipped_and_broken_scenarios() {
    let o = trustmaze(&["validate", "--scenario", "default"]);
    assert!(o.status.success(), "{}", stderr(&o));

    let dir = tempfile::tempdir().unwrap();
    let bad_row = dir.path().join("bad_row.toml");
    fs::write(&bad_row, GOOD.replace("forward = 1.0", "forward = 0.5, stop = 0.4")).unwrap();
    let o = trustmaze(&["validate", "--scenario", bad_row.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("[cpt] leader[0]"), "{}", stderr(&o));

    let no_exit = dir.path().join("no_exit.toml");
    fs::write(&no_exit, GOOD.replace("#S.E#", "#S..#")).unwrap();
    let o = trustmaze(&["validate", "--scenario", no_exit.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("[maze]") && stderr(&o).contains("no exit"), "{}", stderr(&o));
}

#[test]
fn maze_file_relative_to_scenario() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("room.txt"), "#####\n#S.E#\n#####\n").unwrap();
    let text = GOOD.replace("text = \"\"\"\n#####\n#S.E#\n#####\n\"\"\"", "file = \"room.txt\"");
    let path = dir.path().join("s.toml");
    fs::write(&path, text).unwrap();
    let o = trustmaze(&["validate", "--scenario", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn simulate_writes_outputs_reproducibly() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = simulate("default", d.path(), &["--seed", "1"]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in ["trace.jsonl", "metrics.json", "plot.csv"] {
        let x = fs::read(a.path().join(f)).unwrap();
        let y = fs::read(b.path().join(f)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{f} differs");
    }
    let metrics: serde_json::Value = serde_json::from_slice(&fs::read(a.path().join("metrics.json")).unwrap()).unwrap();
    assert!(metrics["ticks_to_all_escape"].is_u64());
    assert_eq!(metrics["seed"], 1);

    let mut rdr = csv::Reader::from_path(a.path().join("plot.csv")).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(
        header,
        ["tick", "observer", "target", "function", "capability", "predictability", "integrity", "composite", "rung"]
    );
    let keys: Vec<(u64, u64, u64)> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap())
        })
        .collect();
    assert!(keys.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn collector_fails_shows_the_crossing() {
    let d = tempfile::tempdir().unwrap();
    let o = simulate("collector-fails", d.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let metrics: serde_json::Value = serde_json::from_slice(&fs::read(d.path().join("metrics.json")).unwrap()).unwrap();
    assert!(metrics["allocation_switches"].as_u64().unwrap() >= 1);

    let mut rdr = csv::Reader::from_path(d.path().join("plot.csv")).unwrap();
    let composites: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap())
        .filter(|r| &r[1] == "0" && &r[2] == "1" && &r[3] == "gather_tokens")
        .map(|r| r[7].parse().unwrap())
        .collect();
    let first_above = composites.iter().position(|c| *c >= 0.4).unwrap();
    assert!(composites[first_above..].iter().any(|c| *c < 0.4));
}

#[test]
fn batch_aggregates_in_seed_order() {
    let d = tempfile::tempdir().unwrap();
    let o = trustmaze(&[
        "batch",
        "--scenario",
        "default",
        "--seeds",
        "1..10",
        "--out-dir",
        d.path().to_str().unwrap(),
        "--quiet",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for seed in 1..=10 {
        assert!(d.path().join(format!("trace_seed_{seed}.jsonl")).exists());
    }
    let mut rdr = csv::Reader::from_path(d.path().join("aggregate.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (seed_col, ticks_col) = (col("seed"), col("ticks_to_all_escape"));
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let seeds: Vec<u64> = rows.iter().map(|r| r[seed_col].parse().unwrap()).collect();
    assert_eq!(seeds, (1..=10).collect::<Vec<_>>());
    let ticks: Vec<f64> = rows.iter().filter_map(|r| r[ticks_col].parse().ok()).collect();
    let mean = ticks.iter().sum::<f64>() / ticks.len() as f64;

    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(d.path().join("batch_summary.json")).unwrap()).unwrap();
    assert!((summary["mean_ticks_to_all_escape"].as_f64().unwrap() - mean).abs() < 1e-9);

    // a batch seed writes the same trace as a single run of that seed
    let single = tempfile::tempdir().unwrap();
    simulate("default", single.path(), &["--seed", "4"]);
    assert_eq!(
        fs::read(single.path().join("trace.jsonl")).unwrap(),
        fs::read(d.path().join("trace_seed_4.jsonl")).unwrap()
    );
}

#[test]
fn empty_seed_range_is_a_usage_error() {
    let d = tempfile::tempdir().unwrap();
    let o = trustmaze(&["batch", "--scenario", "default", "--seeds", "5..2", "--out-dir", d.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn replay_matches_and_detects_tampering() {
    let d = tempfile::tempdir().unwrap();
    simulate("integrity-breach", d.path(), &["--max-ticks", "20"]);
    let trace = d.path().join("trace.jsonl");
    let o = trustmaze(&["replay", "--scenario", "integrity-breach", "--max-ticks", "20", "--trace", trace.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));

    let text = fs::read_to_string(&trace).unwrap();
    let tampered = text.replacen("\"tick\":1,", "\"tick\":2,", 1);
    fs::write(&trace, tampered).unwrap();
    let o = trustmaze(&["replay", "--scenario", "integrity-breach", "--max-ticks", "20", "--trace", trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("divergence at seq 0"), "{}", stderr(&o));
}

#[test]
fn runtime_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gap.toml");
    fs::write(&path, GOOD.replace("then = { forward = 1.0 }", "when = { time_bucket = 1 }\nthen = { stop = 1.0 }")
        .replace("[[agents]]", "[engine]\ntime_bucket_ticks = 1\n[[agents]]"))
    .unwrap();
    let o = simulate(path.to_str().unwrap(), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}
