use std::process::{Command, Output};

fn btq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_btq")).args(args).env_remove("BTQ_BUDGET_MS").output().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        &["quotient", "--q", "2", "--d", "2", "--ideal", "t+1", "--alpha", "4", "--stab-cap", "8"][..],
        &["homology", "--q", "2", "--d", "3", "--ideal", "t", "--alpha", "3"],
        &["symbols", "--q", "3", "--d", "2", "--ideal", "t", "--alpha", "4"],
    ] {
        let (a, b) = (btq(args), btq(args));
        assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn missing_ideal_is_a_config_error() {
    let o = btq(&["quotient", "--q", "2", "--d", "2", "--alpha", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("--ideal") && err.contains("Usage: btq quotient"), "{err}");
}

#[test]
fn bad_inputs_are_config_errors() {
    assert_eq!(btq(&["quotient", "--q", "4", "--d", "2", "--ideal", "t", "--alpha", "4"]).status.code(), Some(2));
    assert_eq!(btq(&["quotient", "--q", "2", "--d", "2", "--ideal", "t", "--alpha", "1"]).status.code(), Some(2));
    assert_eq!(
        btq(&["quotient", "--q", "2", "--d", "3", "--ideal", "t", "--alpha", "3", "--dot"]).status.code(),
        Some(2)
    );
    assert_eq!(btq(&["ghom", "--from-quotient", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn serre_half_line_as_dot() {
    let o = btq(&["quotient", "--q", "2", "--d", "2", "--ideal", "1", "--alpha", "4", "--dot"]);
    assert!(o.status.success());
    let dot = String::from_utf8(o.stdout).unwrap();
    let labels: Vec<&str> = dot
        .lines()
        .filter(|l| l.contains("label=") && !l.contains("dashed"))
        .map(|l| l.split("label=\"").nth(1).unwrap().split('"').next().unwrap())
        .collect();
    let mut sorted = labels.clone();
    sorted.sort_by_key(|x| x.parse::<u32>().unwrap());
    assert_eq!(sorted, ["4", "6", "8", "16"]);
    assert_eq!(dot.matches(" -- ").count(), 4);
}

#[test]
fn verify_reports_index_one() {
    let o = btq(&["verify", "--q", "2", "--d", "2", "--ideal", "t", "--alpha", "5"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["rank_ok"], true);
    assert_eq!(v["index"], 1);
    assert_eq!(v["divides"], true);
    assert_eq!(v["bound"], 3);
}

#[test]
fn config_file_with_flag_override() {
    let dir = std::env::temp_dir().join(format!("btq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# level (t)\nq = 3\nd = 2\nideal = t\nalpha = 4\n").unwrap();
    let from_file = json(&btq(&["homology", "--config", cfg.to_str().unwrap()]));
    assert_eq!(from_file["group"]["q"], 3);
    let flagged = json(&btq(&["homology", "--config", cfg.to_str().unwrap(), "--q", "2"]));
    assert_eq!(flagged["group"]["q"], 2);
    assert_eq!(flagged["rank"], 2);
}

#[test]
fn quotient_file_feeds_ghom_and_dot() {
    let dir = std::env::temp_dir().join(format!("btq-cli-q-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("q.json");
    let f = file.to_str().unwrap();
    let o = btq(&["quotient", "--q", "2", "--d", "2", "--ideal", "t", "--alpha", "4", "--stab-cap", "16", "--out", f]);
    assert!(o.status.success() && o.stdout.is_empty());
    let g = btq(&["ghom", "--from-quotient", f, "--max-s", "2"]);
    assert!(g.status.success());
    let v = json(&g);
    assert_eq!(v["failed"], 0);
    assert!(v["checked"].as_u64().unwrap() > 0);
    let dot = btq(&["export-dot", "--from-quotient", f]);
    assert!(String::from_utf8(dot.stdout).unwrap().starts_with("graph quotient {"));
}

#[test]
fn exhausted_budget_exits_with_three() {
    let o = Command::new(env!("CARGO_BIN_EXE_btq"))
        .args(["verify", "--q", "2", "--d", "3", "--ideal", "t"])
        .env("BTQ_BUDGET_MS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}
