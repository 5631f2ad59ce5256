use std::path::Path;
use std::process::{Command, Output};

fn bbg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bbg"))
        .args(args)
        .env_remove("BBG_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn without_metadata(text: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("metadata");
    v
}

#[test]
fn sum_text_shows_published_digits() {
    let o = bbg(&["sum", "--n", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("2.1195"));
}

#[test]
fn precondition_violation_exits_2_naming_the_bound() {
    let o = bbg(&["sum", "--n", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("1 <= N"), "{err}");
    assert_eq!(bbg(&["wild", "--delta", "3"]).status.code(), Some(2));
    assert_eq!(bbg(&["sum", "--alpha", "one"]).status.code(), Some(2));
}

#[test]
fn json_numbers_are_decimal_strings() {
    let o = bbg(&["sum", "--n", "100", "--alpha", "1.0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let s_n = v["result"]["S_N"].as_str().expect("S_N is a string");
    let parsed: f64 = s_n.parse().unwrap();
    assert!((parsed - 2.0232028343).abs() < 1e-9);
    assert_eq!(v["precision_bits"], 128);
}

#[test]
fn identical_runs_are_byte_identical_outside_metadata() {
    let args = ["decompose", "--n", "2000", "--format", "json"];
    let a = stdout(&bbg(&args));
    let b = stdout(&bbg(&args));
    assert_eq!(without_metadata(&a), without_metadata(&b));
    let strip = |t: &str| t.lines().filter(|l| !l.contains("runtime_ms")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&a), strip(&b));
    let csv = ["plotdata", "wild", "--max", "3000"];
    assert_eq!(bbg(&csv).stdout, bbg(&csv).stdout);
}

#[test]
fn plotdata_row_counts() {
    let trace = stdout(&bbg(&["plotdata", "trace", "--checkpoints", "1000,10000"]));
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines[0], "N,S_N,gap");
    assert_eq!(lines.len(), 3);

    let wild = stdout(&bbg(&["plotdata", "wild", "--delta", "0.01", "--max", "10000"]));
    assert_eq!(wild.lines().count(), 452);
    assert!(wild.starts_with("n,sin_n,epsilon,"));

    let harmonics = stdout(&bbg(&["plotdata", "harmonics", "--kmax", "4", "--terms", "200"]));
    let rows: Vec<&str> = harmonics.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    let k1: f64 = rows[0].split(',').nth(2).unwrap().parse().unwrap();
    assert!((k1 - 0.374214).abs() < 1e-6);

    let disc = stdout(&bbg(&["plotdata", "discrepancy", "--checkpoints", "100,1000"]));
    assert_eq!(disc.lines().next(), Some("N,D_star,N_times_D_star,ratio_to_log_N"));
    assert_eq!(disc.lines().count(), 3);
}

#[test]
fn unknown_plot_kind_exits_2() {
    assert_eq!(bbg(&["plotdata", "scatter"]).status.code(), Some(2));
    assert_eq!(bbg(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# small run\nn = 10\nformat = \"csv\"\nprec = 96\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_file = stdout(&bbg(&["sum", "--config", cfg]));
    assert!(from_file.starts_with("N,S_N\n10,"), "{from_file}");

    let overridden = bbg(&["sum", "--config", cfg, "--n", "100", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&overridden)).unwrap();
    assert_eq!(v["result"]["N"], 100);
    assert_eq!(v["precision_bits"], 96);

    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "colour = 3\n").unwrap();
    assert_eq!(bbg(&["sum", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn precision_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_bbg"))
        .args(["cf", "--format", "json"])
        .env("BBG_PRECISION_BITS", "192")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["precision_bits"], 192);
    let q: Vec<&str> = v["result"]["partial_quotients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert_eq!(&q[..7], ["6", "3", "1", "1", "7", "2", "146"]);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cf.csv");
    let o = bbg(&["cf", "--depth", "7", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(Path::new(&path)).unwrap();
    assert!(text.starts_with("j,a_j,p_j,q_j\n"));
    assert!(text.contains(",146,"), "{text}");
    assert!(text.trim_end().ends_with(",103993"));
}

#[test]
fn other_commands_run() {
    for args in [
        vec!["harmonics", "--kmax", "2", "--terms", "50"],
        vec!["wild", "--max", "2000", "--format", "json"],
        vec!["discrepancy", "--n", "500", "--format", "json"],
        vec!["phi", "--s", "2", "--terms", "500"],
        vec!["decompose", "--n", "100", "--format", "csv"],
        vec!["sum", "--n", "500", "--exact"],
    ] {
        let o = bbg(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn report_marks_failures_and_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = bbg(&["report", "--out", path.to_str().unwrap()]);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let checks = doc["result"]["checks"].as_array().unwrap();
    let find = |name: &str| checks.iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("{name}"));
    assert_eq!(find("M_partial_1e6")["target"], "1.791759469228");
    assert_eq!(find("wild_count_451")["pass"], true);
    assert_eq!(find("cf_quotients")["computed"], "[0,6,3,1,1,7,2,146]");
    let all_pass = checks.iter().all(|c| c["pass"] == true);
    assert_eq!(doc["result"]["passed"], all_pass);
    assert_eq!(o.status.code(), Some(if all_pass { 0 } else { 1 }));
}
