use std::process::{Command, Output};

fn fitzgerald(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fitzgerald"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn report_on_paper_monoid_exits_with_counterexample_code() {
    let out = fitzgerald(&["--json", "report", "builtin:fitzgerald"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    for p in ["ri", "ur", "ri_star", "ur_star"] {
        assert_eq!(v[p], true, "{p}");
    }
    assert_eq!(v["idempotents_commute"], false);
}

#[test]
fn report_on_a_group_exits_zero() {
    let out = fitzgerald(&["report", "corpus:abelian:Z3"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn endo_json_is_a_monoid_of_order_six() {
    let out = fitzgerald(&["--json", "endo", "builtin:fitzgerald"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["order"], 6);
    assert_eq!(v["table"].as_array().unwrap().len(), 36);
}

#[test]
fn bridge_reports_the_transfer_violation() {
    let out = fitzgerald(&["bridge", "corpus:gset:Z2:2,1,1"]);
    assert_eq!(out.status.code(), Some(4));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("End(A) has order 16"));
    assert!(text.contains("violation: RI*"));
}

#[test]
fn presentation_from_argument() {
    let out = fitzgerald(&["--json", "presentation", "e,f | e e = e ; f f = f ; e f e = e ; f e f = f"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["order"], 5);
}

#[test]
fn presentation_budget_exhaustion_exits_three() {
    let out = fitzgerald(&["presentation", "--rewrite-budget", "2", "a | a a a a a a = 1 ; a a a a = 1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn search_streams_stats_as_last_line() {
    let out = fitzgerald(&["search", "--max-order", "3", "--workers", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let last: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(last["total_monoids"], 10);
}

#[test]
fn search_beyond_the_limit_is_refused() {
    let out = fitzgerald(&["search", "--max-order", "9"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn karoubi_is_consistent_on_paper_monoid() {
    let out = fitzgerald(&["karoubi", "builtin:fitzgerald"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("retract objects: 4"));
    assert!(text.contains("consistent: true"));
}

#[test]
fn corpus_listing_and_missing_input() {
    let out = fitzgerald(&["corpus", "--list", "2"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().lines().count() >= 5);

    let out = fitzgerald(&["report", "does-not-exist.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("error:"));
}

#[test]
fn monoid_file_is_read_as_its_canonical_set() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/fitzgerald_s.json");
    let out = fitzgerald(&["--json", "endo", path]);
    assert!(out.status.success());
    assert_eq!(json(&out)["order"], 6);
}
