use std::process::{Command, Output};

fn resfin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resfin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn member_accepts_tower_elements() {
    let out = resfin(&["member", "t^3 a^8 t^-3", "--in", "H"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout(&out), "true\n");
}

#[test]
fn member_rejects_non_members() {
    let out = resfin(&["member", "t^3 a^4 t^-3", "--in", "H"]);
    assert_eq!(exit_code(&out), 1);
    assert_eq!(stdout(&out), "false\n");
}

#[test]
fn member_queries_approximation_subgroups() {
    let out = resfin(&["member", "t^4", "--in", "Hr:3"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout(&out), "true\n");

    let out = resfin(&["member", "t^3", "--in", "Hr:3"]);
    assert_eq!(exit_code(&out), 1);
    assert_eq!(stdout(&out), "false\n");
}

#[test]
fn member_reports_parse_errors() {
    let out = resfin(&["member", "a^", "--in", "H"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).starts_with("error:"));
}

#[test]
fn member_rejects_unknown_targets() {
    let out = resfin(&["member", "a", "--in", "G"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("expected H or Hr:<r>"));
}

#[test]
fn member_respects_the_vertex_budget() {
    let out = resfin(&["member", "t^3 a^8 t^-3", "--in", "H", "--max-vertices", "2"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("over the limit"));
}

#[test]
fn certify_then_check_round_trips() {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("cert.json");
    let path = path.to_str().expect("utf-8 path");

    let out = resfin(&["certify", "[t^2 a^-1 t^-2] * [t^2 a t^-2]'", "--out", path]);
    assert_eq!(exit_code(&out), 0);
    assert!(stderr(&out).contains("case=AlternatingProduct"));

    let out = resfin(&["check", path]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).starts_with("valid:"));
}

#[test]
fn certify_handles_single_syllables() {
    let out = resfin(&["certify", "[a]"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stderr(&out).contains("case=AmalgamSyllable"));
    assert!(stdout(&out).contains("\"moves-basepoint\""));
}

#[test]
fn certify_refuses_trivial_elements() {
    let out = resfin(&["certify", ""]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("trivial"));

    // a tower element conjugated across the gluing is trivial in the double
    let out = resfin(&["certify", "[t a^2 t^-1] * [t a^-2 t^-1]'"]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn certify_reports_parse_errors() {
    let out = resfin(&["certify", "[a"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("unclosed"));
}

#[test]
fn check_flags_tampered_certificates() {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("cert.json");
    let out = resfin(&["certify", "[a t] * [t^2]'", "--out", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);

    let text = std::fs::read_to_string(&path).expect("certificate written");
    let tampered = text.replacen("\"observed\": true", "\"observed\": false", 1);
    assert_ne!(text, tampered);
    std::fs::write(&path, tampered).expect("rewrite");

    let out = resfin(&["check", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);
    assert!(stdout(&out).starts_with("INVALID"));
}

#[test]
fn check_rejects_malformed_files() {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("junk.json");
    std::fs::write(&path, "{\"not\": \"a certificate\"}").expect("write junk");

    let out = resfin(&["check", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);

    let out = resfin(&["check", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("cannot read"));
}

#[test]
fn dot_output_is_deterministic() {
    let first = resfin(&["dot", "--bhat-r", "3"]);
    let second = resfin(&["dot", "--bhat-r", "3"]);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(first.stdout, second.stdout);

    let text = stdout(&first);
    assert!(text.starts_with("digraph core {"));
    assert_eq!(text.matches(" -> ").count(), 19);
}

#[test]
fn dot_writes_to_files() {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("graph.dot");
    let out = resfin(&["dot", "--bhat", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);

    let text = std::fs::read_to_string(&path).expect("dot written");
    assert_eq!(text, stdout(&resfin(&["dot", "--bhat", "2"])));
    assert_eq!(text.matches(" -> ").count(), 9);
}

#[test]
fn dot_targets_are_mutually_exclusive() {
    let out = resfin(&["dot", "--bhat", "1", "--hr", "2"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn fold_prints_the_folded_graph() {
    let out = resfin(&["fold", "--gens", "a", "t^2"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("2 vertices, 3 edges, basepoint 0\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn verify_passes_with_small_bounds() {
    let out = resfin(&["verify", "--n", "2", "--m", "3", "--l", "3"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("membership-agreement: 3 checks, 0 failed"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_skips_the_sweep_at_l_zero() {
    let out = resfin(&["verify", "--n", "1", "--m", "1", "--l", "0"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("membership-agreement: skipped (l = 0)"));
}

#[test]
fn verify_output_is_byte_deterministic() {
    let args = ["verify", "--n", "2", "--m", "2", "--l", "2", "--seed", "7"];
    let first = resfin(&args);
    let second = resfin(&args);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}
