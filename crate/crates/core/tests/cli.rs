use std::path::Path;
use std::process::Command;

use surface_rigidity::cli::{
    run_args, AnalyzeOutput, CongruenceOutput, Outcome, SparsityOutput, EXIT_INPUT, EXIT_NEGATIVE,
    EXIT_OK,
};
use surface_rigidity::flextrace::{TraceSummary, TrajectoryRecord};
use surface_rigidity::hendrickson::{GlobalRigidityVerdict, Verdict};
use surface_rigidity::Framework;

const K4: &str = r#"{"n": 4, "edges": [[1,2],[1,3],[1,4],[2,3],[2,4],[3,4]]}"#;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Outcome {
    run_args(std::iter::once("surfrig").chain(args.iter().copied()))
}

/// Parses the output and checks that re-serializing it gives the same JSON.
fn round_trip<T>(text: &str) -> T
where
    T: serde::de::DeserializeOwned + serde::Serialize,
{
    let value: serde_json::Value = serde_json::from_str(text).unwrap();
    let parsed: T = serde_json::from_value(value.clone()).unwrap();
    assert_eq!(serde_json::to_value(&parsed).unwrap(), value);
    parsed
}

#[test]
fn sparsity_on_k4_cylinder() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k4.json", K4);
    let out = run(&["sparsity", &g, "--surface", "cylinder"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let s: SparsityOutput = round_trip(&out.stdout);
    assert!(s.is_tight && s.is_sparse);
    assert_eq!(s.combinatorial_isostatic, Some(true));

    let out = run(&["sparsity", &g, "--surface", "ellipsoid"]);
    let s: SparsityOutput = round_trip(&out.stdout);
    assert_eq!(s.combinatorial_isostatic, None);
}

#[test]
fn hendrickson_on_k4_cylinder() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k4.json", K4);
    let out = run(&["hendrickson", &g, "--surface", "cylinder"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v: GlobalRigidityVerdict = round_trip(&out.stdout);
    assert_eq!(v.verdict, Verdict::FailsNecessary);
}

#[test]
fn sample_is_deterministic_and_analyzable() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k4.json", K4);
    let a = run(&["sample", &g, "--surface", "cylinder", "--seed", "5"]);
    let b = run(&["sample", &g, "--surface", "cylinder", "--seed", "5"]);
    assert_eq!(a.code, EXIT_OK, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["sample", &g, "--surface", "cylinder", "--seed", "6"]);
    assert_ne!(a.stdout, c.stdout);

    let fw: Framework = serde_json::from_str(&a.stdout).unwrap();
    assert_eq!(fw.n(), 4);
    let f = write(dir.path(), "fw.json", &a.stdout);
    let out = run(&["analyze", &f]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let r: AnalyzeOutput = round_trip(&out.stdout);
    assert!(r.report.is_isostatic);
    assert!(r.flex.is_none());
}

#[test]
fn analyze_uses_exact_rank_for_rational_input() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k4.json", K4);
    let a = run(&["sample", &g, "--surface", "sphere", "--rational"]);
    assert_eq!(a.code, EXIT_OK, "{}", a.stderr);
    let f = write(dir.path(), "fw.json", &a.stdout);
    let r: AnalyzeOutput = round_trip(&run(&["analyze", &f]).stdout);
    assert!(r.report.exact);
    assert_eq!(r.report.rank_df, 9);
}

#[test]
fn analyze_reports_flex_of_mechanism() {
    let dir = tempfile::tempdir().unwrap();
    let path = r#"{"n": 3, "edges": [[1,2],[2,3]]}"#;
    let g = write(dir.path(), "p3.json", path);
    let a = run(&["sample", &g, "--surface", "cylinder"]);
    let f = write(dir.path(), "fw.json", &a.stdout);
    let r: AnalyzeOutput = round_trip(&run(&["analyze", &f]).stdout);
    assert!(!r.report.is_infinitesimally_rigid);
    assert_eq!(r.flex.map(|v| v.len()), Some(9));
}

#[test]
fn trace_writes_records_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k4.json", K4);
    let a = run(&["sample", &g, "--surface", "cylinder"]);
    let f = write(dir.path(), "fw.json", &a.stdout);
    let traj = dir.path().join("traj.jsonl");
    let out = run(&["trace", &f, "--edge", "1,2", "--out", traj.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let summary: TraceSummary = round_trip(&out.stdout);
    assert!(summary.closed);
    // K4 is complete, so any equivalent realization is congruent
    assert!(summary.witness.is_none());

    let text = std::fs::read_to_string(&traj).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.len() > 10);
    let first: TrajectoryRecord = round_trip(lines[0]);
    assert_eq!(first.t, 0);
    let last: TraceSummary = round_trip(lines[lines.len() - 1]);
    assert_eq!(last, summary);
}

#[test]
fn congruent_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k4.json", K4);
    let a = write(dir.path(), "a.json", &run(&["sample", &g, "--surface", "cone", "--seed", "1"]).stdout);
    let b = write(dir.path(), "b.json", &run(&["sample", &g, "--surface", "cone", "--seed", "2"]).stdout);
    let same = run(&["congruent", &a, &a]);
    assert_eq!(same.code, EXIT_OK);
    let c: CongruenceOutput = round_trip(&same.stdout);
    assert!(c.congruent);
    // four vertices are too few on the cone to force a surface isometry
    assert!(!c.surface_congruent);
    let diff = run(&["congruent", &a, &b]);
    assert_eq!(diff.code, EXIT_NEGATIVE);
    assert!(!round_trip::<CongruenceOutput>(&diff.stdout).congruent);
}

#[test]
fn input_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"n": 2, "edges": [[1,1]]}"#);
    assert_eq!(run(&["sparsity", &bad, "--surface", "sphere"]).code, EXIT_INPUT);
    assert_eq!(run(&["sparsity", "/no/such/file.json"]).code, EXIT_INPUT);
    let g = write(dir.path(), "k4.json", K4);
    assert_eq!(run(&["sparsity", &g]).code, EXIT_INPUT, "graph input needs --surface");
    assert_eq!(run(&["frobnicate"]).code, EXIT_INPUT);

    // off-surface point
    let off = r#"{"surface": {"kind": "sphere"}, "graph": {"n": 1, "edges": []}, "config": [[2.0, 0.0, 0.0]]}"#;
    let off = write(dir.path(), "off.json", off);
    assert_eq!(run(&["analyze", &off]).code, EXIT_INPUT);

    let fw = write(dir.path(), "k4fw.json", &run(&["sample", &g, "--surface", "cylinder"]).stdout);
    assert_eq!(run(&["trace", &fw, "--edge", "1,5"]).code, EXIT_INPUT);

    // removing an edge of K5 leaves a rigid graph, not a mechanism
    let k5 = r#"{"n": 5, "edges": [[1,2],[1,3],[1,4],[1,5],[2,3],[2,4],[2,5],[3,4],[3,5],[4,5]]}"#;
    let k5 = write(dir.path(), "k5.json", k5);
    let fw = write(dir.path(), "k5fw.json", &run(&["sample", &k5, "--surface", "cylinder"]).stdout);
    assert_eq!(run(&["trace", &fw, "--edge", "1,2"]).code, EXIT_INPUT);
}

#[test]
fn binary_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "k4.json", K4);
    let out = Command::new(env!("CARGO_BIN_EXE_surfrig"))
        .args(["sparsity", &g, "--surface", "cylinder"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let s: SparsityOutput = serde_json::from_slice(&out.stdout).unwrap();
    assert!(s.is_tight);
}
