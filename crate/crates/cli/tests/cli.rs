//! End-to-end tests driving the compiled binary the way a user would:
//! real files in a temp directory, real process exits, real output.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_evrptw");

/// Two customers on a short loop plus one station nobody needs.
/// Optimal plan: one vehicle, distance 16, time 36, weighted 10052.
const ROUNDTRIP: &str = "\
StringID Type x y demand ReadyTime DueDate ServiceTime
D0 d 0.0 0.0 0.0 0.0 1000.0 0.0
C1 c 3.0 4.0 10.0 0.0 1000.0 10.0
C2 c -3.0 4.0 10.0 0.0 1000.0 10.0
S0 f 0.0 2.0 0.0 0.0 1000.0 0.0

Q Vehicle fuel tank capacity /60.0/
C Vehicle load capacity /100.0/
r fuel consumption rate /1.0/
g inverse refueling rate /0.2/
v average Velocity /1.0/
";

/// The lone customer sits beyond battery range of both the depot and
/// the only station, so no plan exists.
const STRANDED: &str = "\
StringID Type x y demand ReadyTime DueDate ServiceTime
D0 d 0.0 0.0 0.0 0.0 1000.0 0.0
C1 c 500.0 0.0 10.0 0.0 1000.0 10.0
S0 f 2.0 0.0 0.0 0.0 1000.0 0.0

Q Vehicle fuel tank capacity /60.0/
C Vehicle load capacity /100.0/
r fuel consumption rate /1.0/
g inverse refueling rate /0.2/
v average Velocity /1.0/
";

fn write_instance(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).expect("fixture write");
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .output()
        .expect("binary should launch")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("process must exit, not signal")
}

fn solve_to_file(instance: &Path, dir: &TempDir) -> PathBuf {
    let solution = dir.path().join("solution.json");
    let out = run(&[
        "solve",
        "--instance",
        instance.to_str().unwrap(),
        "--output",
        solution.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "solve failed: {}", stderr(&out));
    solution
}

#[test]
fn solve_then_validate_roundtrips() {
    let dir = TempDir::new().unwrap();
    let instance = write_instance(&dir, "roundtrip.txt", ROUNDTRIP);
    let solution = solve_to_file(&instance, &dir);

    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&solution).unwrap()).unwrap();
    assert_eq!(doc["instance"], "roundtrip");
    assert_eq!(doc["objective"]["vehicles"], 1);
    assert_eq!(doc["objective"]["weighted"], 10052.0);

    let out = run(&[
        "validate",
        "--instance",
        instance.to_str().unwrap(),
        "--solution",
        solution.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "validate failed: {}", stderr(&out));
    assert!(
        stdout(&out).contains("valid (weighted objective 10052)"),
        "unexpected verdict: {}",
        stdout(&out)
    );
}

#[test]
fn validate_rejects_a_tampered_objective() {
    let dir = TempDir::new().unwrap();
    let instance = write_instance(&dir, "roundtrip.txt", ROUNDTRIP);
    let solution = solve_to_file(&instance, &dir);

    let mut doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&solution).unwrap()).unwrap();
    doc["objective"]["weighted"] = serde_json::json!(9999.0);
    fs::write(&solution, serde_json::to_string(&doc).unwrap()).unwrap();

    let out = run(&[
        "validate",
        "--instance",
        instance.to_str().unwrap(),
        "--solution",
        solution.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 1, "tampering must fail validation");
    assert!(
        stderr(&out).contains("violation: objective: stored weighted 9999"),
        "missing violation detail: {}",
        stderr(&out)
    );
}

#[test]
fn export_milp_emits_both_row_variants() {
    let dir = TempDir::new().unwrap();
    let instance = write_instance(&dir, "roundtrip.txt", ROUNDTRIP);
    let corrected_path = dir.path().join("model.lp");
    let literal_path = dir.path().join("literal.lp");

    let out = run(&[
        "export-milp",
        "--instance",
        instance.to_str().unwrap(),
        "--output",
        corrected_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "export failed: {}", stderr(&out));
    let out = run(&[
        "export-milp",
        "--instance",
        instance.to_str().unwrap(),
        "--literal",
        "--output",
        literal_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "literal export failed: {}", stderr(&out));

    let corrected = fs::read_to_string(&corrected_path).unwrap();
    let literal = fs::read_to_string(&literal_path).unwrap();
    for section in ["Minimize", "hier_cost:", "Subject To", "Binaries", "End"] {
        assert!(corrected.contains(section), "missing LP section {section}");
    }
    assert_ne!(corrected, literal, "the two variants must differ");
    assert!(
        literal.contains("c9_S0_1:"),
        "literal variant carries the station-pinning rows"
    );
    assert!(
        !corrected.contains("c9_"),
        "corrected variant must not pin station arrivals"
    );
}

#[test]
fn oracle_agrees_with_the_solver() {
    let dir = TempDir::new().unwrap();
    let instance = write_instance(&dir, "roundtrip.txt", ROUNDTRIP);

    let out = run(&["oracle", "--instance", instance.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "oracle failed: {}", stderr(&out));
    assert!(stderr(&out).contains("candidates evaluated"));

    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["objective"]["weighted"], 10052.0);
}

#[test]
fn bench_prints_the_frozen_csv_layout() {
    let dir = TempDir::new().unwrap();
    let instance = write_instance(&dir, "roundtrip.txt", ROUNDTRIP);

    let out = run(&[
        "bench",
        "--instances",
        instance.to_str().unwrap(),
        "--coverages",
        "0.0,0.4",
        "--format",
        "csv",
    ]);
    assert_eq!(exit_code(&out), 0, "bench failed: {}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "instance,coverage,vehicles,distance,time,total_cost,delta_pct,solve_seconds,status"
    );
    assert_eq!(lines.len(), 3, "header plus one row per coverage level");
    assert!(lines[1].starts_with("roundtrip,0,1,16,"));
    assert!(lines[2].starts_with("roundtrip,0.4,1,16,"));
    assert!(lines[1].ends_with(",optimal"));
    assert!(lines[2].ends_with(",optimal"));
}

#[test]
fn plot_writes_a_self_contained_svg() {
    let dir = TempDir::new().unwrap();
    let instance = write_instance(&dir, "roundtrip.txt", ROUNDTRIP);
    let solution = solve_to_file(&instance, &dir);
    let svg_path = dir.path().join("route.svg");

    let out = run(&[
        "plot",
        "--instance",
        instance.to_str().unwrap(),
        "--solution",
        solution.to_str().unwrap(),
        "--output",
        svg_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "plot failed: {}", stderr(&out));
    let svg = fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"), "must emit a bare SVG document");
    assert!(svg.contains("roundtrip"), "title defaults to the instance name");
    assert!(!svg.contains("http://") || svg.contains("http://www.w3.org"),
        "no external references beyond the SVG namespace");
}

#[test]
fn infeasible_instances_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let instance = write_instance(&dir, "stranded.txt", STRANDED);

    let out = run(&["solve", "--instance", instance.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1, "infeasibility is a distinct exit code");
    assert!(
        stderr(&out).contains("no feasible solution"),
        "stderr must explain: {}",
        stderr(&out)
    );
    assert!(stdout(&out).is_empty(), "no solution document on stdout");
}

#[test]
fn usage_errors_exit_with_two() {
    let out = run(&["solve", "--no-such-flag"]);
    assert_eq!(exit_code(&out), 2);

    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("absent.txt");
    let out = run(&["solve", "--instance", missing.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2, "unreadable input is a usage error");
    assert!(stderr(&out).contains("error:"));
}
