mod common;

use std::path::Path;
use std::process::{Command, Output};

use balflow::rational::{rat, ratio};
use balflow::report::ReportFile;
use balflow::Algorithm;
use common::fixture_path;

fn balflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_balflow")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn solve(instance: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["solve", path(instance), "--out", path(out)];
    args.extend_from_slice(extra);
    balflow(&args)
}

#[test]
fn improved_on_parallel_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = solve(&fixture_path("n1.json"), &out, &["--algorithm", "improved"]);
    assert_eq!(o.status.code(), Some(0));
    let r = ReportFile::load(&out).unwrap().report;
    assert_eq!(r.algorithm, Algorithm::ImprovedXy);
    assert_eq!(r.sigma_star(), Some(&rat(0)));
    assert_eq!(r.kappa_star(), Some(&ratio(1, 2)));
}

#[test]
fn auto_dispatches_to_eulerian() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    assert_eq!(solve(&fixture_path("e1.json"), &out, &[]).status.code(), Some(0));
    let r = ReportFile::load(&out).unwrap().report;
    assert_eq!(r.algorithm, Algorithm::Eulerian);
    assert_eq!(r.sigma_star(), Some(&rat(2)));
}

#[test]
fn weighted_instance_rejects_unweighted_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = solve(&fixture_path("w1.json"), &out, &["--algorithm", "improved"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("weights"));
}

#[test]
fn non_submodular_input_names_the_witness() {
    let dir = tempfile::tempdir().unwrap();
    let o = solve(&fixture_path("not_submodular.json"), &dir.path().join("r.json"), &[]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("not submodular") && err.contains("X = {}"), "{err}");
}

#[test]
fn bad_field_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("i.json");
    let text = std::fs::read_to_string(fixture_path("n1.json"))
        .unwrap()
        .replace("\"-1\"", "\"x\"");
    std::fs::write(&input, text).unwrap();
    let o = solve(&input, &dir.path().join("r.json"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("b.payload[1]"));
}

#[test]
fn infeasible_instance_exits_two_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let input = fixture_path("infeasible.json");
    assert_eq!(solve(&input, &out, &[]).status.code(), Some(2));
    assert_eq!(balflow(&["verify", path(&input), path(&out)]).status.code(), Some(0));
}

fn tampered(edit: impl FnOnce(&mut ReportFile)) -> Output {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let input = fixture_path("n1.json");
    assert_eq!(solve(&input, &out, &["--emit-flow"]).status.code(), Some(0));
    let mut file = ReportFile::load(&out).unwrap();
    edit(&mut file);
    std::fs::write(&out, file.to_json()).unwrap();
    balflow(&["verify", path(&input), path(&out)])
}

#[test]
fn verify_accepts_untouched_report() {
    let o = tampered(|_| {});
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn verify_flags_lowered_sigma() {
    let o = tampered(|f| f.report.certificate.as_mut().unwrap().sigma_star -= ratio(1, 100));
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL feasibility"));
}

#[test]
fn verify_flags_swapped_pair() {
    let o = tampered(|f| {
        let c = f.report.certificate.as_mut().unwrap();
        std::mem::swap(&mut c.x, &mut c.y);
    });
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL sign-preconditions"));
}

#[test]
fn verify_refuses_other_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    assert_eq!(solve(&fixture_path("n1.json"), &out, &[]).status.code(), Some(0));
    let o = balflow(&["verify", path(&fixture_path("e1.json")), path(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("instance_digest"));
}

#[test]
fn gen_is_deterministic_and_solvable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = balflow(&[
            "gen",
            "--seed",
            "1",
            "--n",
            "4",
            "--m",
            "6",
            "--kind",
            "cut",
            "--out",
            path(p),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let out = dir.path().join("r.json");
    assert_eq!(solve(&a, &out, &["--emit-flow"]).status.code(), Some(0));
    assert_eq!(balflow(&["verify", path(&a), path(&out)]).status.code(), Some(0));
}

#[test]
fn record_time_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    solve(&fixture_path("n1.json"), &out, &[]);
    assert_eq!(ReportFile::load(&out).unwrap().wall_time_ms, None);
    solve(&fixture_path("n1.json"), &out, &["--record-time"]);
    assert!(ReportFile::load(&out).unwrap().wall_time_ms.is_some());
}

#[test]
fn bench_rows_and_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.csv");
    let o = balflow(&["bench", "--seeds", "0..50", "--sizes", "6x10", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["seed", "n", "m", "algorithm", "iterations", "sfm_calls", "sigma_star"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 150);
    for seed in rows.chunks(3) {
        assert_eq!(
            seed.iter().map(|r| &r[3]).collect::<Vec<_>>(),
            ["basic", "improved", "weighted"]
        );
        assert_eq!(seed[0][6], seed[1][6]);
        assert_eq!(seed[1][6], seed[2][6]);
    }
}

#[test]
fn bench_empty_range_is_header_only() {
    let o = balflow(&["bench", "--seeds", "4..4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(o.stdout).unwrap(),
        "seed,n,m,algorithm,iterations,sfm_calls,sigma_star\n"
    );
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(balflow(&["solve"]).status.code(), Some(1));
    assert_eq!(
        balflow(&["solve", "x.json", "--algorithm", "simplex"]).status.code(),
        Some(1)
    );
    assert_eq!(balflow(&["solve", "/nonexistent/x.json"]).status.code(), Some(1));
}
