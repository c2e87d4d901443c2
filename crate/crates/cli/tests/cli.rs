//! End-to-end checks of the `ftb` binary: artifact round trips, exit
//! codes, and stable output.

use std::path::Path;
use std::process::{Command, Output};

fn ftb(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftb"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn gen_solve_verify_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = ftb(&["gen", "--fixture", "sq4", "--out", "inst.json"], dir.path());
    assert!(out.status.success());

    let out = ftb(
        &["solve", "--instance", "inst.json", "-k", "2", "-m", "2", "--ds", "exact", "--skcs", "exact", "--with-oracle"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("solution  {0,1,2}"), "{text}");
    assert!(text.contains("weight    3"), "{text}");
    assert!(text.contains("ratio     1"), "{text}");

    let out = ftb(
        &["verify", "--instance", "inst.json", "-k", "2", "-m", "2", "--nodes", "0,1,2"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));

    // Two adjacent nodes are not enough for 2-connectivity (size rule).
    let out = ftb(
        &["verify", "--instance", "inst.json", "-k", "2", "-m", "2", "--nodes", "0,1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes_separate_infeasible_from_validation() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ftb(&["gen", "--fixture", "path3", "--out", "p3.json"], dir.path())
        .status
        .success());

    // PATH3 is not 2-connected: infeasible.
    let out = ftb(&["solve", "--instance", "p3.json", "-k", "2", "-m", "2"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // m < k without the override: validation error.
    let out = ftb(&["solve", "--instance", "p3.json", "-k", "1", "-m", "0"], dir.path());
    assert_eq!(out.status.code(), Some(3));

    // k = 0: validation error.
    let out = ftb(&["solve", "--instance", "p3.json", "-k", "0", "-m", "1"], dir.path());
    assert_eq!(out.status.code(), Some(3));

    // Unreadable instance: validation error.
    let out = ftb(&["solve", "--instance", "missing.json", "-k", "1", "-m", "1"], dir.path());
    assert_eq!(out.status.code(), Some(3));

    // Malformed node list: validation error.
    let out = ftb(
        &["verify", "--instance", "p3.json", "-k", "1", "-m", "1", "--nodes", "a,b"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn oracle_steiner_domset_mss_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ftb(&["gen", "--fixture", "pent5", "--out", "p5.json"], dir.path())
        .status
        .success());

    let out = ftb(&["oracle", "--instance", "p5.json", "-k", "2", "-m", "2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("{0,1,2,3,4} (weight 5)"), "{}", stdout(&out));

    let out = ftb(
        &["steiner", "--instance", "p5.json", "-k", "2", "--terminals", "0,1,2", "--skcs", "exact"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("steiner nodes {3,4}"), "{text}");

    let out = ftb(&["domset", "--instance", "p5.json", "-m", "3", "--ds", "exact"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("{0,1,2,3,4}"));

    let out = ftb(&["mss", "--instance", "p5.json", "-k", "2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("violations  0"), "{}", stdout(&out));

    // Block tree dump on verify.
    let out = ftb(
        &[
            "verify",
            "--instance",
            "p5.json",
            "-k",
            "1",
            "-m",
            "1",
            "--nodes",
            "0,1,2,3,4",
            "--dump-blocks",
            "--json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"blocks\""));
}

#[test]
fn solve_json_is_deterministic_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ftb(
        &["gen", "--n", "10", "--seed", "5", "--k-connected", "2", "--out", "g.json"],
        dir.path()
    )
    .status
    .success());
    let args = ["solve", "--instance", "g.json", "-k", "2", "-m", "2", "--with-oracle", "--json"];
    let a = ftb(&args, dir.path());
    let b = ftb(&args, dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b), "solve --json must be byte-identical");
    assert!(stdout(&a).contains("\"feasible\": true"));
    assert!(!stdout(&a).contains("timings"), "timings must not leak into reports");
}

#[test]
fn bench_writes_identical_reports_on_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let args = |csv: &str, json: &str| {
        [
            "bench", "--count", "6", "--seed", "11", "--n-lo", "8", "--n-hi", "10",
            "--csv", csv, "--json-out", json,
        ]
        .map(String::from)
    };
    let run = |csv: &str, json: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_ftb"))
            .args(args(csv, json))
            .current_dir(dir.path())
            .output()
            .expect("binary runs");
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    };
    run("a.csv", "a.json");
    run("b.csv", "b.json");
    let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    assert_eq!(read("a.json"), read("b.json"));
    assert!(!String::from_utf8(read("a.json")).unwrap().contains("ms"));
}
