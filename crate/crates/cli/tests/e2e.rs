//! End-to-end exercises of the `hypercolor` binary: every subcommand, the
//! instance file surface, and the thread-cap environment variable.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypercolor"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn hypercolor");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn gen_check_run_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("g.hrg");
    run_ok(bin().args([
        "gen", "--n", "1500", "--alpha", "0.7", "--C", "0", "--seed", "11", "--out",
    ]).arg(&instance));

    let text = std::fs::read_to_string(&instance).unwrap();
    assert!(text.starts_with("hrg-instance v1\n"));

    let report = dir.path().join("report.json");
    let out = run_ok(bin()
        .args(["check", "--in"])
        .arg(&instance)
        .args(["--lemma", "all", "--validate", "--json"])
        .arg(&report));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("adjacency invariant holds"));
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(parsed.as_array().unwrap().len() >= 8);

    let trace = dir.path().join("trace.json");
    let out = run_ok(bin()
        .args(["run", "--in"])
        .arg(&instance)
        .args(["--algo", "rctdeg", "--colours", "128", "--seed", "3", "--trace"])
        .arg(&trace));
    assert!(String::from_utf8_lossy(&out.stdout).contains("completed in"));
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert!(parsed["rounds"][0]["uncoloured_per_level"].is_array());
    assert!(parsed["rounds"][0]["min_palette"].is_number());
}

#[test]
fn gen_is_reproducible_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.hrg");
    let b = dir.path().join("b.hrg");
    for p in [&a, &b] {
        run_ok(bin()
            .args(["gen", "--n", "700", "--alpha", "0.8", "--seed", "5", "--out"])
            .arg(p));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn det_reports_palette_failures_as_errors() {
    // On a plain instance at this size the outer one-round construction
    // needs more colours than its range; the command must fail loudly.
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("g.hrg");
    run_ok(bin()
        .args(["gen", "--n", "1500", "--alpha", "0.7", "--seed", "11", "--out"])
        .arg(&instance));
    let out = bin()
        .args(["det", "--in"])
        .arg(&instance)
        .args(["--out"])
        .arg(dir.path().join("col.json"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("outer palette too small"));
}

#[test]
fn adversarial_run_finds_a_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("g.hrg");
    run_ok(bin()
        .args(["gen", "--n", "4096", "--alpha", "0.6", "--C", "4", "--seed", "2", "--out"])
        .arg(&instance));
    let out = run_ok(bin()
        .args(["run", "--in"])
        .arg(&instance)
        .args(["--algo", "rctid", "--ids", "adversarial", "--colours", "1", "--seed", "2"]));
    assert!(String::from_utf8_lossy(&out.stdout).contains("never terminates"));
}

#[test]
fn sweep_outputs_and_thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.toml");
    std::fs::write(
        &config,
        r#"
            alphas = [0.7]
            exponents = ["eps_delta", 0.4]
            ns = [512]
            seeds = 4
            algo = "symmetric"
            ids = "index"
            master_seed = 9
        "#,
    )
    .unwrap();
    let out1 = dir.path().join("out1");
    let out2 = dir.path().join("out2");
    for (out, threads) in [(&out1, "1"), (&out2, "2")] {
        run_ok(bin()
            .env("HYPERCOLOR_THREADS", threads)
            .args(["sweep", "--config"])
            .arg(&config)
            .args(["--out"])
            .arg(out));
    }
    for name in ["cells.csv", "cells.json", "heatmap_n512.txt", "matrix_n512.csv"] {
        assert!(out1.join(name).exists(), "{name} missing");
    }
    let csv1 = std::fs::read(out1.join("cells.csv")).unwrap();
    let csv2 = std::fs::read(out2.join("cells.csv")).unwrap();
    assert_eq!(csv1, csv2, "sweep output must not depend on the thread cap");
    let header = String::from_utf8_lossy(&csv1);
    assert!(header
        .starts_with("alpha,f,n,seed_count,completed2,completed_const,round_limit,never,mean_rounds"));
}

#[test]
fn corrupt_instances_are_rejected_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.hrg");
    std::fs::write(&path, "hrg-instance v1\n10 0.75 0 0 4.605170185988092 1\n0 1.0 oops\nedges 0\n").unwrap();
    let out = bin()
        .args(["check", "--in"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}
