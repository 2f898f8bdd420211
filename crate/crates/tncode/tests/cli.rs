//! Black-box runs of the installed binary: file round trips, output
//! formats, determinism, and the exit-code contract.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tncode"))
}

fn workdir(test: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tncode-cli-{}-{}", std::process::id(), test));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn demo_build_round_trip_is_deterministic() {
    let dir = workdir("roundtrip");
    let net = dir.join("steane.json");
    let first = bin()
        .args(["demo", "steane-from-422", "--out"])
        .arg(&net)
        .output()
        .unwrap();
    assert!(first.status.success());
    let bytes = fs::read(&net).unwrap();

    // Emitting the same demo again writes identical bytes.
    let second = bin()
        .args(["demo", "steane-from-422", "--out"])
        .arg(&net)
        .output()
        .unwrap();
    assert!(second.status.success());
    assert_eq!(bytes, fs::read(&net).unwrap());

    // Building the emitted file reports the expected code, twice the same,
    // and the machine-readable report is byte-stable too.
    let json1 = dir.join("report1.json");
    let report1 = bin()
        .arg("build")
        .arg(&net)
        .arg("--report")
        .arg(&json1)
        .output()
        .unwrap();
    assert!(report1.status.success());
    let text = stdout(&report1);
    assert!(
        text.starts_with("[[7, 1]] over GF(2)"),
        "unexpected report head: {}",
        text.lines().next().unwrap_or("")
    );
    let json2 = dir.join("report2.json");
    let report2 = bin()
        .arg("build")
        .arg(&net)
        .arg("--report")
        .arg(&json2)
        .output()
        .unwrap();
    assert_eq!(report1.stdout, report2.stdout);
    let body = fs::read_to_string(&json1).unwrap();
    assert_eq!(body, fs::read_to_string(&json2).unwrap());
    assert!(body.contains("\"true_k\": 1"), "report body: {}", body);
}

#[test]
fn exit_codes_follow_the_error_classes() {
    let dir = workdir("exitcodes");

    // Missing input file: usage class.
    let missing = bin()
        .arg("build")
        .arg(dir.join("nope.json"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));

    // Malformed JSON: usage class.
    let broken = dir.join("broken.json");
    fs::write(&broken, "{ not json").unwrap();
    let parse = bin().arg("build").arg(&broken).output().unwrap();
    assert_eq!(parse.status.code(), Some(1));

    // Unrealizable prescription: math class.
    let net = dir.join("one.json");
    let status = bin()
        .args(["demo", "double-trace", "--out"])
        .arg(&net)
        .status()
        .unwrap();
    assert!(status.success());
    let presc = dir.join("presc.json");
    fs::write(
        &presc,
        r#"{"prescribe": [{"leg": "a.4", "pauli": "X"}, {"leg": "a.5", "pauli": "I"}, {"leg": "b.4", "pauli": "I"}, {"leg": "b.5", "pauli": "I"}]}"#,
    )
    .unwrap();
    let rep = bin()
        .arg("represent")
        .arg(&net)
        .arg("--prescribe")
        .arg(&presc)
        .output()
        .unwrap();
    assert_eq!(rep.status.code(), Some(2), "{}", stdout(&rep));

    // Enumeration too large for the decoder: budget class.
    let chain = dir.join("chain.json");
    let status = bin()
        .args(["demo", "chain", "--m", "7", "--out"])
        .arg(&chain)
        .status()
        .unwrap();
    assert!(status.success());
    let decode = bin()
        .arg("decode")
        .arg(&chain)
        .args(["--p", "0.01", "--trials", "2"])
        .output()
        .unwrap();
    assert_eq!(decode.status.code(), Some(3));

    // Bad usage and help.
    let usage = bin().arg("no-such-command").output().unwrap();
    assert_eq!(usage.status.code(), Some(1));
    let help = bin().arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn analyze_prints_distance_and_erasure() {
    let dir = workdir("analyze");
    let net = dir.join("xzzx.json");
    let status = bin()
        .args(["demo", "xzzx", "--out"])
        .arg(&net)
        .status()
        .unwrap();
    assert!(status.success());
    let out = bin()
        .arg("analyze")
        .arg(&net)
        .arg("--distance")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("distance: 3 (exact"),
        "unexpected analyze output: {}",
        text
    );

    // Two erased legs of a distance-3 code are recoverable; erasing the
    // full support of a weight-3 logical representative is not.
    let steane = dir.join("steane.json");
    let status = bin()
        .args(["demo", "steane-from-422", "--out"])
        .arg(&steane)
        .status()
        .unwrap();
    assert!(status.success());
    let erasure = |legs: &str| {
        let out = bin()
            .arg("analyze")
            .arg(&steane)
            .args(["--erasure", legs])
            .output()
            .unwrap();
        assert!(out.status.success());
        stdout(&out)
    };
    assert!(erasure("b.1,b.2").contains("erasure [b.1,b.2]: correctable"));
    assert!(erasure("a.3,b.1,b.2").contains(": not correctable"));
}

#[test]
fn decode_emits_reproducible_csv() {
    let dir = workdir("decodecsv");
    let net = dir.join("steane.json");
    let status = bin()
        .args(["demo", "steane-from-422", "--out"])
        .arg(&net)
        .status()
        .unwrap();
    assert!(status.success());
    let run = || {
        bin()
            .arg("decode")
            .arg(&net)
            .args(["--p", "0.02", "--trials", "50", "--seed", "3"])
            .output()
            .unwrap()
    };
    let a = run();
    assert!(a.status.success());
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("p,trials,failures,rate,ci_low,ci_high")
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("0.02,50,"), "row: {}", row);
    assert_eq!(row.split(',').count(), 6);
    let b = run();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn push_verifies_the_transversal_assignment() {
    let dir = workdir("push");
    let net = dir.join("rm.json");
    let status = bin()
        .args(["demo", "rm-pair", "--out"])
        .arg(&net)
        .status()
        .unwrap();
    assert!(status.success());
    let assign = dir.join("assign.json");
    fs::write(
        &assign,
        r#"{"assign": {"a": {"catalog": "t_bar"}, "b": {"catalog": "tdag_bar"}}}"#,
    )
    .unwrap();
    let dot = dir.join("push.dot");
    let out = bin()
        .arg("push")
        .arg(&net)
        .arg("--assign")
        .arg(&assign)
        .arg("--dot")
        .arg(&dot)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("ok"), "push output: {}", text);
    let rendered = fs::read_to_string(&dot).unwrap();
    assert!(rendered.starts_with("graph"), "dot head: {}", &rendered[..20.min(rendered.len())]);
}

#[test]
fn export_tl_family_reports_full_partition() {
    let dir = workdir("exporttl");
    let net = dir.join("steane.json");
    let status = bin()
        .args(["demo", "steane-from-422", "--out"])
        .arg(&net)
        .status()
        .unwrap();
    assert!(status.success());
    let out = bin()
        .arg("export-tl")
        .arg(&net)
        .arg("--family")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        text.lines().last(),
        Some("# tensors=4 total_entries=256")
    );
    // Each block header announces its own entry count.
    assert_eq!(text.matches("# L=").count(), 4);
}
