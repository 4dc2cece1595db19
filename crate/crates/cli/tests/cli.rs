use std::path::PathBuf;
use std::process::{Command, Output};

fn crjoin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crjoin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("crjoin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const CHAIN: &str =
    "(\\x. x x) ((\\y. y) z)\r\n->\r\n(\\x. x x) z\r\n<-\r\n(\\x. x x) ((\\w. w) z)\r\n";

#[test]
fn success_exits_zero() {
    let o = crjoin(&["reduce", "-e", "(\\x. x x) ((\\y. y) z)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("normal-form after 3 steps\n"));

    let o = crjoin(&["reduce", "-e", "(\\x. x x) (\\x. x x)", "--fuel", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("fuel-exhausted"));
}

#[test]
fn input_errors_exit_two() {
    let o = crjoin(&["parse", "-e", "(\\x. x"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));

    let bad = scratch("bad-link.chain", "x\n->\ny\n");
    let o = crjoin(&["join", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    assert_eq!(crjoin(&["bounds", "nope", "1"]).status.code(), Some(2));
}

#[test]
fn resource_caps_exit_three() {
    let o = crjoin(&[
        "star",
        "-e",
        "(\\x. x x x) (\\x. x x x)",
        "--iter",
        "30",
        "--term-cap",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(crjoin(&["example2", "5"]).status.code(), Some(3));
}

#[test]
fn certificates_round_trip_through_the_verifier() {
    let chain = scratch("valley.chain", CHAIN);
    let o = crjoin(&[
        "--format",
        "json",
        "join",
        chain.to_str().unwrap(),
        "--mode",
        "main",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let certs = scratch("certs.json", &stdout(&o));
    let o = crjoin(&["parse", "--certificate", certs.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("replays").count(), 2);

    // a recorded bound check that failed makes the verifier exit 1
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&certs).unwrap()).unwrap();
    doc["certificates"][0]["bound_checks"][0]["ok"] = false.into();
    let tampered = scratch("tampered.json", &doc.to_string());
    assert_eq!(
        crjoin(&["parse", "--certificate", tampered.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );

    // a broken step is an input error
    doc["certificates"][0]["left_steps"][0]["position"] = "Body".into();
    let broken = scratch("broken.json", &doc.to_string());
    assert_eq!(
        crjoin(&["parse", "--certificate", broken.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn chains_are_emitted_with_lf() {
    let chain = scratch("crlf.chain", CHAIN);
    let o = crjoin(&["parse", "--chain", chain.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    assert!(text.starts_with("(\\x. x x) ((\\y. y) z)\n->\n(\\x. x x) z\n<-\n"));
}

#[test]
fn harness_runs_are_deterministic() {
    let args = ["--format", "json", "--seed", "9", "--cases", "15", "check"];
    let a = crjoin(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&crjoin(&args)));
    let other = crjoin(&["--format", "json", "--seed", "10", "--cases", "15", "check"]);
    assert_ne!(stdout(&a), stdout(&other));
}

#[test]
fn out_flag_writes_the_report() {
    let dir = std::env::temp_dir().join(format!("crjoin-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("patterns.txt");
    let o = crjoin(&["--out", out.to_str().unwrap(), "patterns", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.ends_with("16 patterns in 5 classes\n"));
}

#[test]
fn example2_small_case() {
    let o = crjoin(&["--format", "json", "example2", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["size_m1"], 19);
    assert_eq!(v["reduct_size"], 7);
    assert_eq!(v["replays"], true);
}
