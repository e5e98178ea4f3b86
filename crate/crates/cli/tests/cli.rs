use std::path::PathBuf;
use std::process::{Command, Output};

fn program(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/programs").join(name)
}

fn vfx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vfx"))
        .args(args)
        .env("VFX_COLOR", "never")
        .output()
        .expect("vfx runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(name: &str) -> String {
    program(name).display().to_string()
}

#[test]
fn verify_countdown_and_write_a_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("countdown.vfxcert");
    let o = vfx(&["verify", &p("countdown.c"), "--emit-cert", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "verified: 0 errors found\n");
    let text = std::fs::read_to_string(&cert).unwrap();
    assert!(text.contains("\"format_version\": 1"));

    let o = vfx(&["check", cert.to_str().unwrap(), "--source", &p("countdown.c")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("accepted"));

    let o = vfx(&["check", cert.to_str().unwrap(), "--source", &p("wrong_post.c")]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).contains("rejected"));
}

#[test]
fn verify_failures_name_the_obligation_and_location() {
    let o = vfx(&["verify", &p("overflow.c")]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("overflow.c:5:5: error:"), "{err}");
    assert!(err.contains("upper-bound"), "{err}");

    let o = vfx(&["verify", &p("wrong_post.c")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("postcondition"));
    assert!(stderr(&o).contains("counter-model {s0 = 0}"));
}

#[test]
fn json_output_is_one_object() {
    let o = vfx(&["verify", "--format", "json", &p("div_zero.c")]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["status"], "failed");
    assert_eq!(v["error"]["obligation"], "divisor-nonzero");
    assert_eq!(v["error"]["line"], 5);

    let o = vfx(&["verify", "--format", "json", "--trace", &p("halve.c")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["status"], "verified");
    assert_eq!(v["errors"], 0);
    assert!(v["proof"].as_array().unwrap().len() == v["steps"].as_u64().unwrap() as usize);
}

#[test]
fn trace_lists_the_proof_steps() {
    let o = vfx(&["verify", "--trace", &p("countdown.c")]);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.first(), Some(&"intro"));
    assert_eq!(lines.last(), Some(&"verified: 0 errors found"));
    assert_eq!(lines.iter().filter(|l| l.starts_with("arith")).count(), 7);
}

#[test]
fn run_reports_outcomes_with_exit_codes() {
    let o = vfx(&["run", &p("countdown.c"), "--fuel", "500000", "--stats"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "return 0\niterations: 32767\n");

    let o = vfx(&["run", &p("div_overflow.c")]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o), "stuck: division overflow\n");

    let o = vfx(&["run", &p("spin.c"), "--fuel", "1000"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stdout(&o), "fuel exhausted after 1000\n");

    let o = vfx(&["run", &p("countdown.c"), "--fuel", "100"]);
    assert_eq!(o.status.code(), Some(4));

    let o = vfx(&["run", &p("halve.c")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_and_parse_errors_exit_2() {
    let o = vfx(&["verify", &p("syntax_error.c")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("syntax_error.c:5:13: error:"));
    assert_eq!(vfx(&["verify", &p("missing.c")]).status.code(), Some(2));
    assert_eq!(vfx(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(vfx(&["run", &p("countdown.c"), "--fuel", "0"]).status.code(), Some(2));
}

#[test]
fn sep_prints_both_forms() {
    let o = vfx(&["sep", &p("countdown.c")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("∀ s0: Z"));
    let o = vfx(&["sep", "--canonical", &p("countdown.c")]);
    assert!(stdout(&o).starts_with("(imp true (conj (holds (<= 0 32767))"));
}

#[test]
fn color_follows_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_vfx"))
        .args(["verify", &p("overflow.c")])
        .env("VFX_COLOR", "always")
        .output()
        .unwrap();
    assert!(stderr(&o).contains("\x1b["));
    let o = vfx(&["verify", &p("overflow.c")]);
    assert!(!stderr(&o).contains("\x1b["));
}

#[test]
fn malformed_certificate_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("bad.vfxcert");
    std::fs::write(&cert, "{ not json").unwrap();
    assert_eq!(vfx(&["check", cert.to_str().unwrap()]).status.code(), Some(5));
}
