use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use framedil::report::{RunReport, Section};

fn problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("problems").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_framedil"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report_of(out: &Output) -> RunReport {
    serde_json::from_slice(&out.stdout).expect("stdout is a report")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn shipped_problems_have_expected_exit_codes() {
    let cases = [
        (&["framing", "check"][..], "mercedes.json", 0),
        (&["framing", "check"][..], "partial_framing.json", 1),
        (&["framing", "generate"][..], "derivative_volterra.json", 0),
        (&["ovm", "check"][..], "mercedes_ovm.json", 0),
        (&["dilate"][..], "z2_swap.json", 0),
        (&["dilate"][..], "z3_characters.json", 0),
        (&["dilate"][..], "z2_not_positive.json", 1),
        (&["naimark"][..], "coin.json", 0),
        (&["naimark"][..], "qubit_povm.json", 0),
        (&["naimark"][..], "malformed.json", 2),
    ];
    for (cmd, file, expected) in cases {
        let p = problem(file);
        let mut args = cmd.to_vec();
        args.push(path(&p));
        args.push("--quiet");
        let out = run(&args);
        assert_eq!(out.status.code(), Some(expected), "{file}: {}", String::from_utf8_lossy(&out.stderr));
        if expected != 2 {
            let r = report_of(&out);
            assert_eq!(r.passed, expected == 0, "{file}");
        }
    }
}

#[test]
fn positive_definiteness_failure_names_the_eigenvalue() {
    let out = run(&["dilate", path(&problem("z2_not_positive.json"))]);
    assert_eq!(out.status.code(), Some(1));
    let r = report_of(&out);
    match &r.sections[..] {
        [Section::PositiveDefinite(pd)] => {
            assert!(!pd.positive_definite);
            assert!((pd.min_eigenvalue + 1.0).abs() < 1e-12);
        }
        other => panic!("unexpected sections {other:?}"),
    }
    let summary = String::from_utf8_lossy(&out.stderr);
    assert!(summary.contains("min eigenvalue -1"), "{summary}");
}

#[test]
fn malformed_input_reports_the_schema_path() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("syntax.json", "{\"kind\": ", ""),
        ("unknown.json", r#"{"kind":"naimark","payload":{},"extra":1}"#, "extra"),
        ("kind.json", r#"{"kind":"dilation","payload":{}}"#, "kind"),
        (
            "payload.json",
            r#"{"kind":"naimark","payload":{"dimE":"two","atoms":[]}}"#,
            "payload.dimE",
        ),
    ];
    for (name, text, needle) in cases {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        let out = run(&["naimark", path(&p)]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(out.stdout.is_empty());
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{name}: {err}");
    }
    let out = run(&["naimark", "/nonexistent/problem.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_semigroup_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    // 1·1 = 0 but 1 is declared the unit
    let text = r#"{"kind":"dilation","payload":{"semigroup":{"n":2,"mul":[[0,0],[0,0]],"star":[0,1],"unit":1},
        "dimF":1,"dimE":1,"phi":{"0":[[[1.0,0.0]]],"1":[[[1.0,0.0]]]}}}"#;
    std::fs::write(&p, text).unwrap();
    let out = run(&["dilate", path(&p)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("payload.semigroup"));
}

#[test]
fn out_flag_writes_the_report_and_prints_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("coin.json");
    let out = run(&["demo", "coin", "--out", path(&out_path)]);
    assert_eq!(out.status.code(), Some(0));
    let summary = String::from_utf8_lossy(&out.stdout);
    assert!(summary.starts_with("demo coin (passed"), "{summary}");
    let r: RunReport = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(r.command, "demo coin");
    let pvm = r
        .sections
        .iter()
        .find_map(|s| match s {
            Section::Pvm(p) => Some(p),
            _ => None,
        })
        .unwrap();
    assert_eq!(pvm.k_dim, 2);
    assert!(pvm.factorization <= 1e-10);
    assert!(pvm.idempotency <= 1e-10 && pvm.multiplicativity <= 1e-10 && pvm.additivity <= 1e-10);

    let quiet = run(&["demo", "coin", "--quiet", "--out", path(&out_path)]);
    assert!(quiet.stdout.is_empty());
}

#[test]
fn onb_demo_has_full_fmax() {
    let r = report_of(&run(&["demo", "onb", "--quiet"]));
    match &r.sections[0] {
        Section::Fmax(f) => assert!(f.full_space && f.fmax_dim == 3),
        other => panic!("{other:?}"),
    }
}

#[test]
fn flags_override_the_problem_file() {
    let p = problem("mercedes.json");
    let from_file = report_of(&run(&["framing", "check", path(&p), "--quiet"]));
    assert_eq!((from_file.seed, from_file.trials), (7, 32));
    let r = report_of(&run(&[
        "framing", "check", path(&p), "--quiet", "--seed", "3", "--trials", "5", "--tol-rel", "1e-7",
    ]));
    assert_eq!((r.seed, r.trials), (3, 5));
    assert_eq!(r.tolerance.rel, 1e-7);
    assert_eq!(r.tolerance.abs, 1e-12);
    let bad = run(&["framing", "check", path(&p), "--tol-abs", "-1"]);
    assert_eq!(bad.status.code(), Some(2));
    let zero = run(&["framing", "check", path(&p), "--trials", "0"]);
    assert_eq!(zero.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic_and_reparse() {
    for args in [
        &["demo", "framing-to-naimark", "--seed", "9", "--quiet"][..],
        &["demo", "mercedes", "--seed", "9", "--quiet"][..],
    ] {
        let a = run(args);
        let b = run(args);
        let mut ra = report_of(&a);
        let mut rb = report_of(&b);
        ra.timestamp = 0;
        rb.timestamp = 0;
        assert_eq!(ra, rb);
        let round = serde_json::to_string_pretty(&ra).unwrap();
        assert_eq!(serde_json::from_str::<RunReport>(&round).unwrap(), ra);
    }
}

#[test]
fn unknown_demo_is_rejected_by_the_parser() {
    let out = run(&["demo", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}
