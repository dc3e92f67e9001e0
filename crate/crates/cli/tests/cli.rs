use std::path::PathBuf;
use std::process::{Command, Output};

use emr_core::document::{FusionDocument, MassDocument, SharpeningDocument, StatusTag};
use emr_core::MassFunction;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn emr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn golden(name: &str) -> MassFunction {
    MassDocument::parse(&std::fs::read_to_string(data(name)).unwrap())
        .unwrap()
        .to_mass()
        .unwrap()
}

fn fused(o: &Output) -> FusionDocument {
    FusionDocument::parse(&stdout(o)).unwrap()
}

#[test]
fn emr_rejects_zadeh() {
    let o = emr(&["fuse", "--rule", "emr", &data("zadeh1.json"), &data("zadeh2.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(fused(&o).status, StatusTag::Rejected);
}

#[test]
fn ds_on_zadeh_puts_everything_on_c() {
    let o = emr(&["fuse", "--rule", "ds", &data("zadeh1.json"), &data("zadeh2.json")]);
    assert_eq!(o.status.code(), Some(0));
    let m = fused(&o).mass.to_mass().unwrap();
    assert!(m.max_abs_diff(&golden("zadeh_ds_expected.json")) < 1e-12);
}

#[test]
fn emr_with_ignorance_echoes_input() {
    let o = emr(&["fuse", "--rule", "emr", &data("m1.json"), &data("nu.json")]);
    assert_eq!(o.status.code(), Some(0));
    let m = fused(&o).mass.to_mass().unwrap();
    assert!(m.max_abs_diff(&golden("m1.json")) < 1e-9);
}

#[test]
fn emr_row4_matches_golden() {
    let o = emr(&["fuse", "--rule", "emr", &data("row4_1.json"), &data("row4_2.json")]);
    assert_eq!(o.status.code(), Some(0));
    let doc = fused(&o);
    assert_eq!(doc.status, StatusTag::Fused);
    assert!(doc.iterations > 0);
    assert!(doc.mass.to_mass().unwrap().max_abs_diff(&golden("row4_expected.json")) < 1e-9);
}

#[test]
fn output_flag_writes_document_and_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fused.json");
    let o = emr(&[
        "fuse",
        "--rule",
        "emr",
        "--tolerance",
        "1e-12",
        "--max-iters",
        "100000",
        "--theta0",
        "0.5",
        "--output",
        out.to_str().unwrap(),
        &data("row4_1.json"),
        &data("row4_2.json"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("m(c) = 0.175"), "{}", stdout(&o));
    let doc = FusionDocument::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    // Written documents re-parse and re-validate.
    assert!(doc.mass.to_mass().unwrap().validate().is_valid());
}

#[test]
fn other_rules_round_trip() {
    for rule in ["conjunctive", "ds", "pcr5"] {
        let o = emr(&[
            "fuse",
            "--rule",
            rule,
            &data("row4_1.json"),
            &data("row4_2.json"),
            &data("m1.json"),
        ]);
        assert_eq!(o.status.code(), Some(0), "{rule}: {}", stderr(&o));
        let m = fused(&o).mass.to_mass().unwrap();
        assert!(m.validate().is_valid());
    }
}

#[test]
fn input_errors_exit_1_with_path_and_field() {
    let o = emr(&["fuse", "--rule", "emr", &data("bad_atom.json"), &data("nu.json")]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("bad_atom.json") && err.contains("masses[0].set"), "{err}");

    let o = emr(&["fuse", "--rule", "ds", &data("bad_sum.json"), &data("nu.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad_sum.json"));

    let o = emr(&[
        "fuse",
        "--rule",
        "conjunctive",
        &data("truncated.json"),
        &data("nu.json"),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("truncated.json"));

    let o = emr(&["fuse", "--rule", "emr", &data("other_frame.json"), &data("nu.json")]);
    assert_eq!(o.status.code(), Some(1));

    let o = emr(&["fuse", "--rule", "emr", &data("missing.json"), &data("nu.json")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sharpen_exit_codes() {
    let o = emr(&["sharpen", &data("m1.json"), &data("m2.json")]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o).trim(), "none");

    let o = emr(&["sharpen", &data("m1.json"), &data("m1.json")]);
    assert_eq!(o.status.code(), Some(0));
    let m1 = golden("m1.json");
    let r = SharpeningDocument::parse(&stdout(&o))
        .unwrap()
        .to_sharpening(&m1, &m1)
        .unwrap();
    assert!(r.is_valid());
    for (x, y, _) in r.entries() {
        assert_eq!(x, y);
    }

    let o = emr(&["sharpen", &data("m1.json"), &data("rho.json")]);
    assert_eq!(o.status.code(), Some(0));
    let r = SharpeningDocument::parse(&stdout(&o))
        .unwrap()
        .to_sharpening(&m1, &golden("rho.json"))
        .unwrap();
    assert!(r.is_valid());

    let o = emr(&["sharpen", &data("bad_sum.json"), &data("m1.json")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn table1_reproduces_and_is_deterministic() {
    let first = emr(&["table1"]);
    assert_eq!(first.status.code(), Some(0), "{}", stdout(&first));
    let text = stdout(&first);
    assert_eq!(text.lines().filter(|l| l.ends_with(" ok")).count(), 6);
    assert_eq!(text.matches("Rejection").count(), 4);
    assert!(text.contains("0.175") && text.contains("0.01975") && text.contains("0.38025"));
    assert_eq!(stdout(&emr(&["table1"])), text);
}

#[test]
fn logic_check_modes() {
    let o = emr(&["logic-check", "--atoms", "2", "--sources", "2", "--with-t"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("FAIL"));
    assert!(stdout(&o).contains("\nT "));

    let o = emr(&["logic-check", "--atoms", "2", "--sources", "2", "--without-t"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("T fails (expected without T)"));

    let o = emr(&["logic-check", "--atoms", "1", "--sources", "1"]);
    assert_eq!(o.status.code(), Some(0));

    let o = emr(&["logic-check", "--atoms", "5", "--sources", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cap"));
}

#[test]
fn rule_is_required_for_fuse() {
    let o = emr(&["fuse", &data("m1.json"), &data("nu.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(emr(&["--help"]).status.code(), Some(0));
}
