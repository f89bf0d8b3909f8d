use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn germ(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../germs")
        .join(name)
}

fn legendre(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_legendre"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn normal_form_documents() {
    let out = legendre(&["normal-form", "--n", "2", "--k", "1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("p1 = 1/3*x2^3\n"), "{text}");
    assert!(text.contains("r = 1/3*x1*x2^3\n"), "{text}");
    let flat = stdout(&legendre(&["normal-form", "--n", "1", "--k", "0"]));
    assert!(flat.ends_with("p1 = 0\nq1 = x1\nr = 0\n"), "{flat}");
    let bad = legendre(&["normal-form", "--n", "1", "--k", "1"]);
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("0 <= k <= n/2"));
}

#[test]
fn normal_form_json() {
    let out = legendre(&["normal-form", "--n", "2", "--k", "1", "--json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n"], 2);
    assert_eq!(v["components"]["p1"], "1/3*x2^3");
}

#[test]
fn exit_codes_follow_the_verdict() {
    let five = germ("five_space.germ");
    assert_eq!(
        code(&legendre(&[
            "check",
            path(&five),
            "--mode",
            "legendre",
            "--order",
            "4"
        ])),
        0
    );
    let cusp = germ("cusp_2_5.germ");
    let fail = legendre(&["check", path(&cusp), "--mode", "contact", "--order", "4"]);
    assert_eq!(code(&fail), 1);
    assert!(stdout(&fail).contains("witness"));
    let umbrella = germ("umbrella_2_1.germ");
    assert_eq!(
        code(&legendre(&[
            "check",
            path(&umbrella),
            "--order",
            "3",
            "--cap",
            "4"
        ])),
        3
    );
    assert_eq!(
        code(&legendre(&["check", path(&germ("flat_line.germ"))])),
        0
    );
    assert_eq!(
        code(&legendre(&["classify", path(&cusp), "--order", "4"])),
        1
    );
    assert_eq!(
        code(&legendre(&[
            "check",
            path(&cusp),
            "--mode",
            "ca",
            "--order",
            "4"
        ])),
        1
    );
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.germ");
    std::fs::write(&bad, "n = 1\np1 = 0\nq1 = x1\nr = x1\n").unwrap();
    assert_eq!(code(&legendre(&["check", bad.to_str().unwrap()])), 2);
    std::fs::write(&bad, "n = one\n").unwrap();
    assert_eq!(code(&legendre(&["check", bad.to_str().unwrap()])), 2);
    assert_eq!(
        code(&legendre(&[
            "check",
            dir.path().join("missing.germ").to_str().unwrap()
        ])),
        2
    );
    // parameters must be fixed before a check
    assert_eq!(
        code(&legendre(&[
            "check",
            path(&germ("cusp_family.germ")),
            "--order",
            "2"
        ])),
        2
    );
}

#[test]
fn reports_are_deterministic() {
    let file = germ("umbrella_2_1.germ");
    let args = [
        "check",
        path(&file),
        "--mode",
        "all",
        "--order",
        "3",
        "--json",
    ];
    let (a, b) = (legendre(&args), legendre(&args));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["order_from"], "flag");
    assert_eq!(v["result"]["contact"]["verdict"], "pass");
    assert_eq!(
        v["result"]["classification"]["classification"],
        serde_json::json!({"result": "umbrella", "k": 1})
    );
}

#[test]
fn default_order_comes_from_r0() {
    let out = legendre(&["check", path(&germ("flat_line.germ")), "--json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["order_from"], "default");
    assert_eq!(v["r0"], serde_json::json!({"result": "found", "value": 2}));
    assert_eq!(v["order"], 2);
}

#[test]
fn batches_report_the_worst_status() {
    let (flat, cusp) = (germ("flat_line.germ"), germ("cusp_2_5.germ"));
    let out = legendre(&["check", path(&flat), path(&cusp), "--order", "4", "--json"]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("f21.germ");
    let out = legendre(&[
        "normal-form",
        "--n",
        "2",
        "--k",
        "1",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    // the written document checks again
    assert_eq!(
        code(&legendre(&[
            "classify",
            target.to_str().unwrap(),
            "--order",
            "3"
        ])),
        0
    );
}

#[test]
fn complete_lift_project_extend() {
    let completed = stdout(&legendre(&["complete", path(&germ("umbrella_2_1.germ"))]));
    assert!(completed.contains("r = 1/3*x1*x2^3"), "{completed}");
    let lifted = stdout(&legendre(&["lift", path(&germ("curve_family.germ"))]));
    assert!(lifted.contains("r = 3/11*t^11*lam + 3/10*t^10"), "{lifted}");
    let projected = stdout(&legendre(&["project", path(&germ("cusp_2_5.germ"))]));
    assert!(
        projected.contains("# generating function: t^5"),
        "{projected}"
    );
    let joined = legendre(&[
        "extend",
        path(&germ("cusp_family.germ")),
        path(&germ("cusp_constant.germ")),
    ]);
    assert_eq!(code(&joined), 0);
    assert!(stdout(&joined).contains("params = lam, mu"));
    let clash = legendre(&[
        "extend",
        path(&germ("cusp_family.germ")),
        path(&germ("cusp_family.germ")),
    ]);
    assert_eq!(code(&clash), 2);
}

#[test]
fn front_csv() {
    let flat = stdout(&legendre(&[
        "front",
        path(&germ("flat_line.germ")),
        "--samples",
        "3",
    ]));
    assert_eq!(flat, "q1,r\n-1.00000000000,0\n0,0\n1.00000000000,0\n");
    let cusp = stdout(&legendre(&[
        "front",
        path(&germ("cusp_2_5.germ")),
        "--samples",
        "5",
    ]));
    let rows: Vec<Vec<f64>> = cusp
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    // points of y^2 = x^5
    assert!(rows
        .iter()
        .all(|p| (p[1] * p[1] - p[0].powi(5)).abs() < 1e-10));
    let family = stdout(&legendre(&[
        "front",
        path(&germ("cusp_family.germ")),
        "--samples",
        "4",
        "--param-grid",
        "lam=0:1:3",
    ]));
    let lines: Vec<&str> = family.lines().collect();
    assert_eq!(lines[0], "q1,r,lam");
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 3));
    assert_eq!(lines.len(), 1 + 4 * 3);
    assert_eq!(
        code(&legendre(&[
            "front",
            path(&germ("five_space.germ")),
            "--param-grid",
            "lam=0:1:3"
        ])),
        2
    );
}
