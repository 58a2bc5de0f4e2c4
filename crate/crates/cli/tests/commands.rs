use std::path::PathBuf;
use std::process::{Command, Output};

fn qborel(args: &[&str], report_dir: Option<&PathBuf>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qborel"));
    cmd.args(args);
    match report_dir {
        Some(d) => cmd.env("QBOREL_REPORT_DIR", d),
        None => cmd.env_remove("QBOREL_REPORT_DIR"),
    };
    cmd.output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("qborel-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn check_relations_writes_a_report() {
    let dir = scratch("relations");
    let o = qborel(&["check", "relations", "--preset", "A2_full"], Some(&dir));
    assert!(o.status.success(), "{}", stdout(&o));
    let text = std::fs::read_to_string(dir.join("quantum_group-A2_full.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], "qborel.report/v1");
    assert_eq!(v["passed"], true);
}

#[test]
fn check_gns() {
    let o = qborel(&["check", "gns", "--type", "B2"], None);
    assert!(o.status.success());
    assert!(stdout(&o).contains("[ok]"));
}

#[test]
fn decompose_emits_trace() {
    let dir = scratch("trace");
    let out = dir.join("out.json");
    let o = qborel(
        &[
            "decompose",
            "--type",
            "A3",
            "--emit-trace",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success(), "{}", stdout(&o));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["e1"].as_array().unwrap().len(), 10);
}

#[test]
fn dilog_selftest() {
    let o = qborel(
        &[
            "dilog",
            "selftest",
            "--b",
            "0.75",
            "--tol",
            "1e-8",
            "--samples",
            "10",
        ],
        None,
    );
    assert!(o.status.success(), "{}", stdout(&o));
    let o = qborel(&["dilog", "selftest", "--b", "1.5"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rep_print_formats() {
    let o = qborel(
        &["rep", "print", "--preset", "B2_full", "--format", "latex"],
        None,
    );
    assert!(o.status.success());
    assert!(stdout(&o).contains("\\lambda_{1}"));
    let o = qborel(
        &["rep", "print", "--preset", "B2_full", "--format", "json"],
        None,
    );
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "qborel.rep/v1");
}

#[test]
fn script_apply_from_file() {
    let dir = scratch("script");
    let path = dir.join("swap.json");
    std::fs::write(
        &path,
        r#"{"schema": "qborel.script/v1", "name": "swap", "moves": [{"kind": "linear", "map": {"u": "v", "v": "u"}}]}"#,
    )
    .unwrap();
    let o = qborel(
        &[
            "script",
            "apply",
            "--file",
            path.to_str().unwrap(),
            "--input",
            "A2_simple",
        ],
        None,
    );
    assert!(o.status.success(), "{}", stdout(&o));
    let bad = dir.join("bad.json");
    std::fs::write(
        &bad,
        r#"{"name": "bad", "moves": [{"kind": "dilog", "arg": "u-2p_v", "direction": "star_left"}]}"#,
    )
    .unwrap();
    let o = qborel(
        &[
            "script",
            "apply",
            "--file",
            bad.to_str().unwrap(),
            "--input",
            "A2_simple",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_preset_is_an_error() {
    let o = qborel(&["check", "relations", "--preset", "Z9"], None);
    assert_eq!(o.status.code(), Some(2));
}
