//! Binary-level behavior: output shapes, exit codes, determinism, file
//! loading, and the environment tolerance override.

use std::process::{Command, Output};

fn llg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_llg"))
        .args(args)
        .env_remove("LLG_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn list_is_sorted_and_annotated() {
    let out = llg(&["list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("affine2 dim=2 flat"));
    assert!(text.contains("nonflat_demo dim=2 nonflat"));
    let lines: Vec<&str> = text.lines().collect();
    let mut sorted = lines.clone();
    sorted.sort_unstable();
    assert_eq!(lines, sorted);
    assert!(!lines.is_empty());
}

#[test]
fn eval_torsion_reports_hand_value() {
    let out = llg(&[
        "eval",
        "example:affine2",
        "--tensor",
        "torsion",
        "--at",
        "2,5",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["up"], 1);
    assert_eq!(v["down"], 2);
    // T^2_{21} = 0.5 (0-based [1][1][0]).
    let d = &v["data"];
    assert!((d[1][1][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((d[1][0][1].as_f64().unwrap() + 0.5).abs() < 1e-12);
}

#[test]
fn eval_j_on_abelian_is_the_model_tensor() {
    let out = llg(&[
        "eval",
        "example:abelian2",
        "--tensor",
        "j",
        "--at",
        "0,0",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["data"][0][1].as_f64().unwrap(), 1.0);
    assert_eq!(v["data"][1][0].as_f64().unwrap(), -1.0);
}

#[test]
fn eval_j_on_odd_dimension_exits_2() {
    let out = llg(&["eval", "example:heisenberg3", "--tensor", "j", "--at", "1,2,3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("odd"));
}

#[test]
fn eval_epsilon_requires_target() {
    let out = llg(&["eval", "example:affine2", "--tensor", "epsilon", "--at", "2,5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = llg(&[
        "eval",
        "example:affine2",
        "--tensor",
        "epsilon",
        "--at",
        "2,5",
        "--to",
        "4,0",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["data"][0][0].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn eval_out_of_domain_exits_2() {
    let out = llg(&["eval", "example:affine2", "--tensor", "torsion", "--at", "-5,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn too_few_points_exits_2() {
    let out = llg(&["verify", "example:affine2", "--points", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_point_arity_mismatch_exits_2() {
    let out = llg(&["eval", "example:affine2", "--tensor", "torsion", "--at", "2,5,1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = llg(&["eval", "example:affine2", "--tensor", "torsion", "--at", "2,banana"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_tensor_and_example_exit_2() {
    let out = llg(&["eval", "example:affine2", "--tensor", "spin", "--at", "2,5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = llg(&["verify", "example:nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_flat_example_exits_0() {
    let out = llg(&["verify", "example:affine2", "--points", "16"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("overall: PASS"));
}

#[test]
fn verify_nonflat_exits_1_with_two_path_still_passing() {
    let out = llg(&["verify", "example:nonflat_demo", "--points", "16", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["flat"], false);
    assert!(v["constants"].is_null());
    let checks = v["checks"].as_array().unwrap();
    let find = |name: &str| {
        checks
            .iter()
            .find(|c| c["name"] == name)
            .unwrap_or_else(|| panic!("missing {name}"))
    };
    assert_eq!(find("flatness_curvature")["pass"], false);
    assert_eq!(find("nijenhuis_two_path")["pass"], true);
}

#[test]
fn verify_json_runs_are_byte_identical() {
    let args = ["verify", "example:affine2", "--format", "json", "--seed", "42", "--points", "100"];
    let a = llg(&args);
    let b = llg(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn text_and_json_carry_identical_check_data() {
    let json_out = llg(&["verify", "example:heisenberg3", "--points", "8", "--format", "json"]);
    let text_out = llg(&["verify", "example:heisenberg3", "--points", "8", "--format", "text"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json_out)).unwrap();
    let text = stdout(&text_out);
    for check in v["checks"].as_array().unwrap() {
        let name = check["name"].as_str().unwrap();
        let pass = check["pass"].as_bool().unwrap();
        let line = text
            .lines()
            .find(|l| l.contains(name))
            .unwrap_or_else(|| panic!("text lacks {name}"));
        assert_eq!(line.contains("[PASS]"), pass, "{name}");
    }
}

#[test]
fn constants_on_nonflat_short_circuits_but_exits_0() {
    let out = llg(&["constants", "example:nonflat_demo", "--points", "8", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["flat"], false);
    assert!(v["constants"].is_null());
}

#[test]
fn constants_reports_affine_goldens() {
    let out = llg(&["constants", "example:affine2", "--points", "16", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["flat"], true);
    let c = &v["constants"]["c"];
    assert!((c[1][0][1].as_f64().unwrap() + 1.0).abs() <= 1e-10);
    let scalar = &v["constants"]["scalar_curvature"];
    assert!((scalar["pointwise"].as_f64().unwrap() + 2.0).abs() <= 1e-8);
    assert!((scalar["from_constants"].as_f64().unwrap() + 2.0).abs() <= 1e-8);
}

#[test]
fn framing_files_load_and_verify() {
    let dir = std::env::temp_dir().join(format!("llg-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("scaling.json");
    std::fs::write(
        &path,
        r#"{"dim": 2, "domain": {"x1": [0.1, 10.0], "x2": [-10.0, 10.0]}, "w": [["x1","0"],["0","x1"]]}"#,
    )
    .unwrap();
    let out = llg(&["verify", path.to_str().unwrap(), "--points", "8", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // File label carries a content hash.
    assert!(v["framing"].as_str().unwrap().contains("scaling.json#"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn malformed_framing_file_exits_2() {
    let dir = std::env::temp_dir().join(format!("llg-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, r#"{"dim": 2, "domain": {"x1": [0,1], "x2": [0,1]}, "w": [["x9","0"],["0","1"]]}"#).unwrap();
    let out = llg(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn tol_env_var_overrides_default() {
    let args = ["verify", "example:affine2", "--points", "8", "--format", "json"];
    let out = Command::new(env!("CARGO_BIN_EXE_llg"))
        .args(args)
        .env("LLG_TOL", "1e-3")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let row = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "invariance_torsion")
        .unwrap();
    assert_eq!(row["tol"].as_f64().unwrap(), 1e-3);

    // An explicit flag wins over the environment.
    let out = Command::new(env!("CARGO_BIN_EXE_llg"))
        .args(["verify", "example:affine2", "--points", "8", "--format", "json", "--tol", "1e-6"])
        .env("LLG_TOL", "1e-3")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let row = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "invariance_torsion")
        .unwrap();
    assert_eq!(row["tol"].as_f64().unwrap(), 1e-6);
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let dir = std::env::temp_dir().join(format!("llg-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = llg(&[
        "verify",
        "example:abelian2",
        "--points",
        "8",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["flat"], true);
    std::fs::remove_dir_all(&dir).ok();
}
