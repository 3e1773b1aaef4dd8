use std::path::Path;
use std::process::{Command, Output};

fn ptsusy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptsusy")).args(args).env_remove("PTSUSY_THREADS").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stderr).unwrap()
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn figures_are_deterministic_and_hit_the_spot_values() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        assert_eq!(code(&ptsusy(&["figures", "--out", dir.to_str().unwrap()])), 0);
    }
    let (fa, fb) = (read_dir_sorted(&a), read_dir_sorted(&b));
    assert_eq!(fa.len(), 9);
    assert_eq!(fa, fb);
    for (name, spot) in [("fig1_w1t.csv", "0,0,2,0"), ("fig2_v1t.csv", "0,-5,0,0"), ("fig3_v2t.csv", "0,-3,0,0")] {
        let text = std::fs::read_to_string(a.join(name)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,re,im,clipped"));
        assert_eq!(text.lines().count(), 2002, "{name}");
        assert!(text.lines().any(|l| l == spot), "{name}");
    }
}

#[test]
fn figures_reject_json_and_missing_parents() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("figs");
    let o = ptsusy(&["figures", "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert_eq!(stderr_json(&o)["error"], "config");
    let deep = tmp.path().join("missing").join("figs");
    assert_eq!(code(&ptsusy(&["figures", "--out", deep.to_str().unwrap()])), 2);
    assert!(!deep.exists());
}

#[test]
fn invalid_arguments_exit_with_two() {
    for args in [
        &["spectrum", "--grid-size", "200"][..],
        &["gram", "--strategy", "bogus"],
        &["spectrum", "--variant", "sine"],
        &["hierarchy", "--mode", "other"],
        &["verify-factorization", "--strategy", "pt"],
        &["spectrum", "--k", "-1"],
        &["nonsense"],
    ] {
        assert_eq!(code(&ptsusy(args)), 2, "{args:?}");
    }
    let o = ptsusy(&["spectrum", "--grid-size", "200"]);
    let err = stderr_json(&o);
    assert_eq!((err["error"].as_str(), err["exit_code"].as_i64()), (Some("config"), Some(2)));
}

#[test]
fn bad_thread_count_exits_with_two() {
    let o = Command::new(env!("CARGO_BIN_EXE_ptsusy")).args(["hierarchy"]).env("PTSUSY_THREADS", "0").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn missing_output_directory_exits_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("nope").join("out.json");
    let o = ptsusy(&["hierarchy", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
}

#[test]
fn output_file_matches_stdout() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("h.json");
    let direct = ptsusy(&["hierarchy"]);
    assert_eq!(code(&ptsusy(&["hierarchy", "--out", path.to_str().unwrap()])), 0);
    let stored: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let mut printed = json(&direct);
    printed["config"]["output_path"] = stored["config"]["output_path"].clone();
    assert_eq!(printed, stored);
}

#[test]
fn real_well_spectrum_passes() {
    let o = ptsusy(&["spectrum", "--q", "0"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["result"]["stability"], "STABLE");
    assert_eq!(v["config"]["q"], 0.0);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    let targets: Vec<f64> = v["result"]["targets"].as_array().unwrap().iter().map(|t| t.as_f64().unwrap()).collect();
    assert_eq!(targets, [0.0, 3.0, 8.0, 15.0]);
}

#[test]
fn complex_spectrum_reports_the_runaway_wall_states() {
    let o = ptsusy(&["spectrum", "--q", "2"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["result"]["stability"], "UNSTABLE");
    assert_eq!(v["result"]["wall_probe"]["diverging"], true);
    for e in v["result"]["abs_errors"].as_array().unwrap() {
        assert!(e.as_f64().unwrap() < 1e-3);
    }
    assert_eq!(code(&ptsusy(&["spectrum", "--q", "1"])), 0);
}

#[test]
fn spectrum_is_deterministic() {
    let a = ptsusy(&["spectrum", "--q", "1", "--m", "3"]);
    let b = ptsusy(&["spectrum", "--q", "1", "--m", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn symmetry_and_shape_invariance_pass_for_both_variants() {
    for variant in ["tangent", "cotangent"] {
        for cmd in ["verify-symmetry", "verify-shape-invariance"] {
            let o = ptsusy(&[cmd, "--variant", variant, "--k", "1.5", "--q", "-1"]);
            assert_eq!(code(&o), 0, "{cmd} {variant}: {}", String::from_utf8_lossy(&o.stdout));
        }
    }
    let v = json(&ptsusy(&["verify-symmetry"]));
    let checks = v["result"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    assert!(checks.iter().all(|c| c["passed"] == true));
}

#[test]
fn factorization_depends_on_the_adjoint() {
    assert_eq!(code(&ptsusy(&["verify-factorization"])), 0);
    let apt = ptsusy(&["verify-factorization", "--strategy", "apt"]);
    assert_eq!(code(&apt), 0);
    assert!(json(&apt)["result"]["apt_relation"].as_f64().unwrap() < 1e-5);
    let herm = ptsusy(&["verify-factorization", "--strategy", "hermitian"]);
    assert_eq!(code(&herm), 1);
    assert_eq!(json(&herm)["passed"], false);
}

#[test]
fn gram_asserts_only_the_real_hermitian_case() {
    let real = json(&ptsusy(&["gram", "--q", "0"]));
    assert_eq!(real["passed"], true);
    let complex = ptsusy(&["gram", "--q", "2"]);
    assert_eq!(code(&complex), 0);
    let v = json(&complex);
    let herm = &v["result"]["matrices"][0];
    assert_eq!(herm["asserted"], false);
    assert!(herm["max_off_diagonal"].as_f64().unwrap() > 0.1);
}

#[test]
fn hierarchy_flags_poles_only_with_growing_k() {
    let fixed = json(&ptsusy(&["hierarchy", "--depth", "3"]));
    let levels = fixed["result"].as_array().unwrap();
    assert_eq!(levels.len(), 3);
    assert!(levels.iter().all(|l| l["flags"].as_array().unwrap().is_empty()));
    assert_eq!(levels[0]["v1_center"]["re"], -5.0);
    let growing = json(&ptsusy(&["hierarchy", "--depth", "3", "--mode", "paper-k"]));
    assert!(growing["result"].as_array().unwrap().iter().all(|l| l["flags"][0] == "POLES_INSIDE_DOMAIN"));
}

#[test]
fn csv_tables_have_headers() {
    let o = ptsusy(&["spectrum", "--q", "0", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("index,target,re,im,abs_error"));
    assert_eq!(text.lines().count(), 5);
}
