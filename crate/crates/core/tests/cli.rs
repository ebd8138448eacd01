use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nldirac"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn nldirac")
}

fn csv_values(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn check_accepts_shipped_configs() {
    for name in ["reference_gross_neveu.toml", "reference_thirring.toml", "zero.toml", "separated.toml"] {
        let out = run(&["check", config(name).to_str().unwrap()]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn invalid_config_exits_2_and_lists_every_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(
        &path,
        "model = \"thirring\"\nx_min = -4.0\nx_max = 4.0\nh = 0.01\nT = 1.0\nrecord_times = [0.5, 3.14159]\nunknown = 3\n",
    )
    .unwrap();
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("record_times[1]") && err.contains("unknown"), "{err}");

    fs::write(&path, "model = \"thirring\"\nx_min = -4.0\nx_max = 4.0\nh = 0.1\nT = 10.05\n").unwrap();
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("T not a multiple of h"));
}

#[test]
fn missing_config_file_is_an_io_error() {
    let out = run(&["check", "/nonexistent/config.toml"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn zero_config_passes_with_all_zero_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["run", config("zero.toml").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    for (file, skip) in [("snapshots.csv", 2), ("profiles.csv", 2), ("residuals.csv", 1)] {
        let rows = csv_values(&dir.path().join(file));
        assert!(!rows.is_empty(), "{file}");
        for row in rows {
            for v in &row[skip..] {
                assert_eq!(v.parse::<f64>().unwrap(), 0.0, "{file}: {row:?}");
            }
        }
    }
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["all_pass"], true);
    for check in summary["checks"].as_array().unwrap() {
        assert!(check["tolerance"].is_number() && check["identity"].is_string(), "{check}");
    }
}

#[test]
fn separated_config_has_vanishing_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["run", config("separated.toml").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    for row in csv_values(&dir.path().join("residuals.csv")) {
        for v in &row[1..5] {
            assert!(v.parse::<f64>().unwrap().abs() <= 1e-13, "{row:?}");
        }
    }
    let balance: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("balance.json")).unwrap()).unwrap();
    assert_eq!(balance["regions"].as_array().unwrap().len(), 1);
}

#[test]
fn solver_abort_exits_3_with_error_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stiff.toml");
    fs::write(
        &path,
        "model = \"gross_neveu\"\nu_amplitude = 6.0\nv_amplitude = 6.0\nv_center = 0.0\n\
         x_min = -40.0\nx_max = 40.0\nh = 0.5\nT = 2.0\nfixed_point_max_iter = 3\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&["run", path.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("error.json")).unwrap()).unwrap();
    assert_eq!(report["status"], "solver_error");
}

#[test]
fn sweep_reports_second_order() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.toml");
    fs::write(
        &path,
        "model = \"gross_neveu\"\nv_center = 1.0\nx_min = -30.0\nx_max = 30.0\nh = 0.125\nT = 4.0\n\
         record_times = [2.0, 4.0]\ntriangles = [[-3.0, 3.0, 0.5, 2.0]]\n",
    )
    .unwrap();
    let out = run(&["sweep", path.to_str().unwrap(), "--halve-h", "2", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_values(&dir.path().join("sweep.csv"));
    assert_eq!(rows.len(), 3);
    // orders on the finest pair
    let charge_order: f64 = rows[2][2].parse().unwrap();
    let triangle_order: f64 = rows[2][4].parse().unwrap();
    let self_order: f64 = rows[1][6].parse().unwrap();
    for (what, o) in [("charge", charge_order), ("triangle", triangle_order), ("self", self_order)] {
        assert!((o - 2.0).abs() < 0.35, "{what} order {o}");
    }
}

#[test]
fn thread_variable_is_validated() {
    let out = bin()
        .env("NLDIRAC_THREADS", "many")
        .args(["check", config("zero.toml").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .env("NLDIRAC_THREADS", "2")
        .args(["check", config("zero.toml").to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
}
