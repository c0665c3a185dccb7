use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn qrsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrsim"))
        .args(args)
        .env_remove("QRSIM_THREADS")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_scenario(dir: &tempfile::TempDir, value: &Value) -> String {
    let path = dir.path().join("s.json");
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

fn steady_value() -> Value {
    serde_json::from_str(&std::fs::read_to_string(scenario("steady.json")).unwrap()).unwrap()
}

fn rows(csv: &[u8]) -> Vec<Vec<String>> {
    String::from_utf8(csv.to_vec())
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn validate_prints_name_and_hash() {
    let path = scenario("steady.json");
    let out = qrsim(&["validate", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let words: Vec<&str> = text.split_whitespace().collect();
    assert_eq!(words[..2], ["ok", "refrigerator-point"]);
    assert_eq!(words[2].len(), 64);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&qrsim(&["steady"])), 1);
    assert_eq!(code(&qrsim(&["frobnicate"])), 1);
    let path = scenario("steady.json");
    let p = path.to_str().unwrap();
    assert_eq!(
        code(&qrsim(&["steady", "--scenario", p, "--format", "xml"])),
        1
    );
    assert_eq!(
        code(&qrsim(&["steady", "--scenario", p, "--threads", "0"])),
        1
    );
    let out = Command::new(env!("CARGO_BIN_EXE_qrsim"))
        .args(["steady", "--scenario", p])
        .env("QRSIM_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
    assert_eq!(code(&qrsim(&["--help"])), 0);
}

#[test]
fn missing_scenario_file_exits_one() {
    assert_eq!(
        code(&qrsim(&["steady", "--scenario", "/nonexistent/s.json"])),
        1
    );
}

#[test]
fn validation_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();

    let mut v = steady_value();
    v["cold"]["colour"] = json!("blue");
    let out = qrsim(&["steady", "--scenario", &write_scenario(&dir, &v)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cold.colour"));

    let mut v = steady_value();
    v["hot"]["temperature"] = json!(-1.0);
    let out = qrsim(&["steady", "--scenario", &write_scenario(&dir, &v)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("hot.temperature"));

    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ \"name\": ").unwrap();
    assert_eq!(
        code(&qrsim(&["validate", "--scenario", path.to_str().unwrap()])),
        2
    );

    // subcommand must match the run kind
    let path = scenario("steady.json");
    assert_eq!(
        code(&qrsim(&["cool", "--scenario", path.to_str().unwrap()])),
        2
    );
}

#[test]
fn vanishing_rates_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = steady_value();
    v["cold"]["omega_cut"] = json!(0.1);
    v["hot"] = json!({
        "label": "hot", "gamma": 1.0, "dim": 3.0, "prefactor": 1.0,
        "omega_cut": 0.1, "cutoff_shape": "hard", "temperature": 5.0
    });
    let out = qrsim(&["steady", "--scenario", &write_scenario(&dir, &v)]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn steady_csv_schema() {
    let path = scenario("steady.json");
    let out = qrsim(&[
        "steady",
        "--scenario",
        path.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0);
    let table = rows(&out.stdout);
    assert_eq!(
        table[0],
        ["point_id", "S_ss", "J_C", "J_H", "sigma", "cooling"]
    );
    assert_eq!(table.len(), 2);
    let r = &table[1];
    assert_eq!(r[0], "0");
    let s: f64 = r[1].parse().unwrap();
    let j_c: f64 = r[2].parse().unwrap();
    let j_h: f64 = r[3].parse().unwrap();
    assert!((-0.5..=0.5).contains(&s));
    assert!(j_c > 0.0 && j_h < 0.0);
    assert_eq!(r[5], "true");
}

#[test]
fn json_output_round_trips_library_result() {
    use qrsim::scenario::{load_scenario, run_scenario, Outcome};

    let path = scenario("steady.json");
    let out = qrsim(&[
        "steady",
        "--scenario",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();

    let s = load_scenario(&path).unwrap();
    let lib = run_scenario(&s, Some(1)).unwrap();
    let Outcome::SteadyState(rep) = &lib.records[0].outcome else {
        panic!("expected a steady-state record")
    };
    assert_eq!(v["config_hash"], json!(s.config_hash()));
    assert_eq!(v, serde_json::to_value(&lib).unwrap());
    let j_c = v["records"][0]["outcome"]["J_C"].as_f64().unwrap();
    assert_eq!(j_c.to_bits(), rep.cold_current.to_bits());
}

#[test]
fn out_flag_writes_file_and_overrides_format() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("result.csv");
    let path = scenario("steady.json");
    let out = qrsim(&[
        "steady",
        "--scenario",
        path.to_str().unwrap(),
        "--out",
        target.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(target).unwrap();
    assert!(text.starts_with("point_id,S_ss"));
}

#[test]
fn thread_count_from_environment_does_not_change_output() {
    let path = scenario("boundary_sweep.json");
    let p = path.to_str().unwrap();
    let flag = qrsim(&["sweep", "--scenario", p, "--threads", "1"]);
    let env = Command::new(env!("CARGO_BIN_EXE_qrsim"))
        .args(["sweep", "--scenario", p])
        .env("QRSIM_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&flag), 0);
    assert_eq!(code(&env), 0);
    assert_eq!(flag.stdout, env.stdout);
}

#[test]
fn boundary_sweep_changes_sign_once_near_analytic_offset() {
    let path = scenario("boundary_sweep.json");
    let out = qrsim(&[
        "sweep",
        "--scenario",
        path.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0);
    let table = rows(&out.stdout);
    assert_eq!(table[0][1], "modulation.tau");
    let points: Vec<(f64, f64, bool)> = table[1..]
        .iter()
        .map(|r| {
            (
                PI / r[1].parse::<f64>().unwrap(),
                r[3].parse().unwrap(),
                r[6] == "true",
            )
        })
        .collect();
    let flips: Vec<usize> = (1..points.len())
        .filter(|&i| points[i - 1].2 != points[i].2)
        .collect();
    assert_eq!(flips.len(), 1);
    let (lo, hi) = (points[flips[0] - 1].0, points[flips[0]].0);
    let analytic = 10.0 * (5.0 - 1.0) / (5.0 + 1.0);
    assert!(lo < analytic && analytic < hi, "{lo} {hi}");
    assert!(points.iter().all(|&(_, j, c)| c == (j > 0.0)));
}

#[test]
fn steady_state_on_the_boundary_does_not_cool() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value =
        serde_json::from_str(&std::fs::read_to_string(scenario("boundary_sweep.json")).unwrap())
            .unwrap();
    v["modulation"]["tau"] = json!(PI / (20.0 / 3.0));
    v["run"] = json!({ "kind": "steady_state", "tail_tolerance": 0.2 });
    let out = qrsim(&[
        "steady",
        "--scenario",
        &write_scenario(&dir, &v),
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table = rows(&out.stdout);
    assert_eq!(table[1][5], "false");
}
