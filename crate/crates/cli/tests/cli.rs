use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mpuav(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpuav"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

const PLAN: [&str; 7] = ["plan", "--d", "5000,0", "--iot", "2000,300", "--tbs", "3000,-400"];

#[test]
fn zero_data_plan_is_pure_delivery() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = PLAN.to_vec();
    args.extend(["--m", "0"]);
    let out = mpuav(&args, dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("plan.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "delivery_only");
    assert_eq!(row[10], "0");
}

#[test]
fn infeasible_mission_exits_one_with_record() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = PLAN.to_vec();
    args.extend(["--set", "mission.battery_j=1000"]);
    let out = mpuav(&args, dir.path());
    assert_eq!(out.status.code(), Some(1));
    let record: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["error"], "infeasible");
}

#[test]
fn invalid_config_exits_two_with_record() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = PLAN.to_vec();
    args.extend(["--set", "network.cluster_radius_m=0"]);
    let out = mpuav(&args, dir.path());
    assert_eq!(out.status.code(), Some(2));
    let record: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["error"], "invalid_value");
    assert!(record["message"].as_str().unwrap().contains("network.cluster_radius_m"));
}

#[test]
fn json_mirrors_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_dir = dir.path().join("csv");
    let json_dir = dir.path().join("json");
    let args = ["sweep", "--l2-km", "3", "--m-grid", "0,1000", "--trials", "10", "--study", "direct"];
    assert!(mpuav(&args, &csv_dir).status.success());
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    assert!(mpuav(&json_args, &json_dir).status.success());
    let csv = fs::read_to_string(csv_dir.join("sweep.csv")).unwrap();
    let json: Value = serde_json::from_str(&fs::read_to_string(json_dir.join("sweep.json")).unwrap()).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    for (line, obj) in lines.zip(json.as_array().unwrap()) {
        for (key, cell) in header.iter().zip(line.split(',')) {
            let v = &obj[*key];
            match v {
                Value::Number(n) => assert_eq!(n.as_f64().unwrap(), cell.parse::<f64>().unwrap(), "{key}"),
                Value::String(s) => assert_eq!(s, cell),
                other => panic!("{key}: {other}"),
            }
        }
    }
}

#[test]
fn manifest_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let args = ["compare", "--l2-km", "3", "--m-grid", "500,3000", "--trials", "15", "--seed", "4", "--set", "run.grid_step_m=40"];
    assert!(mpuav(&args, &first).status.success());
    let manifest: Value = serde_json::from_str(&fs::read_to_string(first.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 4);
    assert_eq!(manifest["trials"], 15);
    assert_eq!(manifest["outputs"][0], "compare.csv");

    // replay from the recorded config alone
    let config = dir.path().join("config.toml");
    fs::write(&config, manifest["config"].as_str().unwrap()).unwrap();
    let second = dir.path().join("second");
    let out = mpuav(
        &["compare", "--l2-km", "3", "--m-grid", "500,3000", "--config", config.to_str().unwrap()],
        &second,
    );
    assert!(out.status.success());
    assert_eq!(
        fs::read(first.join("compare.csv")).unwrap(),
        fs::read(second.join("compare.csv")).unwrap()
    );
}
