use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_market-survival"));
    c.env_remove("MARKET_SURVIVAL_OUT");
    c
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "{}\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn catalog_lists_the_required_scenarios() {
    let out = run_ok(bin().arg("list-scenarios"));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "survival-perturbed",
        "closeness-divergence",
        "dominance-2pt",
        "growth-rates",
        "continuous-jump-equivalence",
    ] {
        assert!(text.lines().any(|l| l == name), "{name} missing");
    }
    assert!(text.contains("exercises: dominance of the survival strategy"));
    let again = run_ok(bin().arg("list-scenarios"));
    assert_eq!(text.as_bytes(), again.stdout.as_slice());
}

#[test]
fn json_catalog_documents_validate() {
    let out = run_ok(bin().args(["list-scenarios", "--json"]));
    let entries: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    for e in entries.as_array().unwrap() {
        let path = tmp.path().join("doc.json");
        fs::write(&path, serde_json::to_vec(&e["document"]).unwrap()).unwrap();
        run_ok(bin().arg("validate").arg("--config").arg(&path));
    }
}

#[test]
fn invalid_delta_exits_with_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenario("two-point.json")).unwrap();
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, text.replacen("\"delta\": 0.5", "\"delta\": 1.0", 1)).unwrap();
    let out = bin().arg("validate").arg("--config").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("$.payoff.atoms[0].delta: delta must lie in [0,1)"), "{err}");

    let out = bin()
        .args(["run", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(tmp.path().join("never"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!tmp.path().join("never").exists());
}

#[test]
fn unknown_scenario_and_missing_file_are_config_errors() {
    let out = bin().args(["validate", "--scenario", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().args(["validate", "--config", "/definitely/missing.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn batch_writes_one_csv_per_seed_and_a_summary() {
    let tmp = tempfile::tempdir().unwrap();
    run_ok(
        bin()
            .args(["run", "--config"])
            .arg(scenario("two-point.json"))
            .arg("--out")
            .arg(tmp.path()),
    );
    let files = dir_contents(tmp.path());
    assert_eq!(files.len(), 11);
    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seeds"], 10);
    let seeds: Vec<u64> = summary["runs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["seed"].as_u64().unwrap())
        .collect();
    assert_eq!(seeds, (0..10).collect::<Vec<_>>());
    let csv = fs::read_to_string(tmp.path().join("trajectory-seed-3.csv")).unwrap();
    assert_eq!(csv.lines().count(), 502);
}

#[test]
fn reruns_are_byte_identical_and_parallelism_does_not_matter() {
    let tmp = tempfile::tempdir().unwrap();
    let dirs: Vec<PathBuf> = ["serial", "parallel", "again"].iter().map(|d| tmp.path().join(d)).collect();
    for (dir, jobs) in dirs.iter().zip(["1", "4", "4"]) {
        run_ok(
            bin()
                .args(["run", "--config"])
                .arg(scenario("jump-kernel.json"))
                .args(["--jobs", jobs, "--out"])
                .arg(dir),
        );
    }
    let serial = dir_contents(&dirs[0]);
    assert_eq!(serial.len(), 4);
    assert_eq!(serial, dir_contents(&dirs[1]));
    assert_eq!(serial, dir_contents(&dirs[2]));
}

#[test]
fn seed_and_grid_overrides_apply() {
    let tmp = tempfile::tempdir().unwrap();
    run_ok(
        bin()
            .args(["run", "--config"])
            .arg(scenario("jump-kernel.json"))
            .args(["--seeds", "7,9", "--grid", "10", "--out"])
            .arg(tmp.path()),
    );
    let names: Vec<String> = dir_contents(tmp.path()).into_iter().map(|(n, _)| n).collect();
    assert_eq!(names, ["summary.json", "trajectory-seed-7.csv", "trajectory-seed-9.csv"]);
    let out = bin()
        .args(["run", "--scenario", "dominance-2pt", "--seeds", "1,1", "--out"])
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn environment_sets_the_default_output_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cmd = bin();
    cmd.env("MARKET_SURVIVAL_OUT", tmp.path())
        .args(["run", "--config"])
        .arg(scenario("two-point.json"))
        .args(["--seeds", "0..2", "--summary-only"]);
    run_ok(&mut cmd);
    let names: Vec<String> = dir_contents(&tmp.path().join("two-point")).into_iter().map(|(n, _)| n).collect();
    assert_eq!(names, ["summary.json"]);
}

#[test]
fn schema_covers_every_document_field() {
    let schema: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/scenario.schema.json")).unwrap(),
    )
    .unwrap();
    let props = schema["properties"].as_object().unwrap();
    let out = run_ok(bin().args(["list-scenarios", "--json"]));
    let entries: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for e in entries.as_array().unwrap() {
        for key in e["document"].as_object().unwrap().keys() {
            assert!(props.contains_key(key), "schema lacks {key}");
        }
    }
    assert_eq!(schema["additionalProperties"], false);
}
