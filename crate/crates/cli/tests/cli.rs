use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn reoa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reoa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn default_config() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs/default.json")
        .display()
        .to_string()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn measure_bell() {
    let out = reoa(&["measure", "--named", "bell", "--alpha", "1.2"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert!((v["concurrence"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["alphas"][0]["renyi_entanglement"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn measure_w_partition() {
    let out = reoa(&["measure", "--named", "w:3", "--partition", "0|12"]);
    assert_eq!(code(&out), 0);
    let c = stdout_json(&out)["concurrence"].as_f64().unwrap();
    assert!((c - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-9);
}

#[test]
fn measure_mixed_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let rho = reoa::states::ginibre_random_mixed(2, 3, reoa::states::RngSeed(4)).unwrap();
    let path = dir.path().join("rho.json");
    reoa::states::save_state(&reoa::states::State::Mixed(rho), &path).unwrap();
    let path = path.display().to_string();
    let out = reoa(&[
        "measure",
        "--state",
        &path,
        "--alpha",
        "0.9",
        "--alpha",
        "1.2",
        "--restarts",
        "4",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let coa = v["coa"].as_f64().unwrap();
    assert!(coa >= v["concurrence"].as_f64().unwrap() - 1e-12);
    for row in v["alphas"].as_array().unwrap() {
        let floor = reoa::measures::f_alpha(
            coa,
            reoa::measures::AlphaParam::new(row["alpha"].as_f64().unwrap()).unwrap(),
        )
        .unwrap();
        assert!(row["reoa_lower_bound"].as_f64().unwrap() >= floor - 1e-6);
    }
}

#[test]
fn measure_errors() {
    assert_eq!(code(&reoa(&["measure", "--named", "bogus"])), 2);
    assert_eq!(
        code(&reoa(&["measure", "--named", "bell", "--alpha=-1"])),
        2
    );
    assert_eq!(
        code(&reoa(&["measure", "--named", "w:3", "--partition", "0|1"])),
        2
    );
    assert_eq!(code(&reoa(&["measure"])), 2);
    assert_eq!(
        code(&reoa(&["measure", "--state", "/nonexistent/state.json"])),
        3
    );
}

#[test]
fn scan_g_and_m() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().display().to_string();
    let out = reoa(&["scan", "g", "--step", "1e-2", "--out", &out_dir]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["violations"], 0);
    assert!(dir.path().join("scan-g.csv").exists());

    let out = reoa(&["scan", "m", "--step", "1e-3"]);
    assert_eq!(code(&out), 0);
    assert!(stdout_json(&out)["max_value"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn scan_tolerance_breach_exits_one() {
    // A negative tolerance demands strict sign, which the zero edges of g break.
    let out = reoa(&["scan", "g", "--step", "5e-2", "--tol=-1e-3"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn scan_critical() {
    let out = reoa(&["scan", "critical-h", "--step", "1e-2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out).as_array().unwrap().len(), 2);
}

#[test]
fn scan_rejects_bad_input() {
    assert_eq!(code(&reoa(&["scan", "g", "--step", "0.5"])), 2);
    assert_eq!(code(&reoa(&["scan", "q"])), 2);
    assert_eq!(code(&reoa(&["scan", "critical-m", "--step", "0.05"])), 2);
}

#[test]
fn scan_unwritable_out_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let target = blocker.join("sub").display().to_string();
    assert_eq!(
        code(&reoa(&["scan", "m", "--step", "1e-2", "--out", &target])),
        3
    );
}

#[test]
fn figures_all_and_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = reoa(&[
            "figures",
            "--out",
            &dir.path().display().to_string(),
            "--step",
            "2e-2",
        ]);
        assert_eq!(code(&out), 0);
    }
    let mut csvs: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    csvs.sort();
    assert_eq!(csvs.len(), 8);
    assert!(a.path().join("manifest.json").exists());
    for name in csvs.iter().map(String::as_str).chain(["manifest.json"]) {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn figures_single_and_unknown() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().display().to_string();
    let out = reoa(&["figures", "--id", "3", "--out", &out_dir]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("fig3.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "alpha,h_limit_x1");
    assert_eq!(code(&reoa(&["figures", "--id", "8", "--out", &out_dir])), 2);
}

#[test]
fn verify_default_config_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = reoa(&[
        "verify",
        &default_config(),
        "--out",
        &dir.path().display().to_string(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = stdout_json(&out);
    assert_eq!(summary["verdicts"]["VIOLATION"], 0);
    assert!(summary["checks"].as_u64().unwrap() > 1000);
    assert!(dir.path().join("report.jsonl").exists());
    assert!(dir.path().join("summary.json").exists());
}

#[test]
fn verify_empty_campaign() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"seed": 1, "jobs": [{"inequality": "eq2", "states": {"kind": "haar", "n_qubits": 3, "count": 0}}]}"#,
    );
    let out_dir = dir.path().join("out");
    let out = reoa(&["verify", &config, "--out", &out_dir.display().to_string()]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["checks"], 0);
    assert_eq!(
        fs::read_to_string(out_dir.join("report.jsonl")).unwrap(),
        ""
    );
}

#[test]
fn verify_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"seed": 1, "jobs": [{"inequality": "eq19pure", "states": {"kind": "haar", "n_qubits": 3, "count": 2}, "alphas": [2.5]}]}"#,
    );
    let out = reoa(&[
        "verify",
        &config,
        "--out",
        &dir.path().join("o").display().to_string(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("jobs[0].alphas[0]"));

    let config = write_config(dir.path(), r#"{"seed": 1, "jobs": [}"#);
    assert_eq!(code(&reoa(&["verify", &config])), 2);
    assert_eq!(code(&reoa(&["verify", "/nonexistent/config.json"])), 3);
    assert_eq!(
        code(&reoa(&["verify", &default_config(), "--threads", "0"])),
        2
    );
}

#[test]
fn verify_override_flags_are_validated() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"seed": 1, "jobs": [{"inequality": "eq24", "states": {"kind": "haar", "n_qubits": 3, "count": 2}, "alphas": [1.1], "mus": [0.5]}]}"#,
    );
    let out_dir = dir.path().join("o").display().to_string();
    assert_eq!(
        code(&reoa(&[
            "verify", &config, "--out", &out_dir, "--mu", "1.5"
        ])),
        2
    );
    let out = reoa(&[
        "verify", &config, "--out", &out_dir, "--mu", "0", "--mu", "1", "--alpha", "0.9",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["checks"], 4);
}

#[test]
fn verify_is_deterministic_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"seed": 77, "budget": {"restarts": 4}, "jobs": [
            {"inequality": "eq19pure", "states": {"kind": "haar", "n_qubits": 4, "count": 10}, "alphas": [1.0]},
            {"inequality": "lemma1", "states": {"kind": "ginibre", "n_qubits": 2, "ranks": [2, 4], "count": 4}, "alphas": [1.2]}
        ]}"#,
    );
    let mut bodies = Vec::new();
    for (k, threads) in ["1", "1", "3"].iter().enumerate() {
        let out_dir = dir.path().join(format!("run{k}"));
        let out = reoa(&[
            "verify",
            &config,
            "--out",
            &out_dir.display().to_string(),
            "--threads",
            threads,
        ]);
        assert_eq!(code(&out), 0);
        bodies.push(fs::read(out_dir.join("report.jsonl")).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
    assert_eq!(bodies[0], bodies[2]);
}

#[test]
fn seed_override_changes_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"seed": 5, "jobs": [{"inequality": "eq2", "states": {"kind": "haar", "n_qubits": 3, "count": 3}}]}"#,
    );
    let run = |seed: &str, name: &str| {
        let out_dir = dir.path().join(name);
        let out = reoa(&[
            "verify",
            &config,
            "--out",
            &out_dir.display().to_string(),
            "--seed",
            seed,
        ]);
        assert_eq!(code(&out), 0);
        fs::read(out_dir.join("report.jsonl")).unwrap()
    };
    assert_ne!(run("5", "a"), run("6", "b"));
}
