use std::path::Path;
use std::process::Command;

use isac_feedback::harness::{DesignReport, Fig2Plan, Fig3Plan, FIG2_COLUMNS, FIG3_COLUMNS};
use isac_feedback::{SystemConfig, TrialMetrics};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_isac-feedback"));
    c.env_remove("ISAC_SEED").env_remove("ISAC_THREADS");
    c
}

fn small_system() -> SystemConfig {
    SystemConfig {
        k_users: 10,
        n_decoded: 9,
        n_stp: 5,
        ..SystemConfig::default()
    }
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(value).unwrap()).unwrap();
    p
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let sys = SystemConfig::from_json(&std::fs::read_to_string(dir.join("system.json")).unwrap())
        .unwrap();
    assert_eq!(sys.k_users, 50);
    let f2 = Fig2Plan::from_json(&std::fs::read_to_string(dir.join("fig2.json")).unwrap()).unwrap();
    assert_eq!(
        (f2.k_list.as_slice(), f2.l_list.as_slice()),
        (&[25, 50][..], &[16, 32, 64][..])
    );
    let f3 = Fig3Plan::from_json(&std::fs::read_to_string(dir.join("fig3.json")).unwrap()).unwrap();
    assert_eq!(f3.mu_list, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    assert_eq!((f3.system.k_users, f3.system.n_decoded), (50, 45));
}

#[test]
fn fig2_csv_schema_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let plan = Fig2Plan {
        system: small_system(),
        k_list: vec![10, 20],
        l_list: vec![8, 16],
        n_trials: 4,
    };
    let cfg = write_json(dir.path(), "fig2.json", &plan);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    run_ok(
        bin()
            .args(["fig2", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&a)
            .env("ISAC_THREADS", "1"),
    );
    run_ok(
        bin()
            .args(["fig2", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&b)
            .env("ISAC_THREADS", "3"),
    );
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.as_bytes(), std::fs::read(&b).unwrap().as_slice());

    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# config_hash="));
    assert!(lines[0].contains("seed=1 "));
    assert!(lines[0].contains("codebook_seed="));
    assert_eq!(lines[1], FIG2_COLUMNS);
    assert_eq!(lines.len(), 2 + 2 * 2 * 2);
    for row in &lines[2..] {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f.len(), 6);
        f[0].parse::<usize>().unwrap();
        f[1].parse::<usize>().unwrap();
        assert!(f[2] == "pgd" || f[2] == "matched_filter");
        let ec: f64 = f[3].parse().unwrap();
        assert!((0.0..=1.0).contains(&ec));
        assert!(f[4].parse::<f64>().unwrap() >= 0.0);
        assert_eq!(f[5], "4");
    }
}

#[test]
fn fig3_csv_schema_and_results_dump() {
    let dir = tempfile::tempdir().unwrap();
    let plan = Fig3Plan {
        system: small_system(),
        mu_list: vec![0.0, 0.5, 1.0],
        l_list: vec![16],
        n_trials: 3,
    };
    let cfg = write_json(dir.path(), "fig3.json", &plan);
    let out = dir.path().join("f3.csv");
    let dump = dir.path().join("f3.json");
    run_ok(
        bin()
            .args(["fig3", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .arg("--results")
            .arg(&dump),
    );
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], FIG3_COLUMNS);
    assert_eq!(lines.len(), 5);
    let mus: Vec<&str> = lines[2..]
        .iter()
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(mus, ["0", "0.5", "1"]);

    let results: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    for r in results {
        isac_feedback::harness::ExperimentResult::from_json(&r.to_string()).unwrap();
    }
}

#[test]
fn seed_override_changes_header_and_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let plan = Fig2Plan {
        system: small_system(),
        k_list: vec![10],
        l_list: vec![8],
        n_trials: 6,
    };
    let cfg = write_json(dir.path(), "p.json", &plan);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    run_ok(
        bin()
            .args(["fig2", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&a),
    );
    run_ok(
        bin()
            .args(["fig2", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&b)
            .env("ISAC_SEED", "99"),
    );
    let ta = std::fs::read_to_string(&a).unwrap();
    let tb = std::fs::read_to_string(&b).unwrap();
    assert!(tb.lines().next().unwrap().contains("seed=99 "));
    assert_ne!(ta, tb);
}

#[test]
fn trial_and_design_commands() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_json(dir.path(), "sys.json", &small_system());
    let stdout = run_ok(
        bin()
            .args(["trial", "--config"])
            .arg(&cfg)
            .args(["--index", "2"]),
    );
    let m: TrialMetrics = serde_json::from_str(&stdout).unwrap();
    assert_eq!(m.trial_index, 2);
    let direct = isac_feedback::run_trial(&small_system(), 2).unwrap();
    assert!(m.same_outcome(&direct));

    let out = dir.path().join("design.json");
    run_ok(
        bin()
            .args(["design", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out),
    );
    let report: DesignReport =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.trace.len(), 5);
    assert_eq!(report.config, small_system());
}

#[test]
fn bad_inputs_fail_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"m": 20}"#).unwrap();
    let out = bin()
        .args(["trial", "--config"])
        .arg(&bad)
        .args(["--index", "0"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let cfg = write_json(dir.path(), "sys.json", &small_system());
    let out = bin()
        .args(["trial", "--config"])
        .arg(&cfg)
        .args(["--index", "0", "--method", "nope"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
