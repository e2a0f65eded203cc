use std::path::PathBuf;
use std::process::{Command, Output};

fn qecm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qecm")).args(args).env_remove("QECM_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qecm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn game_reports_breidbart_value() {
    let o = qecm(&["game", "--scheme", "ce", "--lambda", "2", "--attack", "breidbart", "--mode", "exact"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.7285533905932737).abs() < 1e-9);
    assert_eq!(v["bound_satisfied"], true);
    assert_eq!(v["seed"], 1);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    assert!(v["bound_note"].as_str().unwrap().contains("not a bound over all adversaries"));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let args = ["game", "--scheme", "fce", "--lambda", "4", "--n", "2", "--attack", "guess", "--mode", "monte_carlo", "--trials", "500", "--seed", "17"];
    let (a, b) = (qecm(&args), qecm(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let (x, y) = (scratch("curve-a.csv"), scratch("curve-b.csv"));
    for path in [&x, &y] {
        let o = qecm(&["curve", "--min", "1", "--max", "6", "--trials", "500", "--output", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&x).unwrap(), std::fs::read(&y).unwrap());
}

#[test]
fn seed_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_qecm"))
        .args(["game", "--lambda", "1"])
        .env("QECM_SEED", "42")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(v["config"]["seed"], 42);
}

#[test]
fn curve_has_fixed_header_and_ten_rows() {
    let o = qecm(&["curve", "--min", "1", "--max", "10", "--trials", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,classical,ideal,conjugate,qprf,measured_attack,measured_value");
    let rows: Vec<&str> = lines[1..].iter().copied().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows[1].starts_with("2,1,0.25,"));
    assert!(lines.last().unwrap().starts_with("# seed=1 config_hash="));
}

#[test]
fn config_file_with_unknown_key_exits_2() {
    let path = scratch("bad.toml");
    std::fs::write(&path, "scheme = \"ce\"\nlambda = 2\nattak = \"breidbart\"\n").unwrap();
    let o = qecm(&["game", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("attak"));
}

#[test]
fn config_file_runs_and_writes_output() {
    let (cfg, out) = (scratch("good.toml"), scratch("report.csv"));
    std::fs::write(
        &cfg,
        format!(
            "game = \"min_entropy\"\nscheme = \"ce\"\nlambda = 2\nattack = \"breidbart\"\ndistribution = \"min_entropy:1\"\nformat = \"csv\"\noutput = {:?}\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = qecm(&["game", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().ends_with(",config_hash"));
    assert!(lines.next().unwrap().starts_with("min_entropy,ce,breidbart,min_entropy(1),2,2,exact,"));
}

#[test]
fn invalid_flags_exit_2() {
    assert_eq!(qecm(&["game", "--scheme", "rsa"]).status.code(), Some(2));
    assert_eq!(qecm(&["game", "--attack", "teleport"]).status.code(), Some(2));
    assert_eq!(qecm(&["game", "--scheme", "ce", "--lambda", "2", "--attack", "copy"]).status.code(), Some(2));
    assert_eq!(qecm(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn capacity_errors_exit_3() {
    let o = qecm(&["game", "--scheme", "fce", "--lambda", "10", "--attack", "guess", "--mode", "exact"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let o = qecm(&["game", "--scheme", "ce", "--lambda", "8", "--attack", "breidbart"]);
    assert_eq!(o.status.code(), Some(3));
    let o = qecm(&["moe", "--lambda", "3", "--dim-b", "8", "--dim-c", "8", "--restarts", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn moe_reports_best_restart() {
    let o = qecm(&["moe", "--lambda", "1", "--restarts", "3", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["runs"].as_array().unwrap().len(), 3);
    assert_eq!(v["seed"], 5);
    assert!(v["best_value"].as_f64().unwrap() <= v["bound"].as_f64().unwrap() + 1e-9);
}

#[test]
fn verify_fast_passes() {
    let o = qecm(&["verify", "--fast"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 9, "{text}");
}
