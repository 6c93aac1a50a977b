use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn warpspec(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_warpspec")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(args: &[&str]) -> Value {
    let r = warpspec(args);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    serde_json::from_str(&r.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("warpspec-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn num(v: &Value, path: &[&str]) -> f64 {
    path.iter().fold(v, |v, k| &v[*k]).as_f64().unwrap_or_else(|| panic!("missing {path:?}"))
}

#[test]
fn constants_for_the_reference_instance() {
    let v = json(&["constants", "--n", "3", "--kappa", "1", "--lambda", "6"]);
    let r = &v["results"];
    assert!((num(r, &["a"]) - (5.0f64 / 6.0).sqrt()).abs() < 1e-15);
    assert!((num(r, &["beta2"]) - 1.05).abs() < 1e-15);
    assert!((num(r, &["lambda_exp"]) - 2.0 / 3.0).abs() < 1e-15);
    for k in ["beta2_relation", "eigen_balance", "singular_balance", "three_dimensional_agreement"] {
        assert_eq!(v["verdicts"][k]["pass"], Value::Bool(true), "{k}");
    }
}

#[test]
fn kappa_zero_gives_unit_scales() {
    let v = json(&["constants", "--kappa", "0", "--lambda", "6"]);
    assert_eq!(num(&v, &["results", "a"]), 1.0);
    assert_eq!(num(&v, &["results", "b"]), 1.0);
}

#[test]
fn emitted_table_round_trips_through_lambda_c() {
    let table = scratch("model.csv");
    let r = warpspec(&["emit-model", "--n", "3", "--kappa", "1", "--lambda", "6", "--out", table.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let head = std::fs::read_to_string(&table).unwrap();
    assert!(head.starts_with("t,phi,phi_prime,phi_second\n"));

    let metric = format!("file:{}", table.display());
    let v = json(&["lambda-c", "--kappa", "1", "--lambda", "6", "--metric", &metric]);
    assert!((num(&v, &["results", "lambda_c"]) - 6.0).abs() / 6.0 < 1e-6);
    assert!(v["verdicts"].get("target_reproduction").is_none());
}

#[test]
fn verify_suites_pass_on_the_model() {
    for suite in ["closed-form", "f-ode", "xi-ode", "mu", "model-relations", "eigenfunction", "drift"] {
        let v = json(&["verify", "--suite", suite]);
        for (k, verdict) in v["verdicts"].as_object().unwrap() {
            assert_eq!(verdict["pass"], Value::Bool(true), "{suite}/{k}");
        }
    }
    let v = json(&["verify", "--suite", "model-relations", "--kappa", "2"]);
    assert!(num(&v, &["verdicts", "item3_verbatim_discrepancy", "measured"]) > 0.1);
    let v = json(&["verify", "--suite", "drift", "--kappa", "0.5"]);
    let expected = 4.0 / 3.5;
    assert!((num(&v, &["results", "c1"]) - expected).abs() / expected < 0.01);
}

#[test]
fn flags_override_config_file() {
    let cfg = scratch("run.cfg");
    std::fs::write(&cfg, "# reference run\nn = 4\nkappa = 0.5\nlambda = 12\nformat = csv\n").unwrap();
    let r = warpspec(&["constants", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("name,pass,measured,comparison,threshold\n"));

    let v = json(&["constants", "--config", cfg.to_str().unwrap(), "--n", "3", "--format", "json"]);
    assert_eq!(v["config"]["n"], 3);
    assert_eq!(num(&v, &["config", "kappa"]), 0.5);
    assert_eq!(num(&v, &["config", "lambda"]), 12.0);
}

#[test]
fn sweep_writes_csv_side_file() {
    let side = scratch("sweep.csv");
    let v = json(&["rigidity-sweep", "--amplitudes", "0,0.05", "--csv", side.to_str().unwrap()]);
    assert_eq!(v["verdicts"]["strict_gap[eps=0.05]"]["pass"], Value::Bool(true));
    let text = std::fs::read_to_string(&side).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("epsilon,dominates,lambda_c,gap,err"));
    assert!(lines.next().unwrap().starts_with("0.0,true_equal,"));
    assert!(lines.next().unwrap().starts_with("0.05,true_strict,"));
}

#[test]
fn stretch_sweep_is_strict() {
    let v = json(&["rigidity-sweep", "--perturbation", "stretch", "--amplitudes", "0,0.05"]);
    for (k, verdict) in v["verdicts"].as_object().unwrap() {
        assert_eq!(verdict["pass"], Value::Bool(true), "{k}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["lambda-c", "--n", "4", "--kappa", "0.1", "--lambda", "12"];
    assert_eq!(warpspec(&args).stdout, warpspec(&args).stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(warpspec(&["constants", "--kappa", "4"]).code, 2);
    assert_eq!(warpspec(&["constants", "--n", "2"]).code, 2);
    assert_eq!(warpspec(&["constants", "--tol", "observed_order_deviation=0.1"]).code, 2);
    assert_eq!(warpspec(&["lambda-c", "--metric", "file:/nonexistent/warp.csv"]).code, 2);
    assert_eq!(warpspec(&["lambda-c", "--max-iter", "0"]).code, 3);
    assert_eq!(warpspec(&["verify", "--suite", "mu", "--tol", "mu=0"]).code, 1);
    assert_eq!(warpspec(&["--help"]).code, 0);
}

#[test]
fn mu_profile_csv() {
    let r = warpspec(&["mu-profile", "--format", "csv", "--points", "9"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let mut lines = r.stdout.lines();
    assert_eq!(lines.next(), Some("t,mu"));
    for line in lines {
        let mu: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((mu - 6.0).abs() < 1e-6, "{line}");
    }
}
