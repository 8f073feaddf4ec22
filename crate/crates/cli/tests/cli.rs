use std::path::PathBuf;
use std::process::{Command, Output};

fn gmclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmclab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn temp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("gmclab-cli-{}-{name}", std::process::id()))
}

#[test]
fn barnes_g_superfactorial() {
    let o = gmclab(&["specfun", "--barnes-g", "5", "--assert"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("# schema=1\nquantity,value\n"));
    let v: f64 = out.lines().nth(2).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - 12.0).abs() < 1e-10);
}

#[test]
fn critical_slope_with_assertion() {
    let o = gmclab(&["gmc-slope", "--gamma", "1", "--d", "1", "--eps", "2^-6..2^-16", "--method", "quadrature", "--assert", "--tol", "0.02"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().last().unwrap().ends_with("PASS"));
}

#[test]
fn failed_assertion_exits_with_four() {
    let o = gmclab(&["rmt-fh", "--angles", "[0, 1]", "--s", "0.5", "--n", "64", "--assert", "--tol", "1e-9"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).trim_end().ends_with("FAIL"));
}

#[test]
fn stochastic_commands_require_a_seed() {
    let o = gmclab(&["paths-verify", "--test", "exp-max", "--reps", "200"]);
    assert_eq!(o.status.code(), Some(2));
    let o = gmclab(&["rmt-mom", "--n", "4", "--k", "1", "--s", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_64() {
    assert_eq!(gmclab(&["--no-such-flag"]).status.code(), Some(64));
    assert_eq!(gmclab(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(gmclab(&["gmc-slope"]).status.code(), Some(64));
}

#[test]
fn invalid_parameters_exit_with_two() {
    assert_eq!(gmclab(&["specfun", "--reflection-coefficient", "--gamma", "2", "--d", "1"]).status.code(), Some(2));
    assert_eq!(gmclab(&["rmt-mom", "--n", "16", "--k", "1", "--s", "1", "--grid", "32", "--seed", "1"]).status.code(), Some(2));
}

#[test]
fn identical_arguments_give_identical_files() {
    let (a, b, c) = (temp("a.csv"), temp("b.csv"), temp("c.csv"));
    let run = |path: &PathBuf, threads: &str| {
        let o = gmclab(&[
            "paths-verify", "--test", "two-m-minus-b", "--mu", "1", "--dt", "0.01", "--reps", "400", "--seed", "11",
            "--threads", threads, "--output", path.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    };
    run(&a, "1");
    run(&b, "1");
    run(&c, "3");
    let (ra, rb, rc) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), std::fs::read(&c).unwrap());
    for p in [&a, &b, &c] {
        std::fs::remove_file(p).ok();
    }
    assert_eq!(ra, rb);
    assert_eq!(ra, rc);
    assert!(String::from_utf8(ra).unwrap().starts_with("# schema=1\ntest,n,statistic,threshold,pass,seed\n"));
}

#[test]
fn config_file_merges_under_explicit_flags() {
    let cfg = temp("config.json");
    std::fs::write(&cfg, r#"{"n": 3, "k": 1, "s": 1, "reps": 400, "seed": 2}"#).unwrap();
    let a = gmclab(&["rmt-mom", "--config", cfg.to_str().unwrap()]);
    let b = gmclab(&["rmt-mom", "--n", "3", "--k", "1", "--s", "1", "--reps", "400", "--seed", "2"]);
    let c = gmclab(&["rmt-mom", "--seed", "3", "--config", cfg.to_str().unwrap()]);
    std::fs::remove_file(&cfg).ok();
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert_ne!(stdout(&a), stdout(&c));
}

#[test]
fn json_output() {
    let o = gmclab(&["rmt-toeplitz", "--angles", "[0.4]", "--s", "1", "--n", "1", "--format", "json", "--assert"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let json_end = text.rfind('}').unwrap();
    let v: serde_json::Value = serde_json::from_str(&text[..=json_end]).unwrap();
    assert_eq!(v["schema"], 1);
    let logd = v["rows"][0]["value"].as_f64().unwrap();
    assert!((logd - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn every_subcommand_has_help() {
    for cmd in [
        "specfun", "gmc-slope", "gmc-supercritical", "gmc-multifractal", "paths-verify", "paths-reflection", "rmt-mom",
        "rmt-toeplitz", "rmt-fh",
    ] {
        let o = gmclab(&[cmd, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        assert!(text.lines().next().unwrap().len() > 20, "{cmd}");
    }
}

#[test]
fn path_check_reports_pass() {
    let o = gmclab(&["paths-verify", "--test", "exp-max", "--mu", "1", "--dt", "0.001", "--reps", "4000", "--seed", "7", "--assert"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("exp_max ks="));
}
