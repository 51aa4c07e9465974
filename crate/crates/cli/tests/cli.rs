use std::process::{Command, Output};

use serde_json::Value;

fn heiscr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heiscr"))
        .args(args)
        .env_remove("HEISCR_SEED")
        .output()
        .expect("spawn heiscr")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is a JSON report")
}

#[test]
fn verify_default_passes_with_enough_checks() {
    let o = heiscr(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["schema"], 1);
    assert!(r["summary"]["total"].as_u64().unwrap() >= 60);
    assert_eq!(r["summary"]["failed"], 0);
    for rec in r["records"].as_array().unwrap() {
        assert!(["literature", "identity", "computed"].contains(&rec["provenance"].as_str().unwrap()));
        let pass = rec["pass"].as_bool().unwrap();
        let res = rec["residual"].as_f64();
        let tol = rec["tolerance"].as_f64().unwrap();
        assert_eq!(pass, res.map_or(false, |r| r <= tol), "{}", rec["id"]);
    }
    assert!(!r["ledger"].as_array().unwrap().is_empty());
}

#[test]
fn negative_weights_are_a_usage_error() {
    let o = heiscr(&["verify", "--a=-0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("precondition"));
}

#[test]
fn impossible_tolerance_fails_checks() {
    let o = heiscr(&["quotient", "--tol", "1e-30", "--a", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    assert!(r["summary"]["failed"].as_u64().unwrap() > 0);
}

#[test]
fn curvature_at_the_standard_structure() {
    let o = heiscr(&["curvature", "--n", "2", "--a", "0", "--samples", "4"]);
    assert_eq!(o.status.code(), Some(0));
    for row in json(&o)["data"]["rows"].as_array().unwrap() {
        assert!((row["s_engine"].as_f64().unwrap() + 4.0).abs() < 1e-8);
    }
    assert_eq!(heiscr(&["curvature", "--samples", "0"]).status.code(), Some(2));
}

#[test]
fn curvature_reports_calibrated_and_reference_constants() {
    let o = heiscr(&["curvature", "--a", "1", "--samples", "4"]);
    let r = json(&o);
    assert!((r["data"]["calibrated"]["c0"].as_f64().unwrap() - 30.0).abs() < 1e-6);
    assert!((r["data"]["reference"]["c0"].as_f64().unwrap() - 6.0).abs() < 1e-12);
    assert_eq!(r["data"]["deviation_from_reference"], true);
    let failed: Vec<&str> = r["records"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|x| !x["pass"].as_bool().unwrap())
        .map(|x| x["id"].as_str().unwrap())
        .collect();
    assert_eq!(failed, vec!["affine_coefficients"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn ccdist_csv_and_domain() {
    let o = heiscr(&["ccdist", "--format", "csv", "--q", "1,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = String::from_utf8(o.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("L,d_L,gap"));
    for l in lines {
        let d: f64 = l.split(',').nth(1).unwrap().parse().unwrap();
        assert!((d - 1.0).abs() < 1e-6);
    }
    assert!(!csv.contains('\r'));
    assert_eq!(heiscr(&["ccdist", "--q", "0,0,3"]).status.code(), Some(2));
}

#[test]
fn quotient_flow_and_cone() {
    let q = json(&heiscr(&["quotient", "--lattice-k", "2"]));
    assert_eq!(q["data"]["homology"], "Z^2 + Z_2");
    assert_eq!(q["summary"]["failed"], 0);

    let f = heiscr(&["flow", "--a", "0.5", "--samples", "3"]);
    assert_eq!(f.status.code(), Some(0));

    let c = heiscr(&["cone", "--a0", "1", "--b=-0.1"]);
    assert_eq!(c.status.code(), Some(0));
    let c = json(&c);
    assert_eq!(c["data"]["verdict"], "not positive");
    assert!((c["data"]["witness_radius"].as_f64().unwrap() - 10f64.sqrt()).abs() < 1e-12);
}

#[test]
fn seed_flag_beats_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_heiscr"));
        c.args(["cone", "--samples", "3"]);
        if let Some(f) = flag {
            c.args(["--seed", f]);
        }
        match env {
            Some(e) => c.env("HEISCR_SEED", e),
            None => c.env_remove("HEISCR_SEED"),
        };
        json(&c.output().unwrap())["config"]["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, None), 0);
    assert_eq!(run(Some("9"), None), 9);
    assert_eq!(run(Some("9"), Some("4")), 4);
}

#[test]
fn config_file_and_out_path() {
    let dir = std::env::temp_dir().join(format!("heiscr-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.conf");
    std::fs::write(&cfg, "# quotient run\nn = 2\nlattice-l = 2,4\nsamples = 3\n").unwrap();
    let out = dir.join("q.json");
    let o = heiscr(&["quotient", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["data"]["homology"], "Z^4 + Z_2");
    assert_eq!(r["config"]["n"], 2);

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(heiscr(&["quotient", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn reports_are_reproducible() {
    let a = heiscr(&["curvature", "--a", "0.5", "--samples", "3", "--seed", "11"]);
    let b = heiscr(&["curvature", "--a", "0.5", "--samples", "3", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    let c = heiscr(&["curvature", "--a", "0.5", "--samples", "3", "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn bad_flags_exit_two() {
    assert_eq!(heiscr(&["verify", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(heiscr(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(heiscr(&["ccdist", "--L-schedule", "10,1"]).status.code(), Some(2));
}
