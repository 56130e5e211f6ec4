use std::process::{Command, Output};

fn haros(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haros"))
        .args(args)
        .env_remove("HAROS_MAX_Q")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn cf_reports() {
    let o = haros(&["cf", "10/23"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("terms: [2, 3, 3]"));
    assert!(text.contains("convergents: 1/2, 3/7, 10/23"));
    assert!(text.contains("path: LLRRRLL"));
    assert!(text.contains("level: 8"));

    let o = haros(&["cf", "1/2", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["terms"], serde_json::json!([2]));
    assert_eq!(v["path"], "L");
    assert_eq!(v["level"], 2);

    let o = haros(&["cf", "4/6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("normalized to 2/3"));
    assert!(stdout(&o).contains("terms: [1, 2]"));
}

#[test]
fn malformed_fractions_are_usage_errors() {
    for bad in ["3/x", "12", "1/0", "5/4", "-1/2"] {
        let o = haros(&["cf", bad]);
        assert_eq!(o.status.code(), Some(2), "{bad}");
        assert!(!stderr(&o).is_empty());
    }
    assert!(stderr(&haros(&["cf", "3/x"])).contains("`x`"));
    assert_eq!(haros(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(haros(&["sweep", "--k", "4", "--order", "5"]).status.code(), Some(2));
}

#[test]
fn help_exits_cleanly() {
    for sub in ["cf", "build", "dist", "sweep", "verify"] {
        let o = haros(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{sub}");
        assert!(stdout(&o).contains("Usage"));
    }
}

#[test]
fn build_outputs() {
    let o = haros(&["build", "1/2"]);
    assert_eq!(
        stdout(&o),
        "record,key,value\nnodes,,3\nedges,,3\ndegree,0,2\ndegree,1,2\ndegree,2,2\nidentified,2,1\nidentified,4,1\n"
    );
    let o = haros(&["build", "0/1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["degrees"], serde_json::json!([1, 1]));
    assert_eq!(v["identified"], serde_json::json!({}));
    assert_eq!(v["note"], "P(k,0)=0 by convention");
}

#[test]
fn oracle_cap_from_flag_and_env() {
    assert_eq!(haros(&["build", "1/2000000"]).status.code(), Some(3));
    assert_eq!(haros(&["build", "1/50", "--max-q", "10"]).status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_haros"))
        .args(["dist", "1/50", "--method", "oracle"])
        .env("HAROS_MAX_Q", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("cap"));
}

#[test]
fn dist_methods() {
    let o = haros(&["dist", "2/5", "--method", "thm2"]);
    assert!(stdout(&o).lines().any(|l| l == "5,1/5"));
    let o = haros(&["dist", "1/1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "k,thm1\n");
    let o = haros(&["dist", "3/8", "--method", "all", "--strict", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["match"], true);
}

#[test]
fn sweep_writes_file_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f3.csv");
    let o = haros(&["sweep", "--k", "5", "--order", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("rows: 3, max discrepancy: 0/1"));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(
        text,
        "x_num,x_den,x_float,k,p_thm1_num,p_thm1_den,p_thm2_num,p_thm2_den,p_oracle_num,p_oracle_den\n\
         1,3,3.3333333333333331e-1,5,1,3,1,3,1,3\n\
         1,2,5.0000000000000000e-1,5,0,1,0,1,0,1\n\
         2,3,6.6666666666666663e-1,5,1,3,1,3,1,3\n"
    );

    let o = haros(&["sweep", "--k", "5", "--order", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);

    let o = haros(&["sweep", "--k", "5,6", "--order", "20", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["x_num"], 1);
    assert_eq!(v[0]["k"], 5);
}

#[test]
fn sweep_cap_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.csv");
    let o = haros(&[
        "sweep", "--k", "5,6", "--order", "100", "--max-rows", "10", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn verify_manifest() {
    let o = haros(&["verify", "--order", "3", "--suite", "triple"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "verify");
    assert_eq!(v["parameters"]["order"], "3");
    assert_eq!(v["checks_failed"], 0);
    assert!(v.get("first_failure").is_none());
    assert!(v["checks_passed"].as_u64().unwrap() > 0);
    assert_eq!(v["suites"][0]["name"], "triple");

    let o = haros(&["verify", "--order", "30", "--levels", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = v["suites"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["identities", "roundtrips", "recurrences", "triple", "corollary"]);

    assert_eq!(haros(&["verify", "--order", "0"]).status.code(), Some(2));
    assert_eq!(haros(&["verify", "--levels", "40"]).status.code(), Some(3));
    assert_eq!(haros(&["verify", "--order", "100000"]).status.code(), Some(3));
}

#[test]
fn seedless_runs_repeat_byte_for_byte() {
    let a = haros(&["--seedless", "sweep", "--k", "5,7", "--order", "60"]);
    let b = haros(&["sweep", "--k", "5,7", "--order", "60", "--seedless"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
