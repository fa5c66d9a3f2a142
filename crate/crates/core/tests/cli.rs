use std::path::PathBuf;
use std::process::{Command, Output};

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models")
}

fn model(name: &str) -> String {
    models().join(name).to_string_lossy().into_owned()
}

fn uicrit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uicrit")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn profile_uniform3_ui() {
    let o = uicrit(&["profile", "--model", &model("uniform3"), "--criterion", "ui", "--levels", "0:4:5:lin"]);
    assert_eq!(code(&o), 0);
    // brute force: E[X 1{X >= a}] with X uniform on {1, 2, 3}
    let expected = [2.0, 2.0, 5.0 / 3.0, 1.0, 0.0];
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("level,value,certificate,horizon"));
    for (i, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 4);
        assert_eq!(cols[0].parse::<f64>().unwrap(), i as f64);
        let v: f64 = cols[1].parse().unwrap();
        assert!((v - expected[i]).abs() < 1e-15, "{line}");
        assert_eq!(cols[2], "exact");
    }
}

#[test]
fn profile_remark_plugin_ui() {
    let o = uicrit(&[
        "profile",
        "--plugin",
        "remark-counterexample",
        "--criterion",
        "ui",
        "--levels",
        "10:1000:3:log",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let values: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    for (v, m) in values.iter().zip([10f64, 100.0, 1000.0]) {
        assert!((v - 1.0 / m.ln()).abs() < 1e-12);
    }
}

#[test]
fn profile_writes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = uicrit(&[
        "profile",
        "--model",
        &model("uniform3"),
        "--criterion",
        "wui",
        "--levels",
        "0,1,2,3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text, "level,value,certificate,horizon\n0,2,exact,\n1,1,exact,\n2,0.3333333333333333,exact,\n3,0,exact,\n");
}

#[test]
fn usage_errors_exit_2() {
    let cases: Vec<Vec<String>> = vec![
        vec!["profile".into(), "--model".into(), model("uniform3"), "--criterion".into(), "ui".into(), "--levels".into(), "1:2".into()],
        vec!["profile".into(), "--model".into(), model("uniform3"), "--criterion".into(), "bogus".into(), "--levels".into(), "1".into()],
        vec!["profile".into(), "--model".into(), model("uniform3"), "--criterion".into(), "wsui".into(), "--levels".into(), "0.5,1".into()],
        vec!["diagnose".into(), "--model".into(), model("no-such-model")],
        vec!["diagnose".into(), "--model".into(), model("invalid/normalization")],
        vec!["diagnose".into(), "--plugin".into(), "no-such-plugin".into()],
        vec!["diagnose".into()],
        vec!["bogus".into()],
        vec!["phi".into(), "--model".into(), model("uniform3"), "--k".into(), "0".into()],
    ];
    for args in cases {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = uicrit(&refs);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"), "{args:?}");
    }
}

#[test]
fn diagnose_exit_codes() {
    let o = uicrit(&["diagnose", "--model", &model("uniform3")]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    for c in ["ui", "wui", "wsui"] {
        assert!(text.contains(&format!("  {c:<6} empirical_pass")), "{text}");
    }

    let o = uicrit(&["diagnose", "--plugin", "remark-counterexample"]);
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert!(text.contains("ui     certified_pass"));
    assert!(text.contains("sui    fail"));

    let o = uicrit(&["diagnose", "--model", &model("geometric"), "--levels", "1,2,4"]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("inconclusive"));
}

#[test]
fn diagnose_csv_layout() {
    let o = uicrit(&["diagnose", "--model", &model("uniform3"), "--format", "csv", "--levels", "1,2,4"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("criterion,verdict,level,value,certificate,horizon"));
    assert!(lines.all(|l| l.split(',').count() == 6));
}

#[test]
fn phi_examples() {
    let o = uicrit(&["phi", "--model", &model("uniform0to4"), "--k", "3"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("thresholds: [3,4,5]"), "{text}");
    assert!(text.contains("sup E[phi(|X|)]: 0.2 "), "{text}");

    let o = uicrit(&["phi", "--model", &model("const2"), "--k", "1", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("table,key,value\nthreshold,1,2\n"), "{text}");
    assert!(text.contains("\nsup_phi,,0\n"), "{text}");

    let o = uicrit(&["phi", "--plugin", "remark-counterexample", "--k", "4", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let thresholds: Vec<u64> = stdout(&o)
        .lines()
        .filter(|l| l.starts_with("threshold,"))
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(thresholds.len(), 4);
    assert!(thresholds.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn phi_search_cap_exits_1() {
    let o = uicrit(&["phi", "--model", &model("uniform0to4"), "--k", "3", "--search-cap", "3"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("last profile value 0.2"));
}

#[test]
fn axioms_and_sandwich_tables() {
    let o = uicrit(&["axioms", "--model", &model("credal3"), "--trials", "50"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("axiom,trials,max_violation,violations\n"));
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",0")), "{text}");

    let o = uicrit(&["sandwich", "--model", &model("iid5")]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("member,m,excess_m,tail_sum_m,excess_m_minus_1\n"));
    assert_eq!(text.lines().count(), 1 + 5 * 10);
}

#[test]
fn every_command_is_deterministic() {
    let runs: Vec<Vec<String>> = {
        let mut v = Vec::new();
        for name in ["uniform3", "iid5", "credal3", "geometric", "remark", "uniform0to4", "const2"] {
            let m = model(name);
            v.push(vec!["profile".into(), "--model".into(), m.clone(), "--criterion".into(), "wsui".into(), "--levels".into(), "1:64:7:log".into()]);
            v.push(vec!["diagnose".into(), "--model".into(), m.clone(), "--format".into(), "csv".into()]);
            v.push(vec!["phi".into(), "--model".into(), m.clone(), "--k".into(), "4".into(), "--format".into(), "csv".into()]);
            v.push(vec!["axioms".into(), "--model".into(), m.clone(), "--trials".into(), "40".into()]);
            v.push(vec!["sandwich".into(), "--model".into(), m]);
        }
        v
    };
    for args in runs {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = uicrit(&refs);
        let b = uicrit(&refs);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status, b.status, "{args:?}");
        assert!(!a.stdout.contains(&b'\r'));
    }
}

#[test]
fn seed_changes_axiom_draws_only() {
    let a = uicrit(&["axioms", "--model", &model("credal3"), "--trials", "40", "--seed", "1"]);
    let b = uicrit(&["axioms", "--model", &model("credal3"), "--trials", "40", "--seed", "2"]);
    assert_eq!(code(&a), 0);
    assert_eq!(code(&b), 0);
    assert_ne!(a.stdout, b.stdout);
}
