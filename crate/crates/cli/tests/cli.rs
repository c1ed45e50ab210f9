use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn s3flow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_s3flow"))
        .args(args)
        .output()
        .expect("spawn s3flow")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn header(csv: &str) -> &str {
    csv.lines().find(|l| !l.starts_with('#')).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn dirac_run_writes_expected_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = s3flow(&[
        "run",
        "--flow",
        "dirac",
        "--k",
        "1",
        "--init",
        "f=0,df=1",
        "--t-end",
        "1.5",
        "--step",
        "1e-3",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(header(&csv), "t,f,df,constraint_residual");
    assert!(csv.starts_with("# flow=dirac\n# k=1\n"));
    // header plus 1501 rows
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 1502);
    assert!(!csv.contains('\r'));
}

#[test]
fn asd_run_writes_residual_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eh.csv");
    let o = s3flow(&[
        "run",
        "--flow",
        "asd",
        "--init",
        "a1=0,a2=1",
        "--t-end",
        "2",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(header(&csv), "t,a1,a2,asd_res1,asd_res2");
}

#[test]
fn berger_collapse_is_echoed_in_footer() {
    let o = s3flow(&["run", "--flow", "ricci2", "--init", "alpha=4,beta=9"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let footer = text.lines().last().unwrap();
    assert!(
        footer.starts_with("# stop=collapse(alpha) t_stop="),
        "{footer}"
    );
    let t: f64 = footer.rsplit('=').next().unwrap().parse().unwrap();
    assert!(t > 0.0 && t < 10.0);
}

#[test]
fn json_output_mirrors_csv() {
    let o = s3flow(&[
        "run", "--flow", "ricci1", "--t-end", "0.5", "--format", "json",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["flow"], "ricci1");
    assert_eq!(v["columns"], serde_json::json!(["t", "f", "conserved"]));
    assert_eq!(v["stop"]["reason"], "reached_t_end");
    assert_eq!(v["rows"].as_array().unwrap().len(), 501);
}

#[test]
fn domain_exit_exits_2() {
    // flow9 needs a1 < √2 a2
    let o = s3flow(&[
        "run",
        "--flow",
        "flow9",
        "--init",
        "a1=1.5,a2=1",
        "--t-end",
        "1",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        &["run", "--flow", "asd", "--init", "a1=0,a3=1"][..],
        &["run", "--flow", "warp"],
        &["run", "--flow", "dirac"],
        &["run", "--flow", "ricci1", "--k", "1"],
        &["run", "--flow", "ricci1", "--step", "-1"],
        &["run", "--flow", "ricci2", "--init", "alpha=1"],
        &["run"],
        &["frobnicate"],
        &["verify", "--flow", "ricci1", "--oracle", "volume"],
        &["verify", "--flow", "ricci1", "--oracle", "nonsense"],
        &[
            "verify",
            "--flow",
            "flow9",
            "--init",
            "a1=0.5,a2=1",
            "--oracle",
            "eh-match",
        ],
        &["curvature", "--a1", "1"],
    ] {
        let o = s3flow(args);
        assert_eq!(code(&o), 1, "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn help_exits_0() {
    assert_eq!(code(&s3flow(&["--help"])), 0);
    assert_eq!(code(&s3flow(&["run", "--help"])), 0);
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# round Ricci flow\nflow = ricci1\ninit = f=2\nt-end = 0.25\nstep = 0.05\nformat = csv\n",
    )
    .unwrap();
    let o = s3flow(&["run", "--config", path_str(&cfg)]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("# init=f=2.0000000000000000e0\n"));
    assert!(text.contains("# t_end=2.5000000000000000e-1 step=5.0000000000000003e-2"));

    let o = s3flow(&[
        "run",
        "--config",
        path_str(&cfg),
        "--t-end",
        "0.1",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["t_end"].as_f64(), Some(0.1));
}

#[test]
fn bad_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "flow = ricci1\ncolour = blue\n").unwrap();
    assert_eq!(code(&s3flow(&["run", "--config", path_str(&cfg)])), 1);
    let missing = dir.path().join("missing.cfg");
    assert_eq!(code(&s3flow(&["run", "--config", path_str(&missing)])), 1);
}

#[test]
fn continuation_flags_rows() {
    let o = s3flow(&[
        "run",
        "--flow",
        "ricci2",
        "--init",
        "alpha=4,beta=9",
        "--t-end",
        "1",
        "--continue-past-collapse",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(header(&text).ends_with(",nonriemannian"));
    let flags: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(flags[0], "0");
    assert_eq!(*flags.last().unwrap(), "1");
}

#[test]
fn verify_examples_pass() {
    for args in [
        &[
            "verify",
            "--flow",
            "dirac",
            "--k",
            "-1",
            "--oracle",
            "closed-form",
            "--tol",
            "1e-6",
        ][..],
        &[
            "verify",
            "--flow",
            "asd",
            "--init",
            "a1=0,a2=1",
            "--oracle",
            "eh-match,einstein",
        ],
        &[
            "verify",
            "--flow",
            "nricci2",
            "--init",
            "a1=2,a2=1",
            "--oracle",
            "volume",
        ],
    ] {
        let o = s3flow(args);
        assert_eq!(code(&o), 0, "{args:?}\n{}", stdout(&o));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["pass"], true);
    }
}

#[test]
fn verify_report_keys_are_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("r.json");
    let o = s3flow(&[
        "verify",
        "--flow",
        "dirac",
        "--k",
        "0",
        "--oracle",
        "prop1,closed-form",
        "--report",
        path_str(&rep),
    ]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&rep).unwrap();
    let pos = |k: &str| text.find(k).unwrap();
    assert!(pos("\"flow\"") < pos("\"init\""));
    assert!(pos("\"init\"") < pos("\"stop\""));
    assert!(pos("\"prop1\"") < pos("\"closed-form\""));
    assert!(pos("\"pass\"") < pos("\"wall_time_s\""));
}

#[test]
fn failing_oracle_exits_2() {
    let o = s3flow(&[
        "verify",
        "--flow",
        "dirac",
        "--k",
        "1",
        "--oracle",
        "closed-form",
        "--tol",
        "1e-20",
    ]);
    assert_eq!(code(&o), 2);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], false);
    assert_eq!(v["oracles"]["closed-form"]["passed"], false);
}

#[test]
fn curvature_round_point() {
    let o = s3flow(&["curvature", "--a1", "1", "--a2", "1", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["ric11", "ric22", "ric33"] {
        assert_eq!(v["ricci_restricted"][key].as_f64(), Some(4.0));
    }
    assert!(v.get("ricci_ambient").is_none());

    let text = stdout(&s3flow(&["curvature", "--a1", "1", "--a2", "1"]));
    assert!(text.contains("ric11 = 4.000000000000"));
}

#[test]
fn curvature_eh_point_is_asd() {
    let o = s3flow(&[
        "curvature",
        "--profile",
        "eh",
        "--a",
        "1",
        "--r",
        "1.5",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["rho1", "rho2"] {
        assert!(v["asd_residual"][key].as_f64().unwrap().abs() < 1e-12);
    }
    for key in ["ric00", "ric11", "ric22", "ric33"] {
        assert!(v["ricci_ambient"][key].as_f64().unwrap().abs() < 1e-12);
    }
}

#[test]
fn curvature_at_collapsed_fibre_fails() {
    let o = s3flow(&["curvature", "--a1", "0", "--a2", "1"]);
    assert_ne!(code(&o), 0);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("connection form undefined at a1 = 0"), "{err}");
}

fn sweep_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn berger_sweep_classes() {
    let o = s3flow(&[
        "sweep",
        "--flow",
        "ricci2",
        "--grid",
        "alpha=0:8:9",
        "--grid",
        "beta=1:8:8",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(
        header(&text),
        "i,j,alpha,beta,class,stop,t_stop,final_alpha,final_beta"
    );
    let rows = sweep_rows(&text);
    assert_eq!(rows.len(), 72);
    for r in &rows {
        let alpha: f64 = r[2].parse().unwrap();
        let beta: f64 = r[3].parse().unwrap();
        let class = r[4].as_str();
        if alpha == 0.0 {
            assert_eq!(class, "bolt-collapse", "{r:?}");
        } else if alpha == beta {
            assert_eq!(class, "nut-collapse", "{r:?}");
        } else if alpha < beta {
            assert_eq!(class, "merge-then-collapse", "{r:?}");
            let fa: f64 = r[7].parse().unwrap();
            let fb: f64 = r[8].parse().unwrap();
            assert!((fa / fb - 1.0).abs() < 0.01, "{r:?}");
        }
    }
}

#[test]
fn sweep_order_is_independent_of_threads() {
    let base = [
        "sweep",
        "--flow",
        "ricci2",
        "--grid",
        "alpha=1:4:4",
        "--grid",
        "beta=1:4:4",
    ];
    let one = s3flow(&[&base[..], &["--threads", "1"]].concat());
    let many = s3flow(&[&base[..], &["--threads", "4"]].concat());
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, many.stdout);
    let idx: Vec<(String, String)> = sweep_rows(&stdout(&one))
        .into_iter()
        .map(|r| (r[0].clone(), r[1].clone()))
        .collect();
    let mut sorted = idx.clone();
    sorted.sort_by_key(|(i, j)| (i.parse::<usize>().unwrap(), j.parse::<usize>().unwrap()));
    assert_eq!(idx, sorted);
}

#[test]
fn sweep_horizon_and_budget() {
    let o = s3flow(&[
        "sweep", "--flow", "nricci2", "--grid", "a1=1:2:2", "--grid", "a2=1:2:2", "--t-end", "0.5",
        "--step", "1e-3",
    ]);
    assert_eq!(code(&o), 0);
    assert!(sweep_rows(&stdout(&o)).iter().all(|r| r[4] == "horizon"));

    let o = s3flow(&[
        "sweep",
        "--flow",
        "ricci2",
        "--grid",
        "alpha=1:8:8",
        "--grid",
        "beta=1:8:8",
        "--max-samples",
        "1000",
    ]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn sweep_rejects_bad_grids() {
    for args in [
        &["sweep", "--flow", "ricci2", "--grid", "alpha=1:8:8"][..],
        &[
            "sweep",
            "--flow",
            "ricci2",
            "--grid",
            "alpha=1:8:8",
            "--grid",
            "gamma=1:2:2",
        ],
        &[
            "sweep",
            "--flow",
            "ricci2",
            "--grid",
            "alpha=1:8:8",
            "--grid",
            "alpha=1:2:2",
        ],
        &[
            "sweep",
            "--flow",
            "ricci2",
            "--grid",
            "alpha=1:8",
            "--grid",
            "beta=1:2:2",
        ],
    ] {
        assert_eq!(code(&s3flow(args)), 1, "{args:?}");
    }
}
