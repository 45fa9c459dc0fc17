use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ris-pls"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("missing {key} in:\n{text}"))
        .to_string()
}

fn num(text: &str, key: &str) -> f64 {
    field(text, key).parse().unwrap()
}

#[test]
fn presets_lists_three_locations() {
    let o = run(&["presets"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("loc1 (0.00, -0.35, 0.80) (-0.54, -0.35, 2.70) (1.20, -0.35, 2.60)"));
    assert!(text.contains("loc3 (-0.40, -0.35, 0.46) (-0.10, -0.35, 2.60) (0.80, -0.35, 3.80)"));
}

#[test]
fn optimize_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |out: &Path| {
        vec![
            "optimize".to_string(),
            "--preset".into(),
            "loc3".into(),
            "--objective".into(),
            "max-secrecy".into(),
            "--seed".into(),
            "7".into(),
            "--out".into(),
            out.display().to_string(),
        ]
    };
    let oa = bin().args(args(&a)).output().unwrap();
    let ob = bin().args(args(&b)).output().unwrap();
    assert!(oa.status.success(), "{}", stderr(&oa));
    assert_eq!(oa.stdout, ob.stdout);
    let csv = fs::read(&a).unwrap();
    assert_eq!(csv, fs::read(&b).unwrap());
    let text = String::from_utf8(csv).unwrap();
    assert!(text.contains("\nstep,m,n,trial_state,accepted,P_b_dB,P_e_dB,score,best_score\n"));
    assert!(text.starts_with("# tool=ris-pls\n# version="));
    assert!(text.contains("# seed=7\n"));
    assert_eq!(
        text.lines().filter(|l| !l.starts_with('#')).count(),
        1 + 152
    );
}

#[test]
fn optimize_max_bob_dominates_initial() {
    let o = run(&[
        "optimize",
        "--preset",
        "loc2",
        "--objective",
        "max-bob",
        "--seed",
        "3",
    ]);
    assert!(o.status.success());
    let t = stdout(&o);
    assert!(num(&t, "final_p_b_dbm") >= num(&t, "initial_p_b_dbm"));
    assert_eq!(field(&t, "states").len(), 76);
}

#[test]
fn optimize_loc1_secrecy_positive() {
    let t = stdout(&run(&["optimize", "--preset", "loc1", "--seed", "11"]));
    assert!(num(&t, "final_c_s") > 0.0);
}

#[test]
fn four_state_run_prints_diode_word() {
    let t = stdout(&run(&[
        "optimize", "--preset", "loc3", "--states", "4", "--seed", "2",
    ]));
    let word = field(&t, "diode_word");
    assert_eq!(word.len(), 152);
    assert!(word.chars().all(|c| c == '0' || c == '1'));
}

#[test]
fn missing_seed_is_reported() {
    let t = stdout(&run(&["optimize", "--preset", "loc1"]));
    let seed: u64 = field(&t, "# seed").parse().unwrap();
    let again = stdout(&run(&[
        "optimize",
        "--preset",
        "loc1",
        "--seed",
        &seed.to_string(),
    ]));
    assert_eq!(field(&t, "states"), field(&again, "states"));
}

#[test]
fn pattern_default_grid_size() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = run(&[
        "pattern",
        "--preset",
        "loc1",
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "theta_deg,phi_deg,E_re,E_im,dbi,dbi_clamped");
    assert_eq!(rows.len() - 1, 91 * 360);
    let err = stderr(&o);
    for k in [
        "gain_toward_alice_dbi",
        "gain_toward_bob_dbi",
        "gain_toward_eve_dbi",
    ] {
        num(&err, k);
    }
}

#[test]
fn optimized_pattern_raises_bob_gain() {
    let t = stdout(&run(&[
        "optimize",
        "--preset",
        "loc3",
        "--objective",
        "max-bob",
        "--seed",
        "5",
    ]));
    let states = field(&t, "states");
    let before = run(&[
        "pattern",
        "--preset",
        "loc3",
        "--grid-step",
        "1",
        "--out",
        "/dev/null",
    ]);
    let after = run(&[
        "pattern",
        "--preset",
        "loc3",
        "--grid-step",
        "1",
        "--ris",
        &states,
        "--out",
        "/dev/null",
    ]);
    assert!(after.status.success());
    let gb = num(&stderr(&before), "gain_toward_bob_dbi");
    let ga = num(&stderr(&after), "gain_toward_bob_dbi");
    assert!(ga > gb, "{ga} <= {gb}");
}

#[test]
fn malformed_configuration_exits_2_with_offset() {
    let bad = format!("{}7{}", "0".repeat(10), "0".repeat(65));
    let o = run(&[
        "pattern",
        "--preset",
        "loc1",
        "--ris",
        &bad,
        "--out",
        "/dev/null",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error[config]:"));
    assert!(err.contains("offset 10"));
}

#[test]
fn usage_errors_are_single_line() {
    let o = run(&["optimize", "--objective", "max-everything"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o).lines().count(), 1);
    assert!(stderr(&o).starts_with("error[usage]:"));
    let o = run(&["optimize", "--preset", "loc1", "--bob-xyz", "1,2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--bob-xyz"));
}

#[test]
fn scenario_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.cfg");
    fs::write(&cfg, "alice_xyz = 0, -0.35, 0.8\nbob_xyz = -0.54, -0.35, 2.7\neve_xyz = 1.2, -0.35, 2.6\nnoise_b_w = 1e-12\nnoise_e_w = 1e-12\n").unwrap();
    let o = run(&[
        "optimize",
        "--scenario",
        cfg.to_str().unwrap(),
        "--seed",
        "1",
        "--bob-xyz",
        "-0.1,-0.35,2.6",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(field(&stdout(&o), "noise_b_dbm"), "-90.0000");

    fs::write(&cfg, "alice_xyz = 0,0,1\ncolour = red\n").unwrap();
    let o = run(&["optimize", "--scenario", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("s.cfg:2: unknown key 'colour'"));
}

#[test]
fn campaign_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (out, jobs) in [(&a, "1"), (&b, "3")] {
        let o = run(&[
            "campaign",
            "--runs",
            "4",
            "--seed",
            "21",
            "--jobs",
            jobs,
            "--sweep-logs",
            "--out-dir",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let sa = fs::read(a.join("stats.json")).unwrap();
    assert_eq!(sa, fs::read(b.join("stats.json")).unwrap());
    for k in 0..4 {
        assert_eq!(
            fs::read(a.join(format!("sweep_{k}.csv"))).unwrap(),
            fs::read(b.join(format!("sweep_{k}.csv"))).unwrap()
        );
    }
    let v: serde_json::Value = serde_json::from_slice(&sa).unwrap();
    assert_eq!(v["meta"]["seed"], "21");
    assert_eq!(v["meta"]["placement"], "sampled");
    assert_eq!(v["iterations"], 153);
    let cs = &v["cs"];
    for i in 0..153 {
        let g = |k: &str| cs[k][i].as_f64().unwrap();
        assert!(
            g("min") <= g("q1")
                && g("q1") <= g("median")
                && g("median") <= g("q3")
                && g("q3") <= g("max")
        );
    }
}

#[test]
fn campaign_on_preset() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "campaign",
        "--preset",
        "loc3",
        "--runs",
        "3",
        "--seed",
        "1",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let t = stdout(&o);
    assert!(t.contains("runs=3 iterations=153"));
    let v: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("stats.json")).unwrap()).unwrap();
    assert_eq!(v["meta"]["placement"], "fixed");
    assert!(!dir.path().join("sweep_0.csv").exists());
}

#[test]
fn oracle_single_element_has_zero_gap() {
    let o = run(&[
        "oracle",
        "--preset",
        "loc3",
        "--elements",
        "1",
        "--seed",
        "4",
        "--repeats",
        "3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = stdout(&o);
    for row in t.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols[4], 0.0);
    }
}

#[test]
fn oracle_greedy_below_exhaustive_and_refusal() {
    let o = run(&["oracle", "--elements", "8", "--seed", "9", "--repeats", "5"]);
    let t = stdout(&o);
    for row in t.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cols[1] <= cols[2] && cols[3] <= cols[2]);
    }
    assert!(t.contains("# median_greedy_over_exhaustive="));
    let o = run(&["oracle", "--elements", "76", "--states", "4", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[cap-exceeded]"));
}

fn write_iq(path: &Path, samples: &[(i32, i32)]) {
    let mut s = String::from("i,q\n");
    for (i, q) in samples {
        s.push_str(&format!("{i},{q}\n"));
    }
    fs::write(path, s).unwrap();
}

#[test]
fn ingest_reports_noise_difference() {
    let dir = tempfile::tempdir().unwrap();
    let bob = dir.path().join("bob.csv");
    let eve = dir.path().join("eve.csv");
    write_iq(&bob, &vec![(0, 2); 50]);
    write_iq(&eve, &vec![(1, 0); 50]);
    let o = run(&[
        "ingest",
        "--bob",
        bob.to_str().unwrap(),
        "--eve",
        eve.to_str().unwrap(),
        "--block-len",
        "10",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let d = v["noise_floor"]["difference_db"].as_f64().unwrap();
    assert!((d - 6.020599913279624).abs() < 1e-9);
    assert_eq!(v["noise_floor"]["bob_blocks"], 5);
    assert_eq!(v["noise_floor"]["neglect_noise_difference"], true);

    let o = run(&[
        "ingest",
        "--bob",
        bob.to_str().unwrap(),
        "--eve",
        bob.to_str().unwrap(),
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["noise_floor"]["difference_db"].as_f64().unwrap(), 0.0);
}

#[test]
fn ingest_secrecy_trace_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bob = dir.path().join("bob.csv");
    write_iq(&bob, &[(3, 4), (5, 0)]);
    let summary = dir.path().join("s.csv");
    fs::write(
        &summary,
        "pb_dbfs,pe_dbfs\n-40,-40\n-30,-60.1029995663981\n",
    )
    .unwrap();
    let o = run(&[
        "ingest",
        "--bob",
        bob.to_str().unwrap(),
        "--eve",
        bob.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let cs = v["secrecy"].as_array().unwrap();
    assert_eq!(cs[0].as_f64().unwrap(), 0.0);
    assert!((cs[1].as_f64().unwrap() - 10.0).abs() < 1e-9);

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "i,q\n1,1\n2,2\n-2047,0\n").unwrap();
    let o = run(&[
        "ingest",
        "--bob",
        bad.to_str().unwrap(),
        "--eve",
        bob.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4") && stderr(&o).contains("(-2047, 2048]"));

    fs::write(&bad, "i,q\n1,1\nfoo,2\n").unwrap();
    let o = run(&[
        "ingest",
        "--bob",
        bad.to_str().unwrap(),
        "--eve",
        bob.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":3:"));
}
