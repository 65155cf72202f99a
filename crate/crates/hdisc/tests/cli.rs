use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hdisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hdisc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("temp paths are UTF-8")
}

#[test]
fn estimate_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("estimate.csv");
    let o = hdisc(&["estimate", "--pair", "spin", "--grid", "20", "--trials", "100000", "--seed", "7", "--out", path_str(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let got = fs::read_to_string(&out).unwrap();
    let golden = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/estimate_spin_seed7.csv")).unwrap();
    assert_eq!(got, golden);
    assert!(stdout(&o).contains("1/4"));
}

#[test]
fn estimate_columns_agree_with_closed_form() {
    let golden = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/estimate_spin_seed7.csv")).unwrap();
    let mut lines = golden.lines();
    assert_eq!(lines.next().unwrap(), "delta_t,delta_h_closed,delta_h_empirical,stderr,product,bound_025_ok");
    // D0(sigma_z, -sigma_z) = 4.
    let d0 = 4.0;
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    assert_eq!(rows.len(), 20);
    for (k, r) in rows.iter().enumerate() {
        let f = |i: usize| r[i].parse::<f64>().unwrap();
        let dt = PI / d0 * k as f64 / 19.0;
        assert!((f(0) - dt).abs() < 1e-12);
        let closed = (0.5 * d0 * (1.0 - (0.5 * d0 * dt).sin())).max(0.0);
        assert!((f(1) - closed).abs() < 1e-12);
        assert!((f(2) - closed).abs() <= 3.0 * f(3), "row {k}");
        assert!((f(4) - dt * f(2)).abs() < 1e-12);
        assert_eq!(r[5], (f(4) >= 0.25).to_string());
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &["decay", "--trials", "20000", "--seed", "3"],
        &["scenario", "--name", "shared-eigenbasis", "--trials", "5000", "--seed", "4"],
        &["scenario", "--name", "farhi-gutmann", "--dims", "4..32"],
        &["protocol", "--h1", "pauli-x", "--h2", "pauli-z", "--steps", "50"],
        &["spy", "--h1", "random-hermitian:3:2", "--level", "2"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let a = dir.path().join(format!("a{i}.out"));
        let b = dir.path().join(format!("b{i}.out"));
        for p in [&a, &b] {
            let mut full = args.to_vec();
            full.extend(["--out", path_str(p)]);
            let o = hdisc(&full);
            assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "{args:?}");
    }
    // Companion files too.
    assert_eq!(fs::read(dir.path().join("a0_cutoffs.csv")).unwrap(), fs::read(dir.path().join("b0_cutoffs.csv")).unwrap());
    assert_eq!(fs::read(dir.path().join("a1_sweep.csv")).unwrap(), fs::read(dir.path().join("b1_sweep.csv")).unwrap());
}

#[test]
fn summary_lines_cite_their_bounds() {
    let cases: [(&[&str], &str); 6] = [
        (&["dist", "--h1", "pauli-z", "--h2", "-1*pauli-z"], "pi/D0 = 0.785398"),
        (&["bound", "--h1", "pauli-z", "--h2", "-1*pauli-z", "--dt", "0.5"], "is below pi"),
        (&["product"], "bound 1/4: PASS"),
        (&["spy", "--h1", "pauli-x"], "bound 1/4: PASS"),
        (&["scenario", "--name", "farhi-gutmann", "--dims", "4..64"], "sqrt(d)"),
        (&["scenario", "--name", "spin-fields"], "pi/D0 = 0.785398"),
    ];
    for (args, needle) in cases {
        let o = hdisc(args);
        assert!(o.status.success(), "{args:?}");
        let s = stdout(&o);
        assert_eq!(s.lines().count(), 1, "{s}");
        assert!(s.contains(needle), "{args:?}: {s}");
    }
}

#[test]
fn exit_codes_distinguish_config_and_domain_errors() {
    assert_eq!(hdisc(&["dist", "--h1", "pauli-z", "--h2", "pauli-x"]).status.code(), Some(0));
    assert_eq!(hdisc(&["dist", "--h1", "pauli-z", "--h2", "pauli-z"]).status.code(), Some(3));
    assert_eq!(hdisc(&["dist", "--h1", "pauli-w", "--h2", "pauli-z"]).status.code(), Some(2));
    assert_eq!(hdisc(&["dist", "--h1", "pauli-z", "--h2", "zero:3"]).status.code(), Some(2));
    assert_eq!(hdisc(&["dist", "--h1", "pauli-z", "--h2", "pauli-x", "--gamma", "1"]).status.code(), Some(2));
    assert_eq!(hdisc(&["decay", "--trials", "10"]).status.code(), Some(2));
    assert_eq!(hdisc(&["scenario", "--name", "spin-fields", "--dims", "4"]).status.code(), Some(2));
    assert_eq!(hdisc(&["scenario", "--name", "phase-box", "--phi1", "0.3", "--phi2", "0.3"]).status.code(), Some(3));
    assert_eq!(hdisc(&["estimate", "--h1", "pauli-z", "--h2", "pauli-z"]).status.code(), Some(3));
    assert_eq!(hdisc(&[]).status.code(), Some(2));
}

#[test]
fn config_file_runs_and_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let cfg = dir.path().join("cfg.json");
    let text = format!(r#"{{"command": "product", "parameters": {{"d0": 2, "grid": 11}}, "output_path": "{}"}}"#, path_str(&out));
    fs::write(&cfg, text).unwrap();
    let o = hdisc(&["config", path_str(&cfg)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 12);

    fs::write(&cfg, r#"{"command": "product", "parameters": {"trials": 5}}"#).unwrap();
    assert_eq!(hdisc(&["config", path_str(&cfg)]).status.code(), Some(2));
}

#[test]
fn protocol_and_schedule_files() {
    let dir = tempfile::tempdir().unwrap();
    let proto = dir.path().join("proto.json");
    // Phase box: bypass branch plus box branch, exposure pi for a unit phase difference.
    fs::write(
        &proto,
        r#"{"layout": {"box_dim": 1, "nobox_dim": 1, "ancilla_dim": 1},
            "initial": [0.7071067811865476, 0.7071067811865476],
            "steps": [{"dwell": 1.5707963267948966}, {"dwell": 1.5707963267948966, "control": [[1, 0], [0, 1]]}]}"#,
    )
    .unwrap();
    let h1 = dir.path().join("h1.json");
    fs::write(&h1, "[[1]]").unwrap();
    let traj = dir.path().join("traj.csv");
    let o = hdisc(&["protocol", "--protocol", path_str(&proto), "--h1", path_str(&h1), "--h2", "zero:1", "--out", path_str(&traj)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&traj).unwrap();
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((last[0] - PI).abs() < 1e-12);
    assert!(last[1].hypot(last[2]) < 1e-12);
    assert!((last[3] - PI / 2.0).abs() < 1e-12);

    let schedule = dir.path().join("schedule.json");
    fs::write(
        &schedule,
        r#"{"segments": [{"duration": 0.5, "h1": [[1, 0], [0, -1]], "h2": [[-1, 0], [0, 1]]},
                         {"duration": 0.3, "h1": [[0, 1], [1, 0]], "h2": [[0, 0], [0, 0]]}]}"#,
    )
    .unwrap();
    let o = hdisc(&["bound", "--schedule", path_str(&schedule)]);
    assert!(o.status.success());
    // 0.5*4 + 0.3*2 = 2.6 < pi.
    assert!(stdout(&o).contains("2.600000 is below pi"), "{}", stdout(&o));
}

#[test]
fn scenario_json_and_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("spin.json");
    assert!(hdisc(&["scenario", "--name", "spin-fields", "--mu-b0", "2", "--out", path_str(&out)]).status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["name"], "spin-fields");
    assert_eq!(v["pass"], true);
    assert!((v["metrics"]["first_orthogonal_time"].as_f64().unwrap() - PI / 8.0).abs() < 1e-12);
    let sweep = fs::read_to_string(dir.path().join("spin_sweep.csv")).unwrap();
    assert_eq!(sweep.lines().next().unwrap(), "time,re_overlap,im_overlap,theta");
}
