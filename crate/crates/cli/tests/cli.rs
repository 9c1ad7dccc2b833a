use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_pilotopt");

fn run(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn stdout(o: &std::process::Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(run(&["sweep"]).status.code(), Some(1));
    assert_eq!(run(&["fig", "12"]).status.code(), Some(1));
    assert_eq!(
        run(&["optimize", "--shape", "triangle"]).status.code(),
        Some(1)
    );
    let o = run(&["optimize", "--doppler", "0.7"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0.7"));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn sweep_writes_csv_rows() {
    let o = run(&[
        "sweep",
        "--quantity",
        "alpha-star-vs-snr",
        "--from",
        "0",
        "--to",
        "20",
        "--points",
        "3",
        "--scale",
        "db",
        "--doppler",
        "0.001",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "series,x,method,y,clamped");
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("sweep,0.00000000000e0,numeric,"));
    assert!(lines[2].ends_with(",false"));
}

#[test]
fn json_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let o = run(&[
        "sweep",
        "--quantity",
        "se_vs_alpha",
        "--from",
        "0.04",
        "--to",
        "1",
        "--points",
        "5",
        "--method",
        "numeric",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
    assert_eq!(v["metadata"]["parameters"]["quantity"], "se-vs-alpha");
    assert_eq!(v["metadata"]["parameters"]["fixed"]["doppler"], 0.02);
}

#[test]
fn optimize_reports_both_methods() {
    let o = run(&["optimize", "--snr-db", "10", "--doppler", "0.02", "--boost"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("numeric,4.00000000000e-2,"));
    assert!(text.lines().nth(2).unwrap().starts_with("expansion,"));
}

#[test]
fn tabulated_shape_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.txt");
    std::fs::write(&path, "# flat\n-1 0.5\n0 0.5\n1 0.5\n").unwrap();
    let shape = format!("file:{}", path.display());
    let tab = run(&[
        "optimize",
        "--shape",
        &shape,
        "--doppler",
        "0.01",
        "--method",
        "numeric",
    ]);
    let rect = run(&[
        "optimize",
        "--shape",
        "rectangular",
        "--doppler",
        "0.01",
        "--method",
        "numeric",
    ]);
    assert!(tab.status.success());
    assert_eq!(stdout(&tab), stdout(&rect));
    let missing = run(&["optimize", "--shape", "file:/nonexistent/shape.txt"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn out_of_regime_expansion_exits_with_two() {
    let o = run(&[
        "optimize",
        "--snr-db",
        "-10",
        "--doppler",
        "0.2",
        "--boost",
        "--method",
        "expansion",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn doppler_conversion() {
    let o = run(&[
        "doppler",
        "--velocity",
        "27.78",
        "--carrier",
        "2.5e9",
        "--symbol-rate",
        "9718",
    ]);
    assert!(o.status.success());
    let f: f64 = stdout(&o).trim().parse().unwrap();
    assert!((f - 0.0238).abs() < 1e-3);
    assert_eq!(
        run(&[
            "doppler",
            "--velocity",
            "0",
            "--carrier",
            "2e9",
            "--symbol-rate",
            "1e4"
        ])
        .status
        .code(),
        Some(1)
    );
}

#[test]
fn verify_single_criterion() {
    let o = run(&["verify", "--criterion", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("[PASS] criterion 3"));
}
