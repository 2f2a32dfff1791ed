use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcs"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = pcs(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# "), "metadata line");
    lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(rows: &[Vec<String>], name: &str) -> usize {
    rows[0].iter().position(|c| c == name).unwrap()
}

#[test]
fn enumerate_grid_contains_reference_rows() {
    let text = stdout(&[
        "enumerate",
        "--M",
        "64,128,256,512",
        "--m",
        "1,2,3,4,5,6,7,8,9",
        "--l",
        "0",
    ]);
    let rows = csv_rows(&text);
    let (mc, mm, nt) = (
        column(&rows, "M"),
        column(&rows, "m"),
        column(&rows, "n_total"),
    );
    let get = |big_m: &str, m: &str| -> f64 {
        rows.iter().find(|r| r[mc] == big_m && r[mm] == m).unwrap()[nt]
            .parse()
            .unwrap()
    };
    assert!((get("512", "8") - 62.43).abs() < 0.01);
    assert!((get("512", "9") - 37.47).abs() < 0.01);
    // 4 subcarrier counts, m = 1..9 feasible everywhere except m = 7..9 at small M
    assert_eq!(rows.len() - 1, 6 + 7 + 8 + 9);
}

#[test]
fn enumerate_single_row_without_zeros() {
    let rows = csv_rows(&stdout(&["enumerate", "--M", "16", "--m", "4", "--l", "0"]));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][column(&rows, "Z")], "0");
    assert_eq!(rows[1][column(&rows, "n_supp")], "0.0");
}

#[test]
fn dmin_scan_reference_value() {
    let rows = csv_rows(&stdout(&["dmin-scan", "--M", "160", "--m", "6"]));
    assert_eq!(rows.len(), 1 + 6);
    let l5 = rows.iter().find(|r| r[column(&rows, "l")] == "5").unwrap();
    let d: f64 = l5[column(&rows, "d_lb")].parse().unwrap();
    assert!((d - 12.65).abs() < 0.005);
    assert_eq!(l5[column(&rows, "info_bits")], "25");
}

#[test]
fn rank_and_unrank_are_inverse() {
    let v: Value = serde_json::from_str(&stdout(&[
        "unrank", "--M", "24", "--m", "3", "--l", "1", "--rank", "17",
    ]))
    .unwrap();
    let offset = v["separation"]["offset"].to_string();
    let gaps: Vec<String> = v["separation"]["gaps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g.to_string())
        .collect();
    let r: Value = serde_json::from_str(&stdout(&[
        "rank",
        "--M",
        "24",
        "--m",
        "3",
        "--l",
        "1",
        "--offset",
        &offset,
        "--gaps",
        &gaps.join(","),
    ]))
    .unwrap();
    assert_eq!(r["rank"], "17");
}

#[test]
fn encode_then_decode_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let enc = dir.path().join("enc.json");
    let code = ["--M", "32", "--m", "4", "--l", "2"];
    let mut args = vec!["encode"];
    args.extend(code);
    args.extend([
        "--nonzero",
        "2b5",
        "--index",
        "1f",
        "--out",
        enc.to_str().unwrap(),
    ]);
    stdout(&args);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&enc).unwrap()).unwrap();
    assert_eq!(doc["sequence"]["length"], 32);
    let rx = dir.path().join("rx.json");
    std::fs::write(&rx, doc["sequence"].to_string()).unwrap();
    let mut args = vec!["decode"];
    args.extend(code);
    args.extend(["--input", rx.to_str().unwrap()]);
    let dec: Value = serde_json::from_str(&stdout(&args)).unwrap();
    assert_eq!(dec["payload"]["nonzero"], "2b5");
    assert_eq!(dec["payload"]["index"], "1f");
    assert_eq!(dec["params"], doc["params"]);
}

#[test]
fn pmepr_ccdf() {
    let rows = csv_rows(&stdout(&[
        "pmepr", "--M", "24", "--m", "4", "--l", "3", "--count", "300",
    ]));
    let max = rows[1..]
        .iter()
        .map(|r| r[0].parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!(max <= 3.0103 + 1e-3);
    let single = csv_rows(&stdout(&["pmepr", "--M", "16", "--m", "3", "--count", "1"]));
    assert_eq!(single.len(), 2);
    assert_eq!(single[1][1], "1.0");
    let control = csv_rows(&stdout(&[
        "pmepr",
        "--M",
        "64",
        "--m",
        "3",
        "--count",
        "300",
        "--qpsk-control",
    ]));
    let max = control[1..]
        .iter()
        .map(|r| r[0].parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!(max > 6.0, "{max}");
}

#[test]
fn bler_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let profile = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../profiles/exponential6.toml");
    let run = |name: &str| {
        let out = dir.path().join(name);
        stdout(&[
            "bler",
            "--M",
            "16",
            "--m",
            "3",
            "--ebn0",
            "-2,inf",
            "--trials",
            "200",
            "--seed",
            "5",
            "--profile",
            profile.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        std::fs::read_to_string(out).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let rows = csv_rows(&a);
    assert_eq!(rows[0], ["ebn0_db", "n0", "trials", "block_errors", "bler"]);
    assert_eq!(rows[2][3], "0");
    assert!(rows[1][3].parse::<usize>().unwrap() > 0);
}

#[test]
fn json_format_for_sweeps() {
    let v: Value = serde_json::from_str(&stdout(&[
        "--format",
        "json",
        "enumerate",
        "--M",
        "9",
        "--m",
        "3",
    ]))
    .unwrap();
    assert_eq!(v["meta"]["command"], "enumerate");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn validation_errors_exit_with_two() {
    for args in [
        vec![
            "encode",
            "--M",
            "7",
            "--m",
            "3",
            "--nonzero",
            "0",
            "--index",
            "0",
        ],
        vec![
            "encode",
            "--M",
            "9",
            "--m",
            "3",
            "--nonzero",
            "0",
            "--index",
            "8",
        ],
        vec![
            "encode",
            "--M",
            "9",
            "--m",
            "3",
            "--nonzero",
            "xyz",
            "--index",
            "0",
        ],
        vec!["unrank", "--M", "9", "--m", "3", "--rank", "4"],
        vec!["enumerate", "--M", "4", "--m", "3"],
        vec![
            "bler",
            "--M",
            "16",
            "--m",
            "3",
            "--ebn0",
            "0",
            "--profile",
            "{bad",
        ],
        vec!["frobnicate"],
    ] {
        let out = pcs(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
