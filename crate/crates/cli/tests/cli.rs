//! End-to-end runs of the `ivhs` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ivhs(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ivhs"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn bounds_report_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = ivhs(&["bounds", "--m", "2", "--d", "5"], dir.path());
    assert_eq!(code(&o), 0);
    let rep = read_json(&dir.path().join("bounds.json"));
    assert_eq!(
        (rep["a"].as_u64(), rep["b"].as_u64(), rep["r"].as_u64()),
        (Some(4), Some(44), Some(40))
    );
    assert_eq!(
        (rep["smax0"].as_i64(), rep["smax_check"].as_i64()),
        (Some(1), Some(2))
    );
    let man = read_json(&dir.path().join("manifest.json"));
    assert_eq!(man["command"], "bounds");
    assert_eq!(man["exit_code"], 0);
    assert_eq!(man["artifacts"][0]["file"], "bounds.json");
    assert_eq!(man["artifacts"][0]["sha256"].as_str().unwrap().len(), 64);

    let dir = tempfile::tempdir().unwrap();
    let o = ivhs(
        &["bounds", "--m", "4", "--d", "3", "--format", "csv"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("bounds.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("4,3,1,20,20,"));
}

#[test]
fn invalid_parameters_exit_one_with_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = ivhs(&["bounds", "--m", "2", "--d", "3"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("hypothesis"));
    let man = read_json(&dir.path().join("manifest.json"));
    assert_eq!(man["exit_code"], 1);
    assert!(man["error"].as_str().unwrap().contains("hypothesis"));
}

#[test]
fn matrix_and_ideal_exports() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&ivhs(
            &["matrix", "--m", "2", "--d", "5", "--kind", "M"],
            dir.path()
        )),
        0
    );
    let mat = read_json(&dir.path().join("matrix.json"));
    assert_eq!(mat["rows"].as_array().unwrap().len(), 4);
    assert_eq!(mat["cols"].as_array().unwrap().len(), 40);

    let dir = tempfile::tempdir().unwrap();
    let o = ivhs(
        &["matrix", "--m", "2", "--d", "5", "--kind", "Mcheck"],
        dir.path(),
    );
    assert_eq!(code(&o), 1);

    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&ivhs(
            &[
                "ideal",
                "--m",
                "2",
                "--d",
                "4",
                "--s",
                "0",
                "--variant",
                "I0"
            ],
            dir.path()
        )),
        0
    );
    let text = fs::read_to_string(dir.path().join("ideal.txt")).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 19);
    let man = read_json(&dir.path().join("ideal.manifest.json"));
    assert_eq!(man["generator_count"], 19);
}

#[test]
fn identical_runs_give_identical_artifacts() {
    let runs: Vec<_> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            assert_eq!(
                code(&ivhs(
                    &[
                        "ideal",
                        "--m",
                        "2",
                        "--d",
                        "5",
                        "--s",
                        "1",
                        "--variant",
                        "I1"
                    ],
                    dir.path()
                )),
                0
            );
            assert_eq!(
                code(&ivhs(
                    &["probe", "--m", "2", "--d", "5", "--trials", "200", "--seed", "3"],
                    &dir.path().join("p")
                )),
                0
            );
            dir
        })
        .collect();
    for file in ["ideal.txt", "ideal.manifest.json", "p/probe.json"] {
        let a = fs::read(runs[0].path().join(file)).unwrap();
        let b = fs::read(runs[1].path().join(file)).unwrap();
        assert!(a == b, "{file} differs between runs");
    }
    let hashes = |dir: &Path| read_json(&dir.join("manifest.json"))["artifacts"].clone();
    assert_eq!(hashes(runs[0].path()), hashes(runs[1].path()));
}

#[test]
fn certificate_round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&ivhs(
            &["certify-smax0", "--m", "2", "--d", "5"],
            dir.path()
        )),
        0
    );
    let cert_path = dir.path().join("certificate.json");
    let log = fs::read_to_string(dir.path().join("verification.log")).unwrap();
    assert!(log.trim_end().ends_with("verified: s_max0 >= 1"));

    let check = dir.path().join("check");
    let cert_arg = cert_path.to_str().unwrap();
    assert_eq!(
        code(&ivhs(
            &[
                "verify-certificate",
                "--m",
                "2",
                "--d",
                "5",
                "--input",
                cert_arg
            ],
            &check
        )),
        0
    );

    let mut cert = read_json(&cert_path);
    let rows = cert["steps"][5]["rows"].as_array_mut().unwrap();
    rows.swap(0, 1);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, serde_json::to_string(&cert).unwrap()).unwrap();
    let o = ivhs(
        &[
            "verify-certificate",
            "--m",
            "2",
            "--d",
            "5",
            "--input",
            bad.to_str().unwrap(),
        ],
        &check,
    );
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Diagonal"));

    // header mismatch is an error, not a verdict
    assert_eq!(
        code(&ivhs(
            &[
                "verify-certificate",
                "--m",
                "2",
                "--d",
                "6",
                "--input",
                cert_arg
            ],
            &check
        )),
        1
    );
}

#[test]
fn witness_round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let o = ivhs(&["witness", "--m", "2", "--d", "5"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("witness rank 2"));
    let path = dir.path().join("witness.json");
    let check = dir.path().join("check");
    assert_eq!(
        code(&ivhs(
            &[
                "verify-witness",
                "--m",
                "2",
                "--d",
                "5",
                "--input",
                path.to_str().unwrap()
            ],
            &check
        )),
        0
    );

    let mut w = read_json(&path);
    w["rank"] = Value::from(3);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, serde_json::to_string(&w).unwrap()).unwrap();
    assert_eq!(
        code(&ivhs(
            &[
                "verify-witness",
                "--m",
                "2",
                "--d",
                "5",
                "--input",
                bad.to_str().unwrap()
            ],
            &check
        )),
        1
    );
}

#[test]
fn searches_use_the_exit_code_contract() {
    let dir = tempfile::tempdir().unwrap();
    let o = ivhs(
        &["search-smax1", "--m", "2", "--d", "4", "--time-cap", "60"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("lower 0"));
    assert!(out.contains("vanishes identically"));

    let dir = tempfile::tempdir().unwrap();
    let o = ivhs(&["search-smax1", "--m", "2", "--d", "5"], dir.path());
    assert_eq!(code(&o), 2);
    let rep = read_json(&dir.path().join("search.json"));
    assert_eq!(rep["certified_lower"], 1);
    assert_eq!(rep["certified_upper"], 2);

    let dir = tempfile::tempdir().unwrap();
    let o = ivhs(
        &["groebner", "--m", "2", "--d", "4", "--s", "0"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    assert_eq!(
        read_json(&dir.path().join("verdict.json"))["verdict"]["verdict"],
        "zero_at_origin_only"
    );
}

#[test]
fn probe_pins_the_generic_rank() {
    let dir = tempfile::tempdir().unwrap();
    let o = ivhs(
        &[
            "probe",
            "--m",
            "2",
            "--d",
            "5",
            "--trials",
            "1000",
            "--seed",
            "7",
            "--threads",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    assert_eq!(read_json(&dir.path().join("probe.json"))["max_rank"], 4);
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&ivhs(
            &["probe", "--m", "2", "--d", "5", "--field-prime", "7"],
            dir.path()
        )),
        1
    );
}
