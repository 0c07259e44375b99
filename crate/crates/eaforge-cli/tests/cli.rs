//! End-to-end tests of the `eaforge` binary: formats, exit codes, and
//! output stability.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn eaforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eaforge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_temp(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn banff_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/banff.txt")
}

#[test]
fn spectra_reports_kim_statistics() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(dir.path(), "kim.txt", "U 6 5B 1:3,1:10,a^1:24\n");
    let out = eaforge(&["spectra", file.to_str().unwrap()]);
    assert!(out.status.success());
    let line = String::from_utf8(out.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(v["degree"], 2);
    assert_eq!(v["apn"], true);
    assert_eq!(v["permutation"], false);
    assert_eq!(v["linearity"], 16);
}

#[test]
fn ranktable_of_kim() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(dir.path(), "kim.txt", "U 6 5B 1:3,1:10,a^1:24\n");
    let out = eaforge(&["ranktable", file.to_str().unwrap()]);
    let line = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        line.trim(),
        r#"{"index":0,"rank_distribution":{"0":1,"5":63}}"#
    );
}

#[test]
fn spaces_on_kim_matches_published_counts() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(dir.path(), "kim.txt", "U 6 5B 1:3,1:10,a^1:24\n");
    let out = eaforge(&["spaces", file.to_str().unwrap()]);
    let line = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        line.trim(),
        r#"{"index":0,"count":222,"thickness":{"0":1,"1":63,"2":126,"3":32}}"#
    );
}

#[test]
fn partition_banff_by_ortho_diff_gives_13_buckets() {
    let out = eaforge(&[
        "partition",
        banff_path().to_str().unwrap(),
        "--use",
        "ortho_diff",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 13);
    let mut members = Vec::new();
    for line in &lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let bucket: Vec<u64> = v["members"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_u64().unwrap())
            .collect();
        assert_eq!(bucket.len(), 1);
        members.extend(bucket);
    }
    members.sort_unstable();
    assert_eq!(members, (0..13).collect::<Vec<u64>>());
}

#[test]
fn ea_recover_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cube = write_temp(dir.path(), "cube.txt", "U 6 5B 1:3\n");
    let kim = write_temp(dir.path(), "kim.txt", "U 6 5B 1:3,1:10,a^1:24\n");
    // Same function: a tuple exists, exit 0, and the output carries the
    // tuple as hex rows.
    let out = eaforge(&[
        "ea-recover",
        cube.to_str().unwrap(),
        cube.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stdout).unwrap().trim()).unwrap();
    assert_eq!(v["verdict"], "EQUIVALENT");
    assert_eq!(v["a0"].as_array().unwrap().len(), 6);
    // Kim and the cube are both APN but in distinct CCZ-classes; their
    // rank distributions agree, so the negative verdict needs the full
    // exhaust: exit 3.
    let out = eaforge(&[
        "ea-recover",
        cube.to_str().unwrap(),
        kim.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    // Different rank distributions: exit 2.
    let quad = write_temp(
        dir.path(),
        "g.txt",
        "U 6 5B 1:3,a^11:6,a^1:9\n", // Banff 2, APN
    );
    let affine_ish = write_temp(dir.path(), "h.txt", "U 6 5B 1:5\n"); // x^5, not APN
    let out = eaforge(&[
        "ea-recover",
        quad.to_str().unwrap(),
        affine_ish.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("NOT EQUIVALENT"));
    // The --seedless compatibility flag is accepted.
    let out = eaforge(&[
        "ea-recover",
        cube.to_str().unwrap(),
        cube.to_str().unwrap(),
        "--seedless",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn usage_and_data_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_temp(dir.path(), "bad.txt", "T 2 1 0 0\n");
    let out = eaforge(&["spectra", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 1"));

    let missing = dir.path().join("missing.txt");
    let out = eaforge(&["spectra", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let id = write_temp(dir.path(), "id.txt", "T 2 2 0 1 2 3\n");
    let out = eaforge(&["ortho", id.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let out = eaforge(&["partition", id.to_str().unwrap(), "--use", "nonsense"]);
    assert_eq!(out.status.code(), Some(1));

    let out = eaforge(&["sigma", id.to_str().unwrap(), "--k", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gen_quadratic_round_trips_and_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = eaforge(&[
        "gen-quadratic", "--n", "6", "--m", "6", "--count", "5", "--seed", "9",
    ]);
    let out2 = eaforge(&[
        "gen-quadratic", "--n", "6", "--m", "6", "--count", "5", "--seed", "9",
    ]);
    assert_eq!(out1.stdout, out2.stdout);
    let text = String::from_utf8(out1.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    // Re-parse and confirm the tables survive a round trip.
    let file = write_temp(dir.path(), "gen.txt", &text);
    let parsed = eaforge_cli::format::parse_function_file(&file).unwrap();
    assert_eq!(parsed.entries.len(), 5);
    for (entry, line) in parsed.entries.iter().zip(text.lines()) {
        assert_eq!(eaforge_cli::format::t_record(&entry.vbf), line);
        assert!(entry.vbf.degree() <= 2);
    }
    // APN-only generation produces APN functions.
    let out = eaforge(&[
        "gen-quadratic", "--n", "5", "--m", "5", "--count", "2", "--seed", "3",
        "--apn-only",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let file = write_temp(dir.path(), "apn.txt", &text);
    for entry in eaforge_cli::format::parse_function_file(&file).unwrap().entries {
        assert!(entry.vbf.is_apn().unwrap());
    }
}

#[test]
fn output_is_stable_under_jobs_variation() {
    let banff = banff_path();
    let with_one = eaforge(&["--jobs", "1", "ortho", banff.to_str().unwrap()]);
    let with_four = eaforge(&["--jobs", "4", "ortho", banff.to_str().unwrap()]);
    assert!(with_one.status.success());
    assert_eq!(with_one.stdout, with_four.stdout);
    // The environment fallback behaves like the flag.
    let with_env = Command::new(env!("CARGO_BIN_EXE_eaforge"))
        .env("EAFORGE_JOBS", "2")
        .args(["ortho", banff.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(with_env.stdout, with_one.stdout);
}

#[test]
fn sigma_and_gamma_delta_commands() {
    let dir = tempfile::tempdir().unwrap();
    let cube = write_temp(dir.path(), "cube.txt", "U 6 5B 1:3\n");
    let out = eaforge(&["gamma-delta", cube.to_str().unwrap()]);
    let line = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        line.trim(),
        r#"{"index":0,"gamma_rank":1102,"delta_rank":94}"#
    );
    let out = eaforge(&["sigma", cube.to_str().unwrap(), "--k", "4"]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stdout).unwrap().trim()).unwrap();
    assert_eq!(v["k"], 4);
    assert!(v["multiplicities"].is_object());
}

#[test]
fn ccz_expand_reports_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let cube = write_temp(dir.path(), "cube.txt", "U 6 5B 1:3\n");
    let out = eaforge(&["ccz-expand", cube.to_str().unwrap()]);
    let v: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stdout).unwrap().trim()).unwrap();
    assert_eq!(v["lower"], 3);
    assert_eq!(v["upper"], 190);
    let classes = v["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 3);
    let total: u64 = classes.iter().map(|c| c["count"].as_u64().unwrap()).sum();
    assert_eq!(total, 190);
}
