//! End-to-end checks of the command-line surface: table schemas, exit
//! codes, config handling, and the output-directory environment variable.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wignerlab"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wignerlab-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn identities_succeeds_with_exit_zero() {
    let dir = temp_dir("identities");
    let out = bin()
        .args(["identities", "--n", "40", "--seed", "7"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("all identities within tolerance"));
    let table = fs::read_to_string(dir.join("identities.csv")).unwrap();
    assert!(table.starts_with("# schema=1\n# config="));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn ks_table_headers_are_pinned() {
    let dir = temp_dir("ks");
    let out = bin()
        .args(["ks", "--n", "24,32,48", "--replicas", "3", "--seed", "1"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // Golden headers: any change here is a schema break.
    let ks = fs::read_to_string(dir.join("ks.csv")).unwrap();
    assert_eq!(ks.lines().nth(2).unwrap(), "n,median_ks,mean_ks,q90_ks,q99_ks");
    assert!(ks.lines().any(|l| l.starts_with("# fit slope=")));

    let summary = fs::read_to_string(dir.join("summary.csv")).unwrap();
    assert_eq!(
        summary.lines().nth(2).unwrap(),
        "n,metric,count,mean,q50,q90,q99,moment_p1,moment_p2,moment_p4"
    );

    let records = fs::read_to_string(dir.join("records.txt")).unwrap();
    assert!(records.starts_with("# schema=1 config="));
    assert_eq!(records.lines().count(), 1 + 9);

    let manifest = fs::read_to_string(dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("status=complete"));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn malformed_config_exits_two_naming_the_field() {
    let dir = temp_dir("badconfig");
    let path = dir.join("bad.toml");
    fs::write(&path, "replicas = 0\n").unwrap();
    let out = bin()
        .args(["ks"])
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("dist") || stderr.contains("missing field"), "{stderr}");
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn invalid_flag_values_exit_two() {
    let dir = temp_dir("badflags");
    let out = bin()
        .args(["ks", "--n", "64,32", "--replicas", "2"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_list"));

    let out = bin()
        .args(["sample", "--n", "16", "--dist", "cauchy"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn config_file_round_trips_through_flags() {
    let dir = temp_dir("config");
    let config_text = "\
dist = \"rademacher\"
n_list = [24]
replicas = 2
seed = 9
out_dir = \"\"
workers = 1

[grid]
u = [0.0]
a0 = 1.0
v_lo_mult = 4.0
v_max = 0.5
v_count = 4

[metrics]
ks = true
local_law = false
rigidity = false
deloc = false
keep_eigenvalues = false
";
    let path = dir.join("campaign.toml");
    fs::write(&path, config_text).unwrap();
    let out = bin()
        .args(["ks"])
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("n=24"));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn out_env_var_sets_default_directory() {
    let dir = temp_dir("env");
    let out = bin()
        .args(["sample", "--n", "16", "--seed", "3"])
        .env("WIGNERLAB_OUT", &dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("sample_n16.csv").exists());
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn plots_are_deterministic_byte_for_byte() {
    let dir_a = temp_dir("plot-a");
    let dir_b = temp_dir("plot-b");
    for dir in [&dir_a, &dir_b] {
        let out = bin()
            .args(["ks", "--n", "24,32,48", "--replicas", "3", "--seed", "1", "--plots"])
            .arg("--out")
            .arg(dir)
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let a = fs::read(dir_a.join("ks.svg")).unwrap();
    let b = fs::read(dir_b.join("ks.svg")).unwrap();
    assert_eq!(a, b);
    let _ = fs::remove_dir_all(&dir_a);
    let _ = fs::remove_dir_all(&dir_b);
}

#[test]
fn scaling_fits_a_table() {
    let dir = temp_dir("scaling");
    let input = dir.join("points.csv");
    fs::write(&input, "# comment\nx,y\n1,8\n2,1\n4,0.125\n").unwrap();
    let out = bin()
        .args(["scaling"])
        .arg("--input")
        .arg(&input)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("slope -3.0000"));
    let _ = fs::remove_dir_all(&dir);
}
