use std::fs;
use std::process::Command;

fn vfv() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vfv"))
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = vfv()
        .args(["run", "--n", "16", "--t-end", "0.05", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("status = \"completed\""), "{stdout}");
    assert!(dir.path().join("series.csv").exists());
    assert!(dir.path().join("snapshots/snap_0000.vfv").exists());
    assert!(dir.path().join("snapshots/snap_0000.pgm").exists());
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "t_end = 0.06\noutput_dt = 0.02\nwindow = 1\n").unwrap();
    let out = vfv()
        .args([
            "hierarchy",
            "--meshes",
            "16,32",
            "--seed",
            "7",
            "--pressure-work-form",
            "as_printed",
            "--config",
        ])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let meta = fs::read_to_string(dir.path().join("metadata.toml")).unwrap();
    assert!(meta.contains("seed = 7"), "{meta}");
    assert!(meta.contains("as_printed"), "{meta}");

    let report = vfv().arg("report").arg("--out").arg(dir.path()).output().unwrap();
    assert!(report.status.success());
    assert!(String::from_utf8_lossy(&report.stdout).contains("defect series: 4 samples"));
}

#[test]
fn configuration_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "unknown_key = 1\n").unwrap();
    for args in [
        vec!["run", "--config", bad.to_str().unwrap()],
        vec!["hierarchy", "--meshes", "32,16"],
        vec!["run", "--n", "12"],
        vec!["run", "--pressure-work-form", "other"],
        vec!["nonsense"],
    ] {
        let status = vfv().args(&args).arg("--out").arg(dir.path()).status().unwrap();
        assert_eq!(status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn nothing_to_bump_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("u.toml");
    fs::write(
        &cfg,
        "problem = \"uniform\"\nmeshes = [16, 32]\nt_end = 0.04\ntau = 0.0\n",
    )
    .unwrap();
    let out = vfv()
        .arg("concat")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn help_lists_paper_scale_and_tau_is_validated() {
    let out = vfv().args(["hierarchy", "--paper-scale", "--tau=-1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let help = vfv().args(["hierarchy", "--help"]).output().unwrap();
    assert!(help.status.success());
    assert!(String::from_utf8_lossy(&help.stdout).contains("--paper-scale"));
}
