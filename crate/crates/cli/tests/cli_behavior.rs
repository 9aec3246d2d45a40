//! Black-box tests of the `crow` binary: exit codes, error paths, and the
//! config round-trip guarantee.

use std::path::Path;
use std::process::{Command, Output};

fn crow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn missing_config_and_preset_is_a_usage_error() {
    let out = crow(&["bands"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--config or --preset"));
}

#[test]
fn both_config_and_preset_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "units = \"natural\"\n").unwrap();
    let out = crow(&["bands", "--config", cfg.to_str().unwrap(), "--preset", "fig3a"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn unknown_preset_is_a_usage_error() {
    let out = crow(&["bands", "--preset", "fig9z"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown preset"));
}

#[test]
fn malformed_config_reports_the_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "units = \"natural\"\n[model]\nomega0 = \"not a number\"\n").unwrap();
    let out = crow(&["bands", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.toml"));
}

fn natural_model_block() -> &'static str {
    "units = \"natural\"\n\n[model]\nomega0 = 100.0\nj_hop = -1.0\nell = 1.0\ng1 = 1.0\n\
     n_atoms = 1\ng2 = 1.0\ndelta1 = 0.0\ndelta2 = 0.0\ngamma = 0.0\ngamma_a = 0.0\n\
     gamma_c = 0.0\n"
}

#[test]
fn inverted_scan_range_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.toml");
    let text = format!(
        "{}\n[scan]\nvariable = \"delta\"\nk = 0.785\nmin = 2.0\nmax = -2.0\npoints = 100\n",
        natural_model_block()
    );
    std::fs::write(&cfg, text).unwrap();
    let out = crow(&["susceptibility", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds"));
}

#[test]
fn empty_k_range_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.toml");
    let text = format!(
        "{}\n[grid]\nn_modes = 16\nk_min = 3.13\nk_max = 3.14\n",
        natural_model_block()
    );
    std::fs::write(&cfg, text).unwrap();
    let out = crow(&[
        "bands",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty k-range"));
}

#[test]
fn store_without_schedule_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("store.toml");
    let text = format!(
        "{}\n[store]\ncenter_k = 1.57\nwidth_k = 0.02\nbranch = 2\nsample_dt = 5.0\n",
        natural_model_block()
    );
    std::fs::write(&cfg, text).unwrap();
    let out = crow(&["store", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("[schedule]"));
}

#[test]
fn estimate_under_natural_units_is_a_usage_error() {
    let out = crow(&["estimate", "--preset", "fig3a"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("units = \"si\""));
}

#[test]
fn integration_breakdown_is_a_numerical_error() {
    // a ramp so long that the fixed step underflows the allowed budget
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("long.toml");
    let text = format!(
        "{}\n[grid]\nn_modes = 4\n\n[store]\ncenter_k = 1.57\nwidth_k = 0.1\nsample_dt = 1e9\n\n\
         [schedule]\ncontrol = \"control_coupling\"\nstart_value = 10.0\nhold_value = 0.1\n\
         end_value = 10.0\nt_ramp_down = 1e12\nt_hold = 0.0\nt_ramp_up = 0.0\n",
        natural_model_block()
    );
    std::fs::write(&cfg, text).unwrap();
    let out = crow(&[
        "store",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2, "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn singular_scan_points_become_gaps_not_failures() {
    // lossless, undriven control: the steady state is singular exactly at
    // the two-photon resonance, which the scan reports as a nan row
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("gap.toml");
    let text = "units = \"natural\"\n\n[model]\nomega0 = 100.0\nj_hop = -1.0\nell = 1.0\n\
                g1 = 1.0\nn_atoms = 1\ng2 = 0.0\ndelta1 = 0.0\ndelta2 = 0.0\ngamma = 0.0\n\
                gamma_a = 0.0\ngamma_c = 0.0\n\n[scan]\nvariable = \"delta\"\nk = 0.0\n\
                min = 1.0\nmax = 3.0\npoints = 3\n";
    std::fs::write(&cfg, text).unwrap();
    let out_dir = dir.path().join("o");
    let out = crow(&[
        "susceptibility",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("susceptibility.csv")).unwrap();
    assert!(csv.lines().any(|l| l.ends_with("nan,nan")), "{csv}");
}

fn run_preset(cmd: &str, preset: &str, out_dir: &Path) {
    let out = crow(&[cmd, "--preset", preset, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn preset_configs_round_trip_to_identical_csv() {
    for (cmd, preset, file) in [
        ("bands", "fig3b", "bands.csv"),
        ("susceptibility", "fig5a", "susceptibility.csv"),
        ("susceptibility", "fig6a", "susceptibility.csv"),
    ] {
        let dir = tempfile::tempdir().unwrap();
        let first = dir.path().join("first");
        run_preset(cmd, preset, &first);
        let replay = dir.path().join("replay");
        let out = crow(&[
            cmd,
            "--config",
            first.join("config.toml").to_str().unwrap(),
            "--out",
            replay.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        let a = std::fs::read(first.join(file)).unwrap();
        let b = std::fs::read(replay.join(file)).unwrap();
        assert_eq!(a, b, "{preset}: replay output differs");
        // LF-only line endings
        assert!(!a.contains(&b'\r'));
    }
}

#[test]
fn outputs_use_lf_and_17_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    run_preset("bands", "fig3a", dir.path());
    let csv = std::fs::read_to_string(dir.path().join("bands.csv")).unwrap();
    assert!(!csv.contains('\r'));
    let first_value = csv.lines().nth(1).unwrap().split(',').nth(1).unwrap();
    let mantissa = first_value.split('e').next().unwrap();
    let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
    assert_eq!(digits, 17, "{first_value}");
}
