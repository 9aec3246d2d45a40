//! The four subcommands: band structures, susceptibility scans, storage
//! protocol runs, and the SI group-velocity estimate.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crow_core::dynamics::{make_gaussian_pulse, run_storage_protocol, DynamicsError};
use crow_core::model::{assemble_mode_matrix, KGrid};
use crow_core::response::{susceptibility_scan_delta, susceptibility_scan_j, ResponseError};
use crow_core::spectra::{band_structure, group_velocity, polariton_branch};

use crate::config::{RunConfig, ScanVariable, Units};
use crate::CliError;

/// 17 significant digits, locale-independent.
fn fmt(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

/// Every run dumps its effective config next to the outputs so it can be
/// replayed with `--config`.
pub fn dump_config(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    write_out(out, "config.toml", &cfg.dump())
}

fn map_dynamics(e: DynamicsError) -> CliError {
    match e {
        DynamicsError::InvalidSchedule(_) | DynamicsError::InvalidPulse(_) => {
            CliError::Usage(e.to_string())
        }
        other => CliError::Numerical(other.to_string()),
    }
}

pub fn cmd_bands(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let grid_cfg = cfg.grid.unwrap_or_default();
    if grid_cfg.n_modes == 0 {
        return Err(CliError::Usage("empty k-range: [grid] n_modes = 0".into()));
    }
    let grid = KGrid::new(grid_cfg.n_modes, cfg.model.ell)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let bs = band_structure(&grid, &cfg.model).map_err(|e| CliError::Numerical(e.to_string()))?;

    let lo = grid_cfg.k_min.unwrap_or(f64::NEG_INFINITY);
    let hi = grid_cfg.k_max.unwrap_or(f64::INFINITY);
    let mut csv = String::from(
        "k,lambda_1,lambda_2,lambda_3,d1_1,d2_1,d3_1,d1_2,d2_2,d3_2,d1_3,d2_3,d3_3\n",
    );
    let mut rows = 0;
    for (j, &k) in bs.ks.iter().enumerate() {
        if k < lo || k > hi {
            continue;
        }
        let mut line = fmt(k);
        for i in 0..3 {
            write!(line, ",{}", fmt(bs.lambdas[j][i])).unwrap();
        }
        for i in 0..3 {
            for c in 0..3 {
                write!(line, ",{}", fmt(bs.compositions[j][i][c])).unwrap();
            }
        }
        line.push('\n');
        csv.push_str(&line);
        rows += 1;
    }
    if rows == 0 {
        return Err(CliError::Usage(
            "empty k-range: no grid point falls inside [k_min, k_max]".into(),
        ));
    }
    write_out(out, "bands.csv", &csv)
}

pub fn cmd_susceptibility(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let scan = cfg
        .scan
        .ok_or_else(|| CliError::Usage("susceptibility needs a [scan] section".into()))?;
    let points = match scan.variable {
        ScanVariable::Delta => {
            susceptibility_scan_delta(scan.k, &cfg.model, (scan.min, scan.max), scan.points)
        }
        ScanVariable::J => {
            susceptibility_scan_j(scan.k, &cfg.model, (scan.min, scan.max), scan.points)
        }
    }
    .map_err(|e| match e {
        ResponseError::TooFewPoints { .. } => CliError::Usage(e.to_string()),
        other => CliError::Numerical(other.to_string()),
    })?;

    let mut csv = String::from("scan_var,chi_r,chi_i\n");
    for sp in &points {
        match sp.point {
            Some(pt) => {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    fmt(sp.scan_value),
                    fmt(pt.chi_r),
                    fmt(pt.chi_i)
                ));
            }
            None => {
                csv.push_str(&format!("{},nan,nan\n", fmt(sp.scan_value)));
            }
        }
    }
    write_out(out, "susceptibility.csv", &csv)
}

#[derive(Serialize)]
struct StoreReportJson {
    hold_max_photon_fraction: f64,
    peak_retrieval_photon_fraction: f64,
    retrieval_fidelity: f64,
    adiabaticity_margin: f64,
    group_velocity_estimate: Option<f64>,
    final_norm_sq: f64,
}

pub fn cmd_store(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let store = cfg
        .store
        .ok_or_else(|| CliError::Usage("store needs a [store] section".into()))?;
    let schedule = cfg
        .schedule
        .ok_or_else(|| CliError::Usage("store needs a [schedule] section".into()))?;
    let grid_cfg = cfg.grid.unwrap_or_default();
    let grid = KGrid::new(grid_cfg.n_modes, cfg.model.ell)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let pulse = make_gaussian_pulse(
        &grid,
        store.center_k,
        store.width_k,
        store.branch,
        &cfg.model,
    )
    .map_err(map_dynamics)?;
    let report = run_storage_protocol(&pulse, &cfg.model, &schedule, store.sample_dt)
        .map_err(map_dynamics)?;

    let mut csv = String::from("t,photon_fraction,A_fraction,C_fraction,pulse_center\n");
    for s in &report.samples {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt(s.time),
            fmt(s.photon_fraction),
            fmt(s.a_fraction),
            fmt(s.c_fraction),
            s.pulse_center.map(fmt).unwrap_or_else(|| "nan".into())
        ));
    }
    write_out(out, "store.csv", &csv)?;

    let json = StoreReportJson {
        hold_max_photon_fraction: report.hold_max_photon_fraction,
        peak_retrieval_photon_fraction: report.peak_retrieval_photon_fraction,
        retrieval_fidelity: report.retrieval_fidelity,
        adiabaticity_margin: report.adiabaticity_margin,
        group_velocity_estimate: report.group_velocity_estimate,
        final_norm_sq: report.final_state.total_norm_sq(),
    };
    let mut body = serde_json::to_string_pretty(&json).expect("report serialization");
    body.push('\n');
    write_out(out, "report.json", &body)
}

#[derive(Serialize)]
struct EstimateJson {
    g1_collective_per_s: f64,
    band_center_per_m: f64,
    branch_speeds_m_per_s: [f64; 3],
    middle_branch_speed_m_per_s: f64,
}

pub fn cmd_estimate(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    if cfg.units != Units::Si {
        return Err(CliError::Usage(
            "estimate needs SI parameters: set `units = \"si\"` in the config".into(),
        ));
    }
    let p = &cfg.model;
    let k0 = p.band_center();
    let m = assemble_mode_matrix(k0, p);
    let mut speeds = [0.0f64; 3];
    for which in 1..=3u8 {
        let branch = polariton_branch(&m, which, k0, p)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        speeds[(which - 1) as usize] = group_velocity(&branch, p).abs();
    }
    println!("G1 = {:.4e} s^-1 (g1 = {:.4e}, N_A = {})", p.g1_collective(), p.g1, p.n_atoms);
    println!("band center k0 = {:.6e} m^-1", k0);
    for (i, v) in speeds.iter().enumerate() {
        println!("branch {} group speed at k0: {:.4} m/s", i + 1, v);
    }
    let json = EstimateJson {
        g1_collective_per_s: p.g1_collective(),
        band_center_per_m: k0,
        branch_speeds_m_per_s: speeds,
        middle_branch_speed_m_per_s: speeds[1],
    };
    let mut body = serde_json::to_string_pretty(&json).expect("estimate serialization");
    body.push('\n');
    write_out(out, "estimate.json", &body)
}
