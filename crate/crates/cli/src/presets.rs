//! Baked-in parameter sets reproducing the published figures and the
//! realistic device estimate.

use std::f64::consts::PI;

use crow_core::dynamics::{RampControl, RampSchedule};
use crow_core::model::ModelParams;

use crate::config::{GridConfig, RunConfig, ScanConfig, ScanVariable, StoreConfig, Units};

fn natural(model: ModelParams) -> RunConfig {
    RunConfig {
        units: Units::Natural,
        model,
        grid: None,
        scan: None,
        store: None,
        schedule: None,
    }
}

/// Band-structure panels: `J = -1`, `delta1 = 0`, plotted over `[0, pi/ell]`.
fn bands_preset(g1: f64, g2: f64, delta2: f64) -> RunConfig {
    let mut cfg = natural(ModelParams {
        g1,
        g2,
        delta2,
        ..ModelParams::natural_base()
    });
    cfg.grid = Some(GridConfig {
        n_modes: 512,
        k_min: Some(0.0),
        k_max: Some(PI),
    });
    cfg
}

/// Detuning scans at fixed `delta2`; `delta = delta2 - delta1` is swept by
/// varying `delta1`. `J = 0.2` and rates in units of `gamma_A = 1`.
fn fig5_preset(g2: f64, delta2: f64) -> RunConfig {
    let mut cfg = natural(ModelParams {
        omega0: 20.0,
        j_hop: 0.2,
        g2,
        delta2,
        gamma_a: 1.0,
        gamma_c: 1e-3,
        ..ModelParams::natural_base()
    });
    cfg.scan = Some(ScanConfig {
        variable: ScanVariable::Delta,
        k: PI / 4.0,
        min: -4.0,
        max: 4.0,
        points: 801,
    });
    cfg
}

/// Coupling scans at fixed detunings; `delta1` is pinned so that
/// `delta2 - delta1` equals the caption's `delta`.
fn fig6_preset(g2: f64, delta2: f64, delta: f64, k: f64) -> RunConfig {
    let mut cfg = natural(ModelParams {
        g2,
        delta2,
        delta1: delta2 - delta,
        gamma_a: 1.0,
        gamma_c: 1e-3,
        j_hop: 1.0, // overridden point-wise by the scan
        ..ModelParams::natural_base()
    });
    cfg.scan = Some(ScanConfig {
        variable: ScanVariable::J,
        k,
        min: -3.0,
        max: 3.0,
        points: 601,
    });
    cfg
}

fn store_preset(t_ramp: f64) -> RunConfig {
    let mut cfg = natural(ModelParams {
        g2: 10.0,
        ..ModelParams::natural_base()
    });
    cfg.grid = Some(GridConfig {
        n_modes: 64,
        k_min: None,
        k_max: None,
    });
    cfg.store = Some(StoreConfig {
        center_k: PI / 2.0,
        width_k: 0.02,
        branch: Some(2),
        sample_dt: 5.0,
    });
    cfg.schedule = Some(RampSchedule {
        control: RampControl::ControlCoupling,
        start_value: 10.0,
        hold_value: 0.1,
        end_value: 10.0,
        t_ramp_down: t_ramp,
        t_hold: 20.0,
        t_ramp_up: t_ramp,
    });
    cfg
}

/// Realistic device parameters (SI): cavity spacing 15.69 um, hopping
/// 1.1e7 s^-1, probe coupling 2.5e9 s^-1 collectively enhanced by 10^4
/// atoms, control coupling 7.9e10 s^-1.
fn estimate_preset() -> RunConfig {
    RunConfig {
        units: Units::Si,
        model: ModelParams {
            omega0: 2.4e15,
            j_hop: -1.1e7,
            ell: 15.69e-6,
            g1: 2.5e9,
            n_atoms: 10_000,
            g2: 7.9e10,
            delta1: 0.0,
            delta2: 0.0,
            gamma: 0.0,
            gamma_a: 0.0,
            gamma_c: 0.0,
        },
        grid: None,
        scan: None,
        store: None,
        schedule: None,
    }
}

pub fn lookup(name: &str) -> Option<RunConfig> {
    let cfg = match name {
        "fig3a" => bands_preset(0.1, 1.0, 3.0),
        "fig3b" => bands_preset(0.1, 1.0, -3.0),
        "fig3c" => bands_preset(0.1, 3.0, 0.0),
        "fig3d" => bands_preset(1.0, 0.1, 0.0),
        // composition panels share two parameter sets: (a)(c)(e) strong
        // probe coupling, (b)(d)(f) strong control coupling
        "fig4a" | "fig4c" | "fig4e" => bands_preset(1.0, 0.1, 0.0),
        "fig4b" | "fig4d" | "fig4f" => bands_preset(0.1, 3.0, 0.0),
        "fig5a" => fig5_preset(0.5, 0.0),
        "fig5b" => fig5_preset(2.0, 0.0),
        "fig5c" => fig5_preset(0.5, 1.0),
        "fig5d" => fig5_preset(0.5, -1.0),
        "fig5e" => fig5_preset(0.5, 2.0),
        "fig5f" => fig5_preset(0.5, -2.0),
        "fig6a" => fig6_preset(0.5, 0.0, 1.0, PI / 4.0),
        "fig6b" => fig6_preset(2.0, 0.0, -1.0, PI / 4.0),
        "fig6c" => fig6_preset(0.5, 1.0, 1.0, PI / 4.0),
        "fig6d" => fig6_preset(0.5, -1.0, -1.0, PI / 4.0),
        "fig6e" => fig6_preset(0.5, 2.0, 1.0, PI / 4.0),
        "fig6f" => fig6_preset(0.5, 0.0, 1.0, PI / 2.0),
        "adiabatic" => store_preset(200.0),
        "sudden" => store_preset(0.0),
        "paper" => estimate_preset(),
        _ => return None,
    };
    Some(cfg)
}

pub fn names() -> Vec<&'static str> {
    vec![
        "fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b", "fig4c", "fig4d", "fig4e",
        "fig4f", "fig5a", "fig5b", "fig5c", "fig5d", "fig5e", "fig5f", "fig6a", "fig6b",
        "fig6c", "fig6d", "fig6e", "fig6f", "adiabatic", "sudden", "paper",
    ]
}
