//! Steady-state linear response of the doped waveguide: the complex
//! susceptibility per k-mode and the EIT transparency window it opens.
//!
//! The implementation path is the complex steady-state ratio `<A_k>/<a_k>`;
//! the explicit real/imaginary split lives in [`formulas`] and serves as a
//! cross-check (the published real part carries a `delta1` where the
//! derivation gives `delta2`; both variants are kept for comparison).

use num_complex::Complex64;
use thiserror::Error;

use crate::model::{dispersion, ModelParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResponseError {
    #[error("steady state singular at k = {k}: undamped double resonance")]
    SingularSteadyState { k: f64 },
    #[error("scan needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("no transparency window: absorption has no interior minimum")]
    NoWindowFound,
}

/// Susceptibility at one wavevector and detuning configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SusceptibilityPoint {
    pub k: f64,
    /// Two-photon detuning difference `delta2 - delta1`.
    pub delta: f64,
    pub chi_r: f64,
    pub chi_i: f64,
}

/// One sample of a parameter scan; `point` is `None` where the steady state
/// is singular (a flagged gap, not a scan failure).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub scan_value: f64,
    pub point: Option<SusceptibilityPoint>,
}

/// A dip in the absorption spectrum between two flanking maxima.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransparencyWindow {
    /// Scan value at the interior absorption minimum.
    pub center: f64,
    /// Full width at half the mean of the two flanking maxima.
    pub width: f64,
    /// Residual absorption at the center.
    pub residual: f64,
}

/// Steady-state ratio `<A_k>/<a_k>` with the photon amplitude held as the
/// drive:
///
/// `i G1 (i eps_k - gamma_C) / ((i (eps_k - delta2) - gamma_A)(i eps_k - gamma_C) + g2^2)`.
pub fn steady_state_ratio(k: f64, p: &ModelParams) -> Result<Complex64, ResponseError> {
    let eps = dispersion(k, p);
    // omega_k + delta = eps_k and omega_k - delta1 = eps_k - delta2
    let omega_k = 2.0 * p.j_hop * (k * p.ell).cos();
    debug_assert!((omega_k + p.delta() - eps).abs() <= 1e-12 * (1.0 + eps.abs()));
    debug_assert!((omega_k - p.delta1 - (eps - p.delta2)).abs() <= 1e-12 * (1.0 + eps.abs()));
    let big_g1 = p.g1_collective();
    let c_term = Complex64::new(-p.gamma_c, eps);
    let a_term = Complex64::new(-p.gamma_a, eps - p.delta2);
    let denom = a_term * c_term + p.g2 * p.g2;
    if denom.norm() <= 1e-300 {
        return Err(ResponseError::SingularSteadyState { k });
    }
    Ok(Complex64::new(0.0, big_g1) * c_term / denom)
}

/// Complex susceptibility `chi = -(2 G1 / omega0) <A_k>/<a_k>` split into
/// real (dispersion) and imaginary (absorption) parts.
pub fn susceptibility(k: f64, p: &ModelParams) -> Result<SusceptibilityPoint, ResponseError> {
    let chi = steady_state_ratio(k, p)? * (-2.0 * p.g1_collective() / p.omega0);
    Ok(SusceptibilityPoint {
        k,
        delta: p.delta(),
        chi_r: chi.re,
        chi_i: chi.im,
    })
}

/// Explicit real/imaginary susceptibility formulas, kept as oracles for the
/// complex steady-state route.
pub mod formulas {
    use crate::model::{dispersion, ModelParams};

    /// `L(k)^-1 = [gA gC + g2^2 - eps (eps - d2)]^2 + [eps gA + (eps - d2) gC]^2`.
    fn lorentzian(eps: f64, p: &ModelParams) -> f64 {
        let x = p.gamma_a * p.gamma_c + p.g2 * p.g2 - eps * (eps - p.delta2);
        let y = eps * p.gamma_a + (eps - p.delta2) * p.gamma_c;
        1.0 / (x * x + y * y)
    }

    fn prefactor(p: &ModelParams) -> f64 {
        let big_g1 = p.g1_collective();
        2.0 * big_g1 * big_g1 / p.omega0
    }

    /// Absorption: `F [eps^2 gA + (gA gC + g2^2) gC] L(k)`; every term is
    /// nonnegative for nonnegative rates.
    pub fn chi_imag(k: f64, p: &ModelParams) -> f64 {
        let eps = dispersion(k, p);
        prefactor(p)
            * (eps * eps * p.gamma_a + (p.gamma_a * p.gamma_c + p.g2 * p.g2) * p.gamma_c)
            * lorentzian(eps, p)
    }

    /// Dispersion, derivation-consistent form:
    /// `F [eps g2^2 - (eps - delta2)(gC^2 + eps^2)] L(k)`.
    pub fn chi_real(k: f64, p: &ModelParams) -> f64 {
        let eps = dispersion(k, p);
        prefactor(p)
            * (eps * p.g2 * p.g2 - (eps - p.delta2) * (p.gamma_c * p.gamma_c + eps * eps))
            * lorentzian(eps, p)
    }

    /// Dispersion as published, with `(eps - delta1)` in place of
    /// `(eps - delta2)`. Disagrees with the steady state whenever
    /// `delta1 != delta2`; retained for documentation of the discrepancy.
    pub fn chi_real_published(k: f64, p: &ModelParams) -> f64 {
        let eps = dispersion(k, p);
        prefactor(p)
            * (eps * p.g2 * p.g2 - (eps - p.delta1) * (p.gamma_c * p.gamma_c + eps * eps))
            * lorentzian(eps, p)
    }
}

/// Scan the susceptibility at fixed `k` over the detuning difference
/// `delta = delta2 - delta1`, varying `delta1` at fixed `delta2`.
pub fn susceptibility_scan_delta(
    k: f64,
    p: &ModelParams,
    delta_range: (f64, f64),
    n_points: usize,
) -> Result<Vec<ScanPoint>, ResponseError> {
    if n_points < 2 {
        return Err(ResponseError::TooFewPoints {
            needed: 2,
            got: n_points,
        });
    }
    let (lo, hi) = delta_range;
    let step = (hi - lo) / (n_points - 1) as f64;
    Ok((0..n_points)
        .map(|i| {
            let delta = lo + step * i as f64;
            let scanned = ModelParams {
                delta1: p.delta2 - delta,
                ..*p
            };
            ScanPoint {
                scan_value: delta,
                point: susceptibility(k, &scanned).ok(),
            }
        })
        .collect())
}

/// Scan the susceptibility at fixed `k` and detunings over the hopping `J`.
pub fn susceptibility_scan_j(
    k: f64,
    p: &ModelParams,
    j_range: (f64, f64),
    n_points: usize,
) -> Result<Vec<ScanPoint>, ResponseError> {
    if n_points < 2 {
        return Err(ResponseError::TooFewPoints {
            needed: 2,
            got: n_points,
        });
    }
    let (lo, hi) = j_range;
    let step = (hi - lo) / (n_points - 1) as f64;
    Ok((0..n_points)
        .map(|i| {
            let j = lo + step * i as f64;
            let scanned = ModelParams { j_hop: j, ..*p };
            ScanPoint {
                scan_value: j,
                point: susceptibility(k, &scanned).ok(),
            }
        })
        .collect())
}

/// Locate the transparency dip in an absorption scan.
///
/// The center is the deepest interior local minimum of `chi_i`; the width is
/// measured where the absorption crosses half the mean of the two flanking
/// maxima, with linear interpolation between samples.
pub fn find_transparency_window(scan: &[ScanPoint]) -> Result<TransparencyWindow, ResponseError> {
    let samples: Vec<(f64, f64)> = scan
        .iter()
        .filter_map(|s| s.point.map(|pt| (s.scan_value, pt.chi_i)))
        .collect();
    if samples.len() < 5 {
        return Err(ResponseError::TooFewPoints {
            needed: 5,
            got: samples.len(),
        });
    }
    let mut center_idx: Option<usize> = None;
    for i in 1..samples.len() - 1 {
        let (_, y) = samples[i];
        if y <= samples[i - 1].1 && y <= samples[i + 1].1 && (y < samples[i - 1].1 || y < samples[i + 1].1)
        {
            match center_idx {
                Some(j) if samples[j].1 <= y => {}
                _ => center_idx = Some(i),
            }
        }
    }
    let center_idx = center_idx.ok_or(ResponseError::NoWindowFound)?;
    let left_max = samples[..center_idx]
        .iter()
        .map(|&(_, y)| y)
        .fold(f64::NEG_INFINITY, f64::max);
    let right_max = samples[center_idx + 1..]
        .iter()
        .map(|&(_, y)| y)
        .fold(f64::NEG_INFINITY, f64::max);
    let residual = samples[center_idx].1;
    let level = 0.5 * (left_max + right_max) / 2.0;
    if level <= residual {
        return Err(ResponseError::NoWindowFound);
    }
    // walk outward from the center to the half-level crossings
    let cross = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
        let mut prev = center_idx;
        for i in range {
            if samples[i].1 >= level {
                let (x0, y0) = samples[prev];
                let (x1, y1) = samples[i];
                let t = if (y1 - y0).abs() > 0.0 {
                    (level - y0) / (y1 - y0)
                } else {
                    0.0
                };
                return Some(x0 + t * (x1 - x0));
            }
            prev = i;
        }
        None
    };
    let left = cross(&mut (0..center_idx).rev()).ok_or(ResponseError::NoWindowFound)?;
    let right = cross(&mut (center_idx + 1..samples.len())).ok_or(ResponseError::NoWindowFound)?;
    Ok(TransparencyWindow {
        center: samples[center_idx].0,
        width: right - left,
        residual,
    })
}
