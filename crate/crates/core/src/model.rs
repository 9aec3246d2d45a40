//! Physical parameters, Brillouin-zone grid, and the per-mode coupling matrix.
//!
//! The waveguide is a ring of `N` identical single-mode cavities with
//! nearest-neighbor hopping `J`, each doped with `n_atoms` three-level atoms
//! in a Lambda configuration. In the rotating frame, every wavevector `k`
//! decouples into a 3x3 block acting on the (photon, A spin wave, C spin wave)
//! amplitudes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("inter-cavity spacing must be positive, got {0}")]
    NonPositiveSpacing(f64),
    #[error("atom number per cavity must be >= 1, got {0}")]
    AtomCount(u64),
    #[error("{name} must be nonnegative, got {value}")]
    NegativeRate { name: &'static str, value: f64 },
    #[error("k-grid needs at least 2 modes, got {0}")]
    GridTooSmall(usize),
}

/// All physical parameters of the doped waveguide, in one unit system.
///
/// Couplings, detunings and decay rates are angular frequencies; `ell` is a
/// length. The library itself is unit-agnostic: the presets use natural units
/// with `|J|` and `ell` of order one, while SI values work equally well (the
/// group-velocity estimate uses them directly).
///
/// `J` is stored signed; the resonant-waveguide convention has `J < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Cavity resonance frequency (sets the susceptibility scale only).
    pub omega0: f64,
    /// Nearest-neighbor hopping; may be negative.
    pub j_hop: f64,
    /// Inter-cavity spacing.
    pub ell: f64,
    /// Single-atom probe coupling.
    pub g1: f64,
    /// Atoms per cavity.
    pub n_atoms: u64,
    /// Classical control Rabi coupling.
    pub g2: f64,
    /// Probe detuning: transition frequency minus cavity frequency.
    pub delta1: f64,
    /// Control detuning: transition frequency minus drive frequency.
    pub delta2: f64,
    /// Cavity damping rate.
    pub gamma: f64,
    /// Excited-level decay rate.
    pub gamma_a: f64,
    /// Metastable-level decay rate.
    pub gamma_c: f64,
}

impl ModelParams {
    /// Validate invariants; returns `self` unchanged on success.
    pub fn validated(self) -> Result<Self, ModelError> {
        if self.ell <= 0.0 {
            return Err(ModelError::NonPositiveSpacing(self.ell));
        }
        if self.n_atoms < 1 {
            return Err(ModelError::AtomCount(self.n_atoms));
        }
        for (name, value) in [
            ("g1", self.g1),
            ("g2", self.g2),
            ("gamma", self.gamma),
            ("gamma_a", self.gamma_a),
            ("gamma_c", self.gamma_c),
        ] {
            if value < 0.0 {
                return Err(ModelError::NegativeRate { name, value });
            }
        }
        Ok(self)
    }

    /// Collectively enhanced probe coupling `G1 = g1 * sqrt(n_atoms)`.
    pub fn g1_collective(&self) -> f64 {
        self.g1 * (self.n_atoms as f64).sqrt()
    }

    /// Two-photon detuning difference `delta = delta2 - delta1`.
    pub fn delta(&self) -> f64 {
        self.delta2 - self.delta1
    }

    /// Band-center wavevector `k0 = pi / (2 ell)`.
    pub fn band_center(&self) -> f64 {
        PI / (2.0 * self.ell)
    }

    /// Natural-unit parameter set used as the base for the figure presets:
    /// `J = -1`, unit spacing, resonant and lossless.
    pub fn natural_base() -> Self {
        ModelParams {
            omega0: 100.0,
            j_hop: -1.0,
            ell: 1.0,
            g1: 1.0,
            n_atoms: 1,
            g2: 1.0,
            delta1: 0.0,
            delta2: 0.0,
            gamma: 0.0,
            gamma_a: 0.0,
            gamma_c: 0.0,
        }
    }
}

/// Uniform discretization of the first Brillouin zone `[-pi/ell, pi/ell)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KGrid {
    n_modes: usize,
    ell: f64,
    values: Vec<f64>,
}

impl KGrid {
    /// `k_j = -pi/ell + 2 pi j / (n ell)` for `j = 0..n-1`.
    pub fn new(n_modes: usize, ell: f64) -> Result<Self, ModelError> {
        if n_modes < 2 {
            return Err(ModelError::GridTooSmall(n_modes));
        }
        if ell <= 0.0 {
            return Err(ModelError::NonPositiveSpacing(ell));
        }
        let n = n_modes as f64;
        let values = (0..n_modes)
            .map(|j| -PI / ell + 2.0 * PI * (j as f64) / (n * ell))
            .collect();
        Ok(KGrid {
            n_modes,
            ell,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.n_modes
    }

    pub fn is_empty(&self) -> bool {
        self.n_modes == 0
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Grid index nearest to the band center `k0 = pi/(2 ell)`.
    pub fn band_center_index(&self) -> usize {
        let k0 = PI / (2.0 * self.ell);
        let mut best = 0;
        let mut best_dist = f64::INFINITY;
        for (j, &k) in self.values.iter().enumerate() {
            let d = (k - k0).abs();
            if d < best_dist {
                best_dist = d;
                best = j;
            }
        }
        best
    }
}

/// The symmetric 3x3 coupling matrix of one `k`-mode, basis ordered
/// (photon, A spin wave, C spin wave).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMatrix(pub [[f64; 3]; 3]);

impl ModeMatrix {
    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.0
    }

    /// Frobenius norm; the scale used by all degeneracy tolerances.
    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    pub fn mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}

/// Dispersion of the bare waveguide band in the rotating frame:
/// `eps_k = 2 J cos(k ell) + delta2 - delta1`.
pub fn dispersion(k: f64, p: &ModelParams) -> f64 {
    2.0 * p.j_hop * (k * p.ell).cos() + p.delta2 - p.delta1
}

/// Alias for [`dispersion`]; the single-atom and ensemble models share the
/// same bare band, differing only through the collective coupling.
pub fn bare_band(k: f64, p: &ModelParams) -> f64 {
    dispersion(k, p)
}

/// Derivative `d eps / d k = -2 J ell sin(k ell)`.
pub fn dispersion_slope(k: f64, p: &ModelParams) -> f64 {
    -2.0 * p.j_hop * p.ell * (k * p.ell).sin()
}

/// Coupling matrix of mode `k`:
/// rows `[[eps_k, G1, 0], [G1, delta2, g2], [0, g2, 0]]`.
pub fn assemble_mode_matrix(k: f64, p: &ModelParams) -> ModeMatrix {
    let eps = dispersion(k, p);
    let big_g1 = p.g1_collective();
    ModeMatrix([
        [eps, big_g1, 0.0],
        [big_g1, p.delta2, p.g2],
        [0.0, p.g2, 0.0],
    ])
}
