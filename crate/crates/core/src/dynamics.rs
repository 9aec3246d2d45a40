//! Time-domain simulation: pulse construction, ramped mode evolution,
//! adiabatic storage and retrieval, and the real-space ring oracle.
//!
//! In the single-excitation sector the quantum expectation dynamics of this
//! quadratic model are the classical linear ODEs
//! `dv/dt = (-i M_k(t) - Gamma) v` per mode, with
//! `Gamma = diag(gamma, gamma_A, gamma_C)`. Modes are independent and evolve
//! in parallel.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{assemble_mode_matrix, KGrid, ModeMatrix, ModelParams};
use crate::spectra::eigen_system;

pub type CVec3 = [Complex64; 3];

const ZERO3: CVec3 = [Complex64::ZERO, Complex64::ZERO, Complex64::ZERO];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("required step size {required:e} underflows the span {span:e}")]
    StepSizeUnderflow { required: f64, span: f64 },
    #[error("invalid ramp schedule: {0}")]
    InvalidSchedule(&'static str),
    #[error("invalid pulse: {0}")]
    InvalidPulse(&'static str),
    #[error("pulse grid does not match the model spacing")]
    GridMismatch,
    #[error("integration failed at mode {mode_index} (k = {k}), t = {time}: {source}")]
    ModeFailure {
        mode_index: usize,
        k: f64,
        time: f64,
        source: Box<DynamicsError>,
    },
}

/// Which parameter a storage schedule ramps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RampControl {
    /// Ramp the classical control coupling `g2` (the EIT protocol).
    ControlCoupling,
    /// Ramp the control detuning `delta2` (band compression).
    ControlDetuning,
}

/// Piecewise ramp: down to `hold_value`, hold, back up to `end_value`,
/// each segment a C1 half-cosine.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RampSchedule {
    pub control: RampControl,
    pub start_value: f64,
    pub hold_value: f64,
    pub end_value: f64,
    pub t_ramp_down: f64,
    pub t_hold: f64,
    pub t_ramp_up: f64,
}

impl RampSchedule {
    pub fn validated(self) -> Result<Self, DynamicsError> {
        if self.t_ramp_down < 0.0 || self.t_hold < 0.0 || self.t_ramp_up < 0.0 {
            return Err(DynamicsError::InvalidSchedule("durations must be >= 0"));
        }
        if self.control == RampControl::ControlCoupling
            && (self.start_value < 0.0 || self.hold_value < 0.0 || self.end_value < 0.0)
        {
            return Err(DynamicsError::InvalidSchedule("coupling values must be >= 0"));
        }
        Ok(self)
    }

    pub fn total_duration(&self) -> f64 {
        self.t_ramp_down + self.t_hold + self.t_ramp_up
    }

    fn blend(a: f64, b: f64, frac: f64) -> f64 {
        a + (b - a) * 0.5 * (1.0 - (std::f64::consts::PI * frac).cos())
    }

    /// Ramped parameter value at time `t` (clamped outside the schedule).
    pub fn value_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.start_value;
        }
        let mut t = t;
        if t < self.t_ramp_down {
            return Self::blend(self.start_value, self.hold_value, t / self.t_ramp_down);
        }
        t -= self.t_ramp_down;
        if t < self.t_hold {
            return self.hold_value;
        }
        t -= self.t_hold;
        if t < self.t_ramp_up {
            return Self::blend(self.hold_value, self.end_value, t / self.t_ramp_up);
        }
        self.end_value
    }

    /// Time derivative of the ramped parameter at `t`.
    pub fn rate_at(&self, t: f64) -> f64 {
        let pi = std::f64::consts::PI;
        if t <= 0.0 {
            return 0.0;
        }
        let mut t = t;
        if t < self.t_ramp_down {
            let frac = t / self.t_ramp_down;
            return (self.hold_value - self.start_value) * 0.5 * pi * (pi * frac).sin()
                / self.t_ramp_down;
        }
        t -= self.t_ramp_down;
        if t < self.t_hold {
            return 0.0;
        }
        t -= self.t_hold;
        if t < self.t_ramp_up {
            let frac = t / self.t_ramp_up;
            return (self.end_value - self.hold_value) * 0.5 * pi * (pi * frac).sin()
                / self.t_ramp_up;
        }
        0.0
    }

    /// Base parameters with the ramped value substituted at time `t`.
    pub fn params_at(&self, base: &ModelParams, t: f64) -> ModelParams {
        let v = self.value_at(t);
        match self.control {
            RampControl::ControlCoupling => ModelParams { g2: v, ..*base },
            RampControl::ControlDetuning => ModelParams { delta2: v, ..*base },
        }
    }
}

/// Per-mode complex 3-vectors (photon, A-wave, C-wave) over a k-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseState {
    pub grid: KGrid,
    pub amplitudes: Vec<CVec3>,
    pub time: f64,
}

impl PulseState {
    pub fn total_norm_sq(&self) -> f64 {
        self.amplitudes
            .iter()
            .flatten()
            .map(|c| c.norm_sqr())
            .sum()
    }

    /// (photon, A-wave, C-wave) fractions of the total norm.
    pub fn fractions(&self) -> [f64; 3] {
        let mut parts = [0.0; 3];
        for v in &self.amplitudes {
            for (i, c) in v.iter().enumerate() {
                parts[i] += c.norm_sqr();
            }
        }
        let total: f64 = parts.iter().sum();
        if total > 0.0 {
            for x in parts.iter_mut() {
                *x /= total;
            }
        }
        parts
    }
}

/// Overlap-squared fidelity `|<a|b>|^2` between two per-mode states.
pub fn overlap_fidelity(a: &[CVec3], b: &[CVec3]) -> f64 {
    let mut acc = Complex64::ZERO;
    for (va, vb) in a.iter().zip(b) {
        for (ca, cb) in va.iter().zip(vb) {
            acc += ca.conj() * cb;
        }
    }
    acc.norm_sqr()
}

fn mode_derivative(m: &ModeMatrix, gamma: [f64; 3], v: &CVec3) -> CVec3 {
    let e = m.entries();
    let mut out = ZERO3;
    for i in 0..3 {
        let mut mv = Complex64::ZERO;
        for j in 0..3 {
            if e[i][j] != 0.0 {
                mv += e[i][j] * v[j];
            }
        }
        out[i] = Complex64::new(0.0, -1.0) * mv - gamma[i] * v[i];
    }
    out
}

fn decay_rates(p: &ModelParams) -> [f64; 3] {
    [p.gamma, p.gamma_a, p.gamma_c]
}

/// Integrate one k-mode through `[t0, t1]` under time-dependent parameters.
///
/// Fixed-step classical Runge-Kutta; the step is
/// `min(dt_max, 0.01 / max(||M||, gamma_A))` with the matrix norm sampled
/// across the interval, small enough that halving it moves the result by
/// less than 1e-8 relative for the parameter scales this library targets.
pub fn evolve_mode<F>(
    v: CVec3,
    k: f64,
    params_at: F,
    t0: f64,
    t1: f64,
    dt_max: f64,
) -> Result<CVec3, DynamicsError>
where
    F: Fn(f64) -> ModelParams,
{
    let span = t1 - t0;
    if span <= 0.0 {
        return Ok(v);
    }
    let mut scale: f64 = 0.0;
    for s in 0..=4 {
        let p = params_at(t0 + span * s as f64 / 4.0);
        scale = scale
            .max(assemble_mode_matrix(k, &p).norm())
            .max(p.gamma_a)
            .max(p.gamma)
            .max(p.gamma_c);
    }
    let dt = (0.01 / scale.max(1e-300)).min(dt_max).min(span);
    if dt < 1e-12 * span {
        return Err(DynamicsError::StepSizeUnderflow {
            required: dt,
            span,
        });
    }
    let n_steps = (span / dt).ceil() as u64;
    let dt = span / n_steps as f64;
    let mut state = v;
    let mut t = t0;
    for _ in 0..n_steps {
        let p0 = params_at(t);
        let pm = params_at(t + 0.5 * dt);
        let p1 = params_at(t + dt);
        let m0 = assemble_mode_matrix(k, &p0);
        let mm = assemble_mode_matrix(k, &pm);
        let m1 = assemble_mode_matrix(k, &p1);
        let g0 = decay_rates(&p0);
        let gm = decay_rates(&pm);
        let g1 = decay_rates(&p1);
        let k1 = mode_derivative(&m0, g0, &state);
        let mut s2 = ZERO3;
        for i in 0..3 {
            s2[i] = state[i] + 0.5 * dt * k1[i];
        }
        let k2 = mode_derivative(&mm, gm, &s2);
        let mut s3 = ZERO3;
        for i in 0..3 {
            s3[i] = state[i] + 0.5 * dt * k2[i];
        }
        let k3 = mode_derivative(&mm, gm, &s3);
        let mut s4 = ZERO3;
        for i in 0..3 {
            s4[i] = state[i] + dt * k3[i];
        }
        let k4 = mode_derivative(&m1, g1, &s4);
        for i in 0..3 {
            state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += dt;
    }
    Ok(state)
}

/// Exact propagation of one mode under constant lossless parameters, via the
/// spectral decomposition of the mode matrix.
pub fn propagate_mode_exact(v: &CVec3, k: f64, p: &ModelParams, duration: f64) -> CVec3 {
    let m = assemble_mode_matrix(k, p);
    let (vals, vecs) = eigen_system(&m);
    let mut out = ZERO3;
    for b in 0..3 {
        let q = vecs[b];
        let mut coeff = Complex64::ZERO;
        for i in 0..3 {
            coeff += q[i] * v[i];
        }
        let phase = Complex64::new(0.0, -vals[b] * duration).exp();
        for i in 0..3 {
            out[i] += phase * coeff * q[i];
        }
    }
    out
}

/// Normalized photonic Gaussian in k-space, optionally projected per mode
/// onto one polariton branch.
pub fn make_gaussian_pulse(
    grid: &KGrid,
    center_k: f64,
    width_k: f64,
    branch_projection: Option<u8>,
    p: &ModelParams,
) -> Result<PulseState, DynamicsError> {
    if width_k <= 0.0 {
        return Err(DynamicsError::InvalidPulse("width_k must be positive"));
    }
    let zone = std::f64::consts::PI / grid.ell();
    if center_k < -zone || center_k >= zone {
        return Err(DynamicsError::InvalidPulse("center_k outside the first zone"));
    }
    if let Some(which) = branch_projection {
        if !(1..=3).contains(&which) {
            return Err(DynamicsError::InvalidPulse("branch index must be 1..=3"));
        }
    }
    let mut amplitudes: Vec<CVec3> = grid
        .values()
        .iter()
        .map(|&k| {
            let x = (k - center_k) / width_k;
            let mut v = ZERO3;
            v[0] = Complex64::new((-0.5 * x * x).exp(), 0.0);
            v
        })
        .collect();
    if let Some(which) = branch_projection {
        let i = (which - 1) as usize;
        for (&k, v) in grid.values().iter().zip(amplitudes.iter_mut()) {
            let m = assemble_mode_matrix(k, p);
            let (_, vecs) = eigen_system(&m);
            let q = vecs[i];
            let mut coeff = Complex64::ZERO;
            for j in 0..3 {
                coeff += q[j] * v[j];
            }
            for j in 0..3 {
                v[j] = coeff * q[j];
            }
        }
    }
    let norm: f64 = amplitudes
        .iter()
        .flatten()
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if norm <= 0.0 {
        return Err(DynamicsError::InvalidPulse("pulse has zero norm"));
    }
    for v in amplitudes.iter_mut() {
        for c in v.iter_mut() {
            *c /= norm;
        }
    }
    Ok(PulseState {
        grid: grid.clone(),
        amplitudes,
        time: 0.0,
    })
}

/// Forward transform: site amplitudes to mode amplitudes,
/// `c_k = sum_j d_j e^{-i k ell j} / sqrt(N)`.
pub fn sites_to_modes(sites: &[CVec3], grid: &KGrid) -> Vec<CVec3> {
    let n = sites.len();
    let root = 1.0 / (n as f64).sqrt();
    grid.values()
        .iter()
        .map(|&k| {
            let mut acc = ZERO3;
            for (j, v) in sites.iter().enumerate() {
                let phase = Complex64::new(0.0, -k * grid.ell() * j as f64).exp();
                for c in 0..3 {
                    acc[c] += phase * v[c];
                }
            }
            for c in 0..3 {
                acc[c] *= root;
            }
            acc
        })
        .collect()
}

/// Inverse transform: mode amplitudes back to site amplitudes.
pub fn modes_to_sites(modes: &[CVec3], grid: &KGrid) -> Vec<CVec3> {
    let n = modes.len();
    let root = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|j| {
            let mut acc = ZERO3;
            for (&k, v) in grid.values().iter().zip(modes) {
                let phase = Complex64::new(0.0, k * grid.ell() * j as f64).exp();
                for c in 0..3 {
                    acc[c] += phase * v[c];
                }
            }
            for c in 0..3 {
                acc[c] *= root;
            }
            acc
        })
        .collect()
}

/// Circular centroid of the real-space photon intensity, in length units
/// along the ring `[0, N ell)`. Returns `None` when no photon amplitude
/// remains.
pub fn pulse_center(state: &PulseState) -> Option<f64> {
    let sites = modes_to_sites(&state.amplitudes, &state.grid);
    let n = sites.len();
    let mut z = Complex64::ZERO;
    let mut weight = 0.0;
    for (j, v) in sites.iter().enumerate() {
        let w = v[0].norm_sqr();
        weight += w;
        z += w * Complex64::new(0.0, 2.0 * std::f64::consts::PI * j as f64 / n as f64).exp();
    }
    if weight <= 1e-30 || z.norm() <= 1e-14 * weight {
        return None;
    }
    let mut angle = z.arg();
    if angle < 0.0 {
        angle += 2.0 * std::f64::consts::PI;
    }
    Some(angle * n as f64 * state.grid.ell() / (2.0 * std::f64::consts::PI))
}

/// One sampled instant of a storage run.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct StorageSample {
    pub time: f64,
    pub photon_fraction: f64,
    pub a_fraction: f64,
    pub c_fraction: f64,
    pub norm_sq: f64,
    pub pulse_center: Option<f64>,
}

/// Outcome of a storage/retrieval run.
#[derive(Debug, Clone, PartialEq)]
pub struct StorageReport {
    pub samples: Vec<StorageSample>,
    /// Largest photon fraction seen during the hold segment.
    pub hold_max_photon_fraction: f64,
    /// Largest photon fraction at or after the start of the ramp-up.
    pub peak_retrieval_photon_fraction: f64,
    /// Overlap with the loss-free, schedule-free propagated initial state at
    /// equal elapsed time (global phase drops out of the modulus).
    pub retrieval_fidelity: f64,
    pub adiabaticity_margin: f64,
    /// Slope of the pulse-center track over the earliest samples, while the
    /// parameters are still near their start values.
    pub group_velocity_estimate: Option<f64>,
    pub final_state: PulseState,
}

/// Run a storage protocol: evolve every mode under the ramp schedule,
/// sampling fractions and the pulse center every `sample_dt`.
pub fn run_storage_protocol(
    pulse: &PulseState,
    p: &ModelParams,
    schedule: &RampSchedule,
    sample_dt: f64,
) -> Result<StorageReport, DynamicsError> {
    let schedule = schedule.validated()?;
    if sample_dt <= 0.0 {
        return Err(DynamicsError::InvalidSchedule("sample_dt must be positive"));
    }
    let total = schedule.total_duration();
    let ks: Vec<f64> = pulse.grid.values().to_vec();
    let mut amps = pulse.amplitudes.clone();
    let mut samples = Vec::new();
    let record = |amps: &[CVec3], t: f64, samples: &mut Vec<StorageSample>| {
        let state = PulseState {
            grid: pulse.grid.clone(),
            amplitudes: amps.to_vec(),
            time: t,
        };
        let fracs = state.fractions();
        samples.push(StorageSample {
            time: t,
            photon_fraction: fracs[0],
            a_fraction: fracs[1],
            c_fraction: fracs[2],
            norm_sq: state.total_norm_sq(),
            pulse_center: pulse_center(&state),
        });
    };
    record(&amps, 0.0, &mut samples);
    let n_segments = (total / sample_dt).ceil().max(1.0) as u64;
    let seg = total / n_segments as f64;
    for s in 0..n_segments {
        let t0 = s as f64 * seg;
        let t1 = (s + 1) as f64 * seg;
        let results: Vec<Result<CVec3, DynamicsError>> = amps
            .par_iter()
            .zip(ks.par_iter())
            .map(|(v, &k)| {
                evolve_mode(*v, k, |t| schedule.params_at(p, t), t0, t1, f64::INFINITY)
            })
            .collect();
        for (idx, r) in results.into_iter().enumerate() {
            match r {
                Ok(v) => amps[idx] = v,
                Err(e) => {
                    return Err(DynamicsError::ModeFailure {
                        mode_index: idx,
                        k: ks[idx],
                        time: t0,
                        source: Box::new(e),
                    })
                }
            }
        }
        record(&amps, t1, &mut samples);
    }
    let hold_start = schedule.t_ramp_down;
    let hold_end = schedule.t_ramp_down + schedule.t_hold;
    let mut hold_max = 0.0f64;
    let mut peak_retrieval = 0.0f64;
    for s in &samples {
        if s.time >= hold_start - 1e-12 && s.time <= hold_end + 1e-12 {
            hold_max = hold_max.max(s.photon_fraction);
        }
        if s.time >= hold_end - 1e-12 {
            peak_retrieval = peak_retrieval.max(s.photon_fraction);
        }
    }
    // loss-free reference: the initial pulse propagated with the start-time
    // parameters held constant
    let p_ref = ModelParams {
        gamma: 0.0,
        gamma_a: 0.0,
        gamma_c: 0.0,
        ..schedule.params_at(p, 0.0)
    };
    let ideal: Vec<CVec3> = pulse
        .amplitudes
        .iter()
        .zip(&ks)
        .map(|(v, &k)| propagate_mode_exact(v, k, &p_ref, total))
        .collect();
    let ideal_norm = ideal.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>();
    let fidelity = if ideal_norm > 0.0 {
        overlap_fidelity(&amps, &ideal) / ideal_norm
    } else {
        0.0
    };
    let margin = adiabaticity_margin(p, &schedule, &pulse.grid);
    let velocity = estimate_early_velocity(&samples, &schedule, pulse.grid.ell() * ks.len() as f64);
    Ok(StorageReport {
        hold_max_photon_fraction: hold_max,
        peak_retrieval_photon_fraction: peak_retrieval,
        retrieval_fidelity: fidelity,
        adiabaticity_margin: margin,
        group_velocity_estimate: velocity,
        final_state: PulseState {
            grid: pulse.grid.clone(),
            amplitudes: amps,
            time: total,
        },
        samples,
    })
}

/// Least-squares slope of the unwrapped pulse-center track over the samples
/// in the first tenth of the ramp-down (at least two samples).
fn estimate_early_velocity(
    samples: &[StorageSample],
    schedule: &RampSchedule,
    ring_length: f64,
) -> Option<f64> {
    let horizon = (0.1 * schedule.t_ramp_down).max(f64::MIN_POSITIVE);
    let mut track: Vec<(f64, f64)> = Vec::new();
    let mut prev: Option<f64> = None;
    let mut offset = 0.0;
    for s in samples {
        if s.time > horizon && track.len() >= 2 {
            break;
        }
        let c = s.pulse_center?;
        if let Some(p) = prev {
            let mut d = c - p;
            if d > ring_length / 2.0 {
                d -= ring_length;
            } else if d < -ring_length / 2.0 {
                d += ring_length;
            }
            offset += d;
        }
        prev = Some(c);
        track.push((s.time, offset));
    }
    if track.len() < 2 {
        return None;
    }
    let n = track.len() as f64;
    let (st, sx): (f64, f64) = track.iter().fold((0.0, 0.0), |a, &(t, x)| (a.0 + t, a.1 + x));
    let (mt, mx) = (st / n, sx / n);
    let mut num = 0.0;
    let mut den = 0.0;
    for &(t, x) in &track {
        num += (t - mt) * (x - mx);
        den += (t - mt) * (t - mt);
    }
    if den <= 0.0 {
        None
    } else {
        Some(num / den)
    }
}

/// Evolve the full ring of `N` cavities in the site basis (periodic
/// boundary), the real-space oracle for the decoupled k-mode evolution.
pub fn real_space_oracle_evolve<F>(
    state: &[CVec3],
    params_at: F,
    t0: f64,
    t1: f64,
    dt_max: f64,
) -> Result<Vec<CVec3>, DynamicsError>
where
    F: Fn(f64) -> ModelParams,
{
    let span = t1 - t0;
    if span <= 0.0 {
        return Ok(state.to_vec());
    }
    let n = state.len();
    let mut scale: f64 = 0.0;
    for s in 0..=4 {
        let p = params_at(t0 + span * s as f64 / 4.0);
        let local = (p.delta().abs() + 2.0 * p.j_hop.abs())
            .max(p.delta2.abs() + p.g1_collective() + p.g2)
            .max(p.gamma_a)
            .max(p.gamma)
            .max(p.gamma_c);
        scale = scale.max(local);
    }
    let dt = (0.01 / scale.max(1e-300)).min(dt_max).min(span);
    if dt < 1e-12 * span {
        return Err(DynamicsError::StepSizeUnderflow {
            required: dt,
            span,
        });
    }
    let n_steps = (span / dt).ceil() as u64;
    let dt = span / n_steps as f64;
    let derivative = |p: &ModelParams, s: &[CVec3], out: &mut Vec<CVec3>| {
        let big_g1 = p.g1_collective();
        let shift = p.delta();
        out.clear();
        for j in 0..n {
            let left = s[(j + n - 1) % n][0];
            let right = s[(j + 1) % n][0];
            let [a, aw, cw] = s[j];
            let da = Complex64::new(0.0, -1.0)
                * (shift * a + p.j_hop * (left + right) + big_g1 * aw)
                - p.gamma * a;
            let daw = Complex64::new(0.0, -1.0) * (p.delta2 * aw + big_g1 * a + p.g2 * cw)
                - p.gamma_a * aw;
            let dcw = Complex64::new(0.0, -1.0) * (p.g2 * aw) - p.gamma_c * cw;
            out.push([da, daw, dcw]);
        }
    };
    let mut cur = state.to_vec();
    let mut t = t0;
    let mut k1 = Vec::with_capacity(n);
    let mut k2 = Vec::with_capacity(n);
    let mut k3 = Vec::with_capacity(n);
    let mut k4 = Vec::with_capacity(n);
    let mut stage = vec![ZERO3; n];
    for _ in 0..n_steps {
        let p0 = params_at(t);
        let pm = params_at(t + 0.5 * dt);
        let p1 = params_at(t + dt);
        derivative(&p0, &cur, &mut k1);
        for j in 0..n {
            for c in 0..3 {
                stage[j][c] = cur[j][c] + 0.5 * dt * k1[j][c];
            }
        }
        derivative(&pm, &stage, &mut k2);
        for j in 0..n {
            for c in 0..3 {
                stage[j][c] = cur[j][c] + 0.5 * dt * k2[j][c];
            }
        }
        derivative(&pm, &stage, &mut k3);
        for j in 0..n {
            for c in 0..3 {
                stage[j][c] = cur[j][c] + dt * k3[j][c];
            }
        }
        derivative(&p1, &stage, &mut k4);
        for j in 0..n {
            for c in 0..3 {
                cur[j][c] += dt / 6.0 * (k1[j][c] + 2.0 * k2[j][c] + 2.0 * k3[j][c] + k4[j][c]);
            }
        }
        t += dt;
    }
    Ok(cur)
}

/// Worst-case adiabaticity figure of merit over the schedule and grid:
/// `min gap^2 / |d(param)/dt * <i| dM/dparam |j>|` across branch pairs.
/// Large values predict adiabatic following.
pub fn adiabaticity_margin(p: &ModelParams, schedule: &RampSchedule, grid: &KGrid) -> f64 {
    let total = schedule.total_duration();
    if total <= 0.0 {
        return f64::INFINITY;
    }
    let n_t = 256;
    let mut margin = f64::INFINITY;
    for s in 0..=n_t {
        let t = total * s as f64 / n_t as f64;
        let rate = schedule.rate_at(t);
        if rate == 0.0 {
            continue;
        }
        let pt = schedule.params_at(p, t);
        for &k in grid.values() {
            let m = assemble_mode_matrix(k, &pt);
            let (vals, vecs) = eigen_system(&m);
            for i in 0..3 {
                for j in (i + 1)..3 {
                    let gap = (vals[j] - vals[i]).abs();
                    let coupling = match schedule.control {
                        RampControl::ControlCoupling => {
                            vecs[i][1] * vecs[j][2] + vecs[i][2] * vecs[j][1]
                        }
                        RampControl::ControlDetuning => vecs[i][1] * vecs[j][1],
                    };
                    let drive = (rate * coupling).abs();
                    if drive > 0.0 {
                        margin = margin.min(gap * gap / drive);
                    }
                }
            }
        }
    }
    margin
}
