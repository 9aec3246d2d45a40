//! Diagonalization of the per-mode coupling matrix: polariton branches,
//! band structures, bandwidths and group velocities.
//!
//! Eigenvalues come from the trigonometric three-real-roots form of the cubic
//! resolvent, which stays accurate where the radical form loses digits. Near
//! a degeneracy (root gap below `DEGENERACY_TOL * ||M||`) the solver switches
//! to cyclic Jacobi rotations.

use std::f64::consts::PI;

use thiserror::Error;

use crate::model::{assemble_mode_matrix, dispersion, dispersion_slope, KGrid, ModeMatrix, ModelParams};

/// Relative root-gap threshold below which the radical/trig formulas are
/// abandoned for the iterative solver.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("dark-state mixing angle undefined: G1 and g2 are both zero")]
    BothCouplingsZero,
    #[error("branch index must be 1, 2 or 3, got {0}")]
    BadBranchIndex(u8),
    #[error("band structure requires a nonempty k-grid")]
    EmptyGrid,
}

/// Eigenvalues of one mode matrix, ascending, with a flag recording whether
/// two roots were close enough to force the iterative fallback.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalues {
    pub values: [f64; 3],
    /// True when two roots were within `DEGENERACY_TOL * ||M||`.
    pub near_degenerate: bool,
}

/// One polariton branch at a single wavevector: the eigenvalue and the
/// normalized (photon, A-wave, C-wave) composition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolaritonBranch {
    /// 1, 2 or 3, ascending by eigenvalue (1 = lowest).
    pub branch_index: u8,
    pub k: f64,
    pub eigenvalue: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl PolaritonBranch {
    pub fn composition(&self) -> [f64; 3] {
        [self.d1, self.d2, self.d3]
    }
}

/// Three branch curves over a k-grid, labeled 1..3 ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct BandStructure {
    pub ks: Vec<f64>,
    /// `lambdas[j][i]` is the eigenvalue of branch `i+1` at `ks[j]`.
    pub lambdas: Vec<[f64; 3]>,
    /// `compositions[j][i]` is the normalized (d1, d2, d3) of branch `i+1`.
    pub compositions: Vec<[[f64; 3]; 3]>,
    /// `max_k lambda - min_k lambda` per branch.
    pub bandwidths: [f64; 3],
}

impl BandStructure {
    pub fn branch(&self, which: u8) -> Result<Vec<PolaritonBranch>, SpectraError> {
        if !(1..=3).contains(&which) {
            return Err(SpectraError::BadBranchIndex(which));
        }
        let i = (which - 1) as usize;
        Ok(self
            .ks
            .iter()
            .zip(self.lambdas.iter().zip(&self.compositions))
            .map(|(&k, (lam, comp))| PolaritonBranch {
                branch_index: which,
                k,
                eigenvalue: lam[i],
                d1: comp[i][0],
                d2: comp[i][1],
                d3: comp[i][2],
            })
            .collect())
    }
}

/// Closed-form eigenvalues of a symmetric mode matrix, sorted ascending.
///
/// Uses the trigonometric resolution of the characteristic cubic; all three
/// roots of a real symmetric matrix are real, so no imaginary residue has to
/// be discarded on this path. A near-degenerate spectrum is recomputed with
/// Jacobi rotations and flagged.
pub fn eigenvalues_closed_form(m: &ModeMatrix) -> Eigenvalues {
    let a = m.entries();
    let scale = m.norm();
    let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    let q = m.trace() / 3.0;
    if off == 0.0 {
        // already diagonal
        let mut values = [a[0][0], a[1][1], a[2][2]];
        values.sort_by(|x, y| x.total_cmp(y));
        let near = min_gap(&values) < DEGENERACY_TOL * scale;
        return Eigenvalues {
            values,
            near_degenerate: near,
        };
    }
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * off;
    let p = (p2 / 6.0).sqrt();
    let mut values = if p <= DEGENERACY_TOL * scale.max(f64::MIN_POSITIVE) {
        [q, q, q]
    } else {
        let b = ModeMatrix([
            [
                (a[0][0] - q) / p,
                a[0][1] / p,
                a[0][2] / p,
            ],
            [
                a[1][0] / p,
                (a[1][1] - q) / p,
                a[1][2] / p,
            ],
            [
                a[2][0] / p,
                a[2][1] / p,
                (a[2][2] - q) / p,
            ],
        ]);
        let r = (b.det() / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
        [e1, 3.0 * q - e1 - e3, e3]
    };
    values.sort_by(|x, y| x.total_cmp(y));
    if min_gap(&values) < DEGENERACY_TOL * scale {
        let (mut vals, _) = jacobi_eigen(m);
        vals.sort_by(|x, y| x.total_cmp(y));
        Eigenvalues {
            values: vals,
            near_degenerate: true,
        }
    } else {
        Eigenvalues {
            values,
            near_degenerate: false,
        }
    }
}

fn min_gap(sorted: &[f64; 3]) -> f64 {
    (sorted[1] - sorted[0]).min(sorted[2] - sorted[1])
}

/// Cyclic Jacobi diagonalization of a symmetric 3x3 matrix.
///
/// Returns unsorted eigenvalues and the accumulated rotation matrix whose
/// columns are the corresponding eigenvectors.
fn jacobi_eigen(m: &ModeMatrix) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut a = *m.entries();
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _sweep in 0..50 {
        let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        if off < 1e-300 || off.sqrt() < 1e-16 * m.norm().max(f64::MIN_POSITIVE) {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = a[p][q];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
            let t = if theta >= 0.0 {
                1.0 / (theta + (1.0 + theta * theta).sqrt())
            } else {
                -1.0 / (-theta + (1.0 + theta * theta).sqrt())
            };
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = t * c;
            for i in 0..3 {
                let aip = a[i][p];
                let aiq = a[i][q];
                a[i][p] = c * aip - s * aiq;
                a[i][q] = s * aip + c * aiq;
            }
            for j in 0..3 {
                let apj = a[p][j];
                let aqj = a[q][j];
                a[p][j] = c * apj - s * aqj;
                a[q][j] = s * apj + c * aqj;
            }
            for i in 0..3 {
                let vip = v[i][p];
                let viq = v[i][q];
                v[i][p] = c * vip - s * viq;
                v[i][q] = s * vip + c * viq;
            }
        }
    }
    ([a[0][0], a[1][1], a[2][2]], v)
}

/// Eigenvalues plus orthonormal eigenvectors (columns), sorted ascending,
/// with the deterministic sign convention (largest-|component| positive).
pub fn eigen_system(m: &ModeMatrix) -> ([f64; 3], [[f64; 3]; 3]) {
    let eig = eigenvalues_closed_form(m);
    if eig.near_degenerate {
        let (vals, vecs) = jacobi_eigen(m);
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        let mut values = [0.0; 3];
        let mut columns = [[0.0; 3]; 3];
        for (slot, &idx) in order.iter().enumerate() {
            values[slot] = vals[idx];
            let mut col = [vecs[0][idx], vecs[1][idx], vecs[2][idx]];
            fix_sign(&mut col);
            columns[slot] = col;
        }
        return (values, columns);
    }
    let mut columns = [[0.0; 3]; 3];
    for (slot, &lam) in eig.values.iter().enumerate() {
        columns[slot] = null_space_vector(m, lam);
    }
    (eig.values, columns)
}

/// Unit eigenvector of `m` for the (simple) eigenvalue `lam`, extracted from
/// the null space of `m - lam I` via row cross products.
fn null_space_vector(m: &ModeMatrix, lam: f64) -> [f64; 3] {
    let a = m.entries();
    let rows = [
        [a[0][0] - lam, a[0][1], a[0][2]],
        [a[1][0], a[1][1] - lam, a[1][2]],
        [a[2][0], a[2][1], a[2][2] - lam],
    ];
    let candidates = [
        cross(rows[0], rows[1]),
        cross(rows[0], rows[2]),
        cross(rows[1], rows[2]),
    ];
    let mut best = candidates[0];
    let mut best_norm = norm_sq(best);
    for c in &candidates[1..] {
        let n = norm_sq(*c);
        if n > best_norm {
            best_norm = n;
            best = *c;
        }
    }
    if best_norm.sqrt() <= 1e-140 {
        // all rows (nearly) parallel: the matrix is (nearly) rank one; any
        // vector orthogonal to the dominant row works
        let mut row = rows[0];
        for r in &rows[1..] {
            if norm_sq(*r) > norm_sq(row) {
                row = *r;
            }
        }
        best = if norm_sq(row) == 0.0 {
            [1.0, 0.0, 0.0]
        } else {
            let trial = cross(row, [1.0, 0.0, 0.0]);
            if norm_sq(trial) > 1e-280 {
                trial
            } else {
                cross(row, [0.0, 1.0, 0.0])
            }
        };
        best_norm = norm_sq(best);
    }
    let n = best_norm.sqrt();
    let mut v = [best[0] / n, best[1] / n, best[2] / n];
    fix_sign(&mut v);
    v
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm_sq(v: [f64; 3]) -> f64 {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

fn fix_sign(v: &mut [f64; 3]) {
    let mut imax = 0;
    for i in 1..3 {
        if v[i].abs() > v[imax].abs() {
            imax = i;
        }
    }
    if v[imax] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// One polariton branch of mode `k`.
///
/// Where the explicit composition formula
/// `(G1/(lam - eps), 1, g2/lam) / r` is well posed it agrees with the
/// null-space eigenvector; the dark state (`lam = 0`) and the decoupled
/// limits go through the null-space path unconditionally.
pub fn polariton_branch(
    m: &ModeMatrix,
    which: u8,
    k: f64,
    p: &ModelParams,
) -> Result<PolaritonBranch, SpectraError> {
    if !(1..=3).contains(&which) {
        return Err(SpectraError::BadBranchIndex(which));
    }
    let (values, vectors) = eigen_system(m);
    let i = (which - 1) as usize;
    let lam = values[i];
    let v = vectors[i];
    #[cfg(debug_assertions)]
    {
        let scale = m.norm().max(f64::MIN_POSITIVE);
        let eps = dispersion(k, p);
        let big_g1 = p.g1_collective();
        let well_posed = lam.abs() > 1e-6 * scale
            && (lam - eps).abs() > 1e-6 * scale
            && big_g1 > 0.0
            && !eigenvalues_closed_form(m).near_degenerate;
        if well_posed {
            let mut w = [big_g1 / (lam - eps), 1.0, p.g2 / lam];
            let n = norm_sq(w).sqrt();
            for x in w.iter_mut() {
                *x /= n;
            }
            fix_sign(&mut w);
            for j in 0..3 {
                debug_assert!(
                    (w[j] - v[j]).abs() <= 1e-9,
                    "explicit composition disagrees with eigenvector: {w:?} vs {v:?}"
                );
            }
        }
    }
    Ok(PolaritonBranch {
        branch_index: which,
        k,
        eigenvalue: lam,
        d1: v[0],
        d2: v[1],
        d3: v[2],
    })
}

/// Photon/C-wave mixing angle of the dark polariton, `tan(theta) = G1/g2`,
/// in `[0, pi/2]`.
pub fn dark_state_angle(p: &ModelParams) -> Result<f64, SpectraError> {
    let big_g1 = p.g1_collective();
    if big_g1 == 0.0 && p.g2 == 0.0 {
        return Err(SpectraError::BothCouplingsZero);
    }
    Ok(big_g1.atan2(p.g2))
}

/// Band structure over a k-grid.
///
/// Branches are tracked between adjacent k-points by eigenvector overlap,
/// then labeled 1..3 by ascending mean eigenvalue. With both couplings open
/// (gapped spectrum) this coincides with pointwise ascending ordering; in
/// decoupled limits it keeps each physical band continuous through crossings.
pub fn band_structure(grid: &KGrid, p: &ModelParams) -> Result<BandStructure, SpectraError> {
    if grid.is_empty() {
        return Err(SpectraError::EmptyGrid);
    }
    let ks: Vec<f64> = grid.values().to_vec();
    let mut lambdas: Vec<[f64; 3]> = Vec::with_capacity(ks.len());
    let mut compositions: Vec<[[f64; 3]; 3]> = Vec::with_capacity(ks.len());
    let mut prev_vectors: Option<[[f64; 3]; 3]> = None;
    for &k in &ks {
        let m = assemble_mode_matrix(k, p);
        let (vals, vecs) = eigen_system(&m);
        let perm = match prev_vectors {
            None => [0usize, 1, 2],
            Some(prev) => best_overlap_permutation(&prev, &vecs),
        };
        let mut lam = [0.0; 3];
        let mut comp = [[0.0; 3]; 3];
        for slot in 0..3 {
            lam[slot] = vals[perm[slot]];
            comp[slot] = vecs[perm[slot]];
        }
        prev_vectors = Some(comp);
        lambdas.push(lam);
        compositions.push(comp);
    }
    // relabel tracked curves so branch 1 has the lowest mean eigenvalue
    let mut means = [0.0f64; 3];
    for lam in &lambdas {
        for i in 0..3 {
            means[i] += lam[i];
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| means[i].total_cmp(&means[j]));
    for lam in lambdas.iter_mut() {
        *lam = [lam[order[0]], lam[order[1]], lam[order[2]]];
    }
    for comp in compositions.iter_mut() {
        *comp = [comp[order[0]], comp[order[1]], comp[order[2]]];
    }
    let mut bandwidths = [0.0; 3];
    for i in 0..3 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for lam in &lambdas {
            lo = lo.min(lam[i]);
            hi = hi.max(lam[i]);
        }
        bandwidths[i] = hi - lo;
    }
    Ok(BandStructure {
        ks,
        lambdas,
        compositions,
        bandwidths,
    })
}

/// Assignment of new eigenvectors to previous branch slots maximizing the
/// summed |overlap|; six permutations, checked exhaustively.
fn best_overlap_permutation(prev: &[[f64; 3]; 3], new: &[[f64; 3]; 3]) -> [usize; 3] {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut best = PERMS[0];
    let mut best_score = f64::NEG_INFINITY;
    for perm in PERMS {
        let mut score = 0.0;
        for slot in 0..3 {
            let a = prev[slot];
            let b = new[perm[slot]];
            score += (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).abs();
        }
        if score > best_score {
            best_score = score;
            best = perm;
        }
    }
    best
}

/// Group velocity `d lambda / d k` of a branch, from the eigenvector:
/// the only k-dependent matrix entry is the bare dispersion, so
/// `d lambda / d k = d1^2 * d eps / d k`.
pub fn group_velocity(branch: &PolaritonBranch, p: &ModelParams) -> f64 {
    branch.d1 * branch.d1 * dispersion_slope(branch.k, p)
}

/// Central finite difference of the branch eigenvalue, the cross-check for
/// [`group_velocity`]. Step defaults to `1e-6 / ell`.
pub fn group_velocity_fd(k: f64, which: u8, p: &ModelParams, step: Option<f64>) -> f64 {
    let h = step.unwrap_or(1e-6 / p.ell);
    let i = (which.clamp(1, 3) - 1) as usize;
    let lp = eigenvalues_closed_form(&assemble_mode_matrix(k + h, p)).values[i];
    let lm = eigenvalues_closed_form(&assemble_mode_matrix(k - h, p)).values[i];
    (lp - lm) / (2.0 * h)
}

/// Per-branch composition arrays (k, d1, d2, d3) over a grid.
pub fn composition_profile(
    grid: &KGrid,
    p: &ModelParams,
) -> Result<[Vec<PolaritonBranch>; 3], SpectraError> {
    let bs = band_structure(grid, p)?;
    Ok([bs.branch(1)?, bs.branch(2)?, bs.branch(3)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::assemble_mode_matrix;
    use approx::assert_relative_eq;

    fn params(g1: f64, g2: f64) -> ModelParams {
        ModelParams {
            g1,
            g2,
            ..ModelParams::natural_base()
        }
    }

    #[test]
    fn decoupled_eigenvalues_are_the_diagonal() {
        let p = ModelParams {
            g1: 0.0,
            g2: 0.0,
            delta2: 0.7,
            ..ModelParams::natural_base()
        };
        let m = assemble_mode_matrix(0.4, &p);
        let eps = dispersion(0.4, &p);
        let eig = eigenvalues_closed_form(&m);
        let mut expect = [eps, 0.7, 0.0];
        expect.sort_by(|a, b| a.total_cmp(b));
        for i in 0..3 {
            assert_relative_eq!(eig.values[i], expect[i], max_relative = 1e-14);
        }
    }

    #[test]
    fn autler_townes_splitting_at_resonance() {
        let p = params(0.8, 0.6);
        let k0 = p.band_center();
        let m = assemble_mode_matrix(k0, &p);
        let eig = eigenvalues_closed_form(&m);
        let s = (0.64f64 + 0.36).sqrt();
        assert!((eig.values[0] + s).abs() < 1e-12);
        assert!(eig.values[1].abs() < 1e-12);
        assert!((eig.values[2] - s).abs() < 1e-12);
    }

    #[test]
    fn dark_state_vector_at_resonant_band_center() {
        let p = params(1.0, 0.5);
        let k0 = p.band_center();
        let m = assemble_mode_matrix(k0, &p);
        let b = polariton_branch(&m, 2, k0, &p).unwrap();
        let theta = dark_state_angle(&p).unwrap();
        // (cos, 0, -sin) up to the overall sign convention: here G1 > g2, so
        // the C component dominates and comes out positive
        assert!(b.eigenvalue.abs() < 1e-12);
        assert_relative_eq!(b.d1.abs(), theta.cos(), epsilon = 1e-12);
        assert!(b.d2.abs() < 1e-12);
        assert_relative_eq!(b.d3.abs(), theta.sin(), epsilon = 1e-12);
        assert!(b.d1 * b.d3 < 0.0);
    }

    #[test]
    fn bright_branches_at_resonant_band_center() {
        // direct diagonalization gives (sin, +-1, cos)/sqrt(2) with
        // tan(theta) = G1/g2; photon weight G1^2 / (2 (G1^2 + g2^2))
        let p = params(1.0, 0.5);
        let k0 = p.band_center();
        let m = assemble_mode_matrix(k0, &p);
        let theta = dark_state_angle(&p).unwrap();
        let s2 = 2.0f64.sqrt();
        for (which, sign) in [(1u8, -1.0), (3u8, 1.0)] {
            let b = polariton_branch(&m, which, k0, &p).unwrap();
            // branch 1 has lambda < 0: eigenvector prop to (G1, lambda, g2)
            assert_relative_eq!(b.d1.abs(), theta.sin() / s2, epsilon = 1e-12);
            assert_relative_eq!(b.d2.abs(), 1.0 / s2, epsilon = 1e-12);
            assert_relative_eq!(b.d3.abs(), theta.cos() / s2, epsilon = 1e-12);
            // the A component dominates, so the sign convention fixes d2 > 0
            // and d1, d3 carry the sign of the eigenvalue
            assert!(b.d2 > 0.0);
            assert_eq!(b.d1.signum(), sign);
            assert_eq!(b.d3.signum(), sign);
        }
    }

    #[test]
    fn detuned_dark_state_persists() {
        // delta1 = delta2 = Delta keeps eps(k0) = 0; the dark state survives
        // and the non-dark branches are prop to (G1, (Delta -+ alpha)/2, g2)
        let delta = 0.8;
        let p = ModelParams {
            delta1: delta,
            delta2: delta,
            g1: 1.0,
            g2: 0.5,
            ..ModelParams::natural_base()
        };
        let k0 = p.band_center();
        let m = assemble_mode_matrix(k0, &p);
        // alpha > Delta, so branch ordering: (Delta-alpha)/2 < 0 = dark < (Delta+alpha)/2
        let alpha = (delta * delta + 4.0 * (1.0 + 0.25f64)).sqrt();
        let low = polariton_branch(&m, 1, k0, &p).unwrap();
        let mid = polariton_branch(&m, 2, k0, &p).unwrap();
        let high = polariton_branch(&m, 3, k0, &p).unwrap();
        assert_relative_eq!(low.eigenvalue, (delta - alpha) / 2.0, epsilon = 1e-12);
        assert!(mid.eigenvalue.abs() < 1e-12);
        assert_relative_eq!(high.eigenvalue, (delta + alpha) / 2.0, epsilon = 1e-12);
        assert!(mid.d2.abs() < 1e-12);
        for b in [low, high] {
            // proportional to (G1, lambda, g2)
            let expect = {
                let mut v = [1.0, b.eigenvalue, 0.5];
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                for x in v.iter_mut() {
                    *x /= n;
                }
                v
            };
            let sign = if (b.d1 - expect[0]).abs() < (b.d1 + expect[0]).abs() {
                1.0
            } else {
                -1.0
            };
            assert_relative_eq!(b.d1, sign * expect[0], epsilon = 1e-10);
            assert_relative_eq!(b.d2, sign * expect[1], epsilon = 1e-10);
            assert_relative_eq!(b.d3, sign * expect[2], epsilon = 1e-10);
        }
    }

    #[test]
    fn dark_state_angle_limits() {
        let p = params(1.0, 1.0);
        assert_relative_eq!(dark_state_angle(&p).unwrap(), PI / 4.0, epsilon = 1e-15);
        let photon_like = params(0.01, 1.0);
        assert!(dark_state_angle(&photon_like).unwrap() < 0.011);
        let atom_like = params(1.0, 0.01);
        assert!(dark_state_angle(&atom_like).unwrap() > PI / 2.0 - 0.011);
        assert_eq!(
            dark_state_angle(&params(0.0, 0.0)),
            Err(SpectraError::BothCouplingsZero)
        );
    }

    #[test]
    fn band_structure_gapped_ordering() {
        let p = ModelParams {
            g1: 0.5,
            g2: 0.8,
            delta2: 0.3,
            ..ModelParams::natural_base()
        };
        let grid = KGrid::new(128, 1.0).unwrap();
        let bs = band_structure(&grid, &p).unwrap();
        for lam in &bs.lambdas {
            assert!(lam[0] < lam[1] && lam[1] < lam[2]);
        }
    }

    #[test]
    fn band_structure_decoupled_bands_are_physical() {
        let p = ModelParams {
            g1: 0.0,
            g2: 0.0,
            delta2: 0.5,
            ..ModelParams::natural_base()
        };
        let grid = KGrid::new(64, 1.0).unwrap();
        let bs = band_structure(&grid, &p).unwrap();
        // overlap tracking keeps the photon band continuous through crossings:
        // bands must be exactly {eps_k, delta2, 0}, in some fixed assignment
        for (j, &k) in bs.ks.iter().enumerate() {
            let eps = dispersion(k, &p);
            let mut got = bs.lambdas[j].to_vec();
            let mut want = vec![eps, 0.5, 0.0];
            got.sort_by(|a, b| a.total_cmp(b));
            want.sort_by(|a, b| a.total_cmp(b));
            for (g, w) in got.iter().zip(&want) {
                assert_relative_eq!(g, w, epsilon = 1e-12);
            }
        }
        // photon bandwidth 4|J|, flat atomic bands
        let mut widths = bs.bandwidths;
        widths.sort_by(|a, b| a.total_cmp(b));
        assert!(widths[0] < 1e-12 && widths[1] < 1e-12);
        assert_relative_eq!(widths[2], 4.0, epsilon = 1e-12);
    }

    #[test]
    fn group_velocity_matches_finite_difference() {
        let p = ModelParams {
            g1: 0.6,
            g2: 1.2,
            delta2: 0.4,
            ..ModelParams::natural_base()
        };
        for &k in &[0.3, 0.9, 1.4, 2.2] {
            let m = assemble_mode_matrix(k, &p);
            for which in 1..=3u8 {
                let b = polariton_branch(&m, which, k, &p).unwrap();
                let hf = group_velocity(&b, &p);
                let fd = group_velocity_fd(k, which, &p, None);
                assert_relative_eq!(hf, fd, max_relative = 1e-5, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn group_velocity_closed_forms_at_band_center() {
        let p = params(0.7, 1.3);
        let k0 = p.band_center();
        let m = assemble_mode_matrix(k0, &p);
        let gsq = 0.7f64 * 0.7;
        let g2sq = 1.3f64 * 1.3;
        let mid = polariton_branch(&m, 2, k0, &p).unwrap();
        assert_relative_eq!(
            group_velocity(&mid, &p).abs(),
            2.0 * g2sq / (gsq + g2sq),
            max_relative = 1e-12
        );
        for which in [1u8, 3] {
            let b = polariton_branch(&m, which, k0, &p).unwrap();
            assert_relative_eq!(
                group_velocity(&b, &p).abs(),
                gsq / (gsq + g2sq),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn composition_dominance_flip() {
        let grid = KGrid::new(64, 1.0).unwrap();
        // g2 >> G1: middle branch photon-dominated at the band center
        let photon_like = params(0.1, 3.0);
        let profile = composition_profile(&grid, &photon_like).unwrap();
        let j = grid.band_center_index();
        assert!(profile[1][j].d1.abs() > 0.99);
        // G1 >> g2: C-wave dominated
        let atom_like = params(1.0, 0.1);
        let profile = composition_profile(&grid, &atom_like).unwrap();
        assert!(profile[1][j].d3.abs() > 0.99);
        // normalization everywhere
        for branch in &profile {
            for b in branch {
                let n = b.d1 * b.d1 + b.d2 * b.d2 + b.d3 * b.d3;
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eigenvector_residual_and_orthogonality() {
        let p = ModelParams {
            g1: 0.9,
            g2: 0.4,
            delta2: -0.8,
            delta1: 0.2,
            ..ModelParams::natural_base()
        };
        let m = assemble_mode_matrix(0.77, &p);
        let (vals, vecs) = eigen_system(&m);
        for i in 0..3 {
            let mv = m.mul_vec(vecs[i]);
            let mut res = 0.0f64;
            for j in 0..3 {
                res += (mv[j] - vals[i] * vecs[i][j]).powi(2);
            }
            assert!(res.sqrt() <= 1e-10 * m.norm());
        }
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|t| vecs[i][t] * vecs[j][t]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn degenerate_spectrum_uses_fallback() {
        // G1 = g2 = 0 and eps = delta2 = 0: triple degeneracy
        let p = ModelParams {
            g1: 0.0,
            g2: 0.0,
            ..ModelParams::natural_base()
        };
        let k0 = p.band_center();
        let m = assemble_mode_matrix(k0, &p);
        let eig = eigenvalues_closed_form(&m);
        assert!(eig.near_degenerate);
        for v in eig.values {
            assert!(v.abs() < 1e-12);
        }
        let (_, vecs) = eigen_system(&m);
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|t| vecs[i][t] * vecs[j][t]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn bad_branch_index_rejected() {
        let p = params(1.0, 1.0);
        let m = assemble_mode_matrix(0.1, &p);
        assert!(matches!(
            polariton_branch(&m, 0, 0.1, &p),
            Err(SpectraError::BadBranchIndex(0))
        ));
        assert!(matches!(
            polariton_branch(&m, 4, 0.1, &p),
            Err(SpectraError::BadBranchIndex(4))
        ));
    }
}
