//! Single-excitation band structure of a ring: the effective non-Hermitian
//! Hamiltonian, its complex dispersion, and bright/dark classification by
//! the light cone.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::coupling::CouplingMatrices;
use crate::geometry::EmitterGeometry;
use crate::linalg::eig;
use crate::vibronic::renormalized_couplings;
use crate::{Error, Result, C64};

/// Guard subtracted before rounding `N d / λ0` up, so products that are
/// integral in exact arithmetic (e.g. `100 × 0.05`) are not pushed past the
/// integer by floating-point noise.
const CUTOFF_ROUNDING_GUARD: f64 = 1e-9;

/// One collective mode of the dispersion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionMode {
    /// Mode number folded into the first Brillouin zone, `−N/2 < k ≤ N/2`.
    pub k: i64,
    /// Quasimomentum `q = 2πk/(N d)` in units of `1/λ0`.
    pub q: f64,
    /// Coherent shift (real part of the eigenvalue).
    pub energy_shift: f64,
    /// Decay rate (`−2 ×` imaginary part of the eigenvalue).
    pub decay: f64,
    pub bright: bool,
}

/// Dispersion of a ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionResult {
    /// Modes ordered by `k`.
    pub modes: Vec<DispersionMode>,
    /// `⌈N d/λ0⌉`.
    pub bright_cutoff: i64,
    /// Eigenvalues of the effective Hamiltonian, in `modes` order
    /// (recoverable from `modes`, so not serialized).
    #[serde(skip)]
    pub eigenvalues: Vec<C64>,
}

impl DispersionResult {
    pub fn bright_count(&self) -> usize {
        self.modes.iter().filter(|m| m.bright).count()
    }

    pub fn total_decay(&self) -> f64 {
        self.modes.iter().map(|m| m.decay).sum()
    }
}

/// `H_eff[j, j'] = Ω^λ_jj' − iΓ^λ_jj'/2`, diagonal `−iΓ0/2` (rotating frame).
pub fn effective_hamiltonian(cm: &CouplingMatrices, lambda: f64, nbar: f64) -> DMatrix<C64> {
    let r = renormalized_couplings(cm, lambda, nbar);
    DMatrix::from_fn(cm.n(), cm.n(), |i, j| C64::new(r.omega[(i, j)], -0.5 * r.gamma[(i, j)]))
}

/// Light-cone cutoff `⌈N d/λ0⌉`.
pub fn bright_cutoff(n: usize, d: f64) -> i64 {
    (n as f64 * d - CUTOFF_ROUNDING_GUARD).ceil() as i64
}

/// Fold a mode index into `−N/2 < k ≤ N/2`.
pub fn fold_mode(k: usize, n: usize) -> i64 {
    let k = (k % n) as i64;
    if 2 * k > n as i64 {
        k - n as i64
    } else {
        k
    }
}

/// Complex dispersion of a ring from dense non-Hermitian diagonalization,
/// with modes labeled by maximal overlap with the discrete Fourier vectors.
pub fn dispersion(geom: &EmitterGeometry, cm: &CouplingMatrices, lambda: f64, nbar: f64) -> Result<DispersionResult> {
    let n = cm.n();
    if n < 2 {
        return Err(Error::param("N", "dispersion needs at least two emitters"));
    }
    let d = geom.separation;
    if !(d > 0.0) {
        return Err(Error::param("separation", "ring separation must be positive"));
    }
    let h = effective_hamiltonian(cm, lambda, nbar);
    let (values, vectors) = eig(&h);
    // Overlaps |⟨f_k|v_i⟩|² with f_k[j] = e^{2πi j k/N}/√N.
    let norm = 1.0 / (n as f64).sqrt();
    let mut overlaps = Vec::with_capacity(n * n);
    for i in 0..n {
        let v = vectors.column(i);
        let vn = v.norm();
        for k in 0..n {
            let dot: C64 = (0..n)
                .map(|j| C64::from_polar(norm, -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64) * v[j])
                .sum();
            overlaps.push(((dot.norm() / vn).powi(2), i, k));
        }
    }
    overlaps.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut label = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for &(_, i, k) in &overlaps {
        if label[i] == usize::MAX && !taken[k] {
            label[i] = k;
            taken[k] = true;
        }
    }
    let cutoff = bright_cutoff(n, d);
    let mut modes: Vec<(DispersionMode, C64)> = (0..n)
        .map(|i| {
            let k = fold_mode(label[i], n);
            let z = values[i];
            (
                DispersionMode {
                    k,
                    q: 2.0 * std::f64::consts::PI * k as f64 / (n as f64 * d),
                    energy_shift: z.re,
                    decay: -2.0 * z.im,
                    bright: k.abs() <= cutoff,
                },
                z,
            )
        })
        .collect();
    modes.sort_by_key(|(m, _)| m.k);
    Ok(DispersionResult {
        eigenvalues: modes.iter().map(|(_, z)| *z).collect(),
        modes: modes.into_iter().map(|(m, _)| m).collect(),
        bright_cutoff: cutoff,
    })
}

/// Eigenvalues of a circulant effective Hamiltonian from the discrete
/// Fourier transform of its first row, indexed like [`dispersion`] modes.
pub fn circulant_dispersion(cm: &CouplingMatrices, lambda: f64, nbar: f64) -> Vec<(i64, C64)> {
    let h = effective_hamiltonian(cm, lambda, nbar);
    let n = cm.n();
    let mut out: Vec<(i64, C64)> = (0..n)
        .map(|k| {
            let z: C64 = (0..n)
                .map(|j| h[(0, j)] * C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64))
                .sum();
            (fold_mode(k, n), z)
        })
        .collect();
    out.sort_by_key(|(k, _)| *k);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::coupling_matrices;
    use crate::geometry::{build_dimer, build_ring, Polarization};

    #[test]
    fn dimer_eigenvalues_closed_form() {
        let geom = build_dimer(0.08).unwrap();
        let cm = coupling_matrices(&geom, 1.0).unwrap();
        let (om, g) = (cm.omega[(0, 1)], cm.gamma[(0, 1)]);
        let (ev, _) = eig(&effective_hamiltonian(&cm, 0.0, 0.0));
        for expect in [C64::new(om, -(1.0 + g) / 2.0), C64::new(-om, -(1.0 - g) / 2.0)] {
            assert!(ev.iter().any(|z| (z - expect).norm() < 1e-10), "{expect} not in {ev:?}");
        }
    }

    #[test]
    fn light_cone_cutoff_of_large_ring() {
        assert_eq!(bright_cutoff(100, 0.05), 5);
        let geom = build_ring(100, 0.05, Polarization::Perpendicular).unwrap();
        let cm = coupling_matrices(&geom, 1.0).unwrap();
        let disp = dispersion(&geom, &cm, 0.0, 0.0).unwrap();
        assert_eq!(disp.bright_count(), 11);
        assert!((disp.total_decay() - 100.0).abs() < 1e-8);
        // Degenerate ±k pairs may be labeled in either order, so compare by
        // value and check the labels agree up to sign.
        for (k, z) in circulant_dispersion(&cm, 0.0, 0.0) {
            let hit = disp.modes.iter().zip(&disp.eigenvalues).find(|(_, w)| (*w - z).norm() < 1e-10);
            let (mode, _) = hit.unwrap_or_else(|| panic!("{z} missing"));
            assert_eq!(mode.k.abs(), k.abs());
        }
    }

    #[test]
    fn vibronic_floor_and_strong_coupling_limit() {
        let geom = build_ring(24, 0.05, Polarization::Perpendicular).unwrap();
        let cm = coupling_matrices(&geom, 1.0).unwrap();
        let lambda: f64 = 0.15;
        let floor = 1.0 - (-lambda * lambda).exp();
        let disp = dispersion(&geom, &cm, lambda, 0.0).unwrap();
        assert!(disp.modes.iter().all(|m| m.decay >= floor - 1e-9));
        let disp = dispersion(&geom, &cm, 12.0, 0.0).unwrap();
        assert!(disp.modes.iter().all(|m| (m.decay - 1.0).abs() < 1e-9));
    }

    #[test]
    fn most_subradiant_rate_decreases_with_n() {
        let mut last = f64::INFINITY;
        for n in [20, 40, 80] {
            let geom = build_ring(n, 0.05, Polarization::Perpendicular).unwrap();
            let cm = coupling_matrices(&geom, 1.0).unwrap();
            let disp = dispersion(&geom, &cm, 0.0, 0.0).unwrap();
            let min = disp.modes.iter().map(|m| m.decay).fold(f64::INFINITY, f64::min);
            assert!(min < last, "N = {n}: {min} !< {last}");
            last = min;
        }
    }
}
