//! Collective basis of a ring: symmetric and antisymmetric operators, mode
//! energies and decay rates, Dicke ladder coefficients, state-dependent
//! branching rates and the vibrationally mediated collective couplings.

use serde::{Deserialize, Serialize};

use crate::coupling::{circulant_spectrum, CouplingMatrices};
use crate::quantum_core::{lowering_operator, HilbertLayout, SparseOperator};
use crate::vibronic::{collective_decay_rates, renormalized_couplings};
use crate::{Error, Result, C64};

/// Tolerance used to accept a coupling matrix as circulant.
const CIRCULANT_TOL: f64 = 1e-9;

/// One collective ring mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollectiveMode {
    /// Mode index `0..N`, `k = 0` the symmetric mode.
    pub k: usize,
    /// Coherent shift `Ω^λ_k`.
    pub energy_shift: f64,
    /// Decay rate `Γ^λ_k`.
    pub decay: f64,
}

/// `(1/√N) Σ_j σ_j e^{2πi j k/N}` over electronic sites `0..N` of `layout`,
/// with the site label `j` counted from 1.
pub fn collective_operator(layout: &HilbertLayout, n: usize, k: usize) -> Result<SparseOperator> {
    if n == 0 || k >= n {
        return Err(Error::param("k", format!("mode {k} out of range for N = {n}")));
    }
    let ops: Vec<SparseOperator> = (0..n).map(|j| lowering_operator(layout, j)).collect::<Result<_>>()?;
    let norm = 1.0 / (n as f64).sqrt();
    let terms: Vec<(C64, &SparseOperator)> = ops
        .iter()
        .enumerate()
        .map(|(j, op)| {
            let phase = 2.0 * std::f64::consts::PI * ((j + 1) * k) as f64 / n as f64;
            (C64::from_polar(norm, phase), op)
        })
        .collect();
    SparseOperator::linear_combination(layout.total_dim(), &terms)
}

/// Symmetric operator `S`.
pub fn symmetric_operator(layout: &HilbertLayout, n: usize) -> Result<SparseOperator> {
    collective_operator(layout, n, 0)
}

/// Collective shifts `Ω^λ_k` and decay rates `Γ^λ_k` of a ring.
pub fn collective_modes(cm: &CouplingMatrices, lambda: f64, nbar: f64) -> Result<Vec<CollectiveMode>> {
    let renorm = renormalized_couplings(cm, lambda, nbar);
    let shifts = circulant_spectrum(&renorm.omega, CIRCULANT_TOL)?;
    let decays = collective_decay_rates(cm, lambda, nbar)?;
    Ok((0..cm.n()).map(|k| CollectiveMode { k, energy_shift: shifts[k], decay: decays[k] }).collect())
}

/// Dicke ladder coefficients `α_m^(±) = √((N/2 ∓ m)(N/2 ± m + 1))/√N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DickeCoefficients {
    pub n: usize,
    /// `α^(+)` indexed by `m + N/2` (`m = −N/2, …, N/2`).
    pub alpha_plus: Vec<f64>,
    /// `α^(−)` indexed by `m + N/2`.
    pub alpha_minus: Vec<f64>,
}

impl DickeCoefficients {
    /// Table index of `m` (`m` given as `2m` to stay integral for odd `N`).
    fn slot(&self, two_m: i64) -> Result<usize> {
        let n = self.n as i64;
        if two_m.abs() > n || (two_m + n) % 2 != 0 {
            return Err(Error::param("m", format!("2m = {two_m} not on the ladder of N = {n}")));
        }
        Ok(((two_m + n) / 2) as usize)
    }

    /// `α_m^(−)` for `m = two_m / 2`.
    pub fn lowering(&self, two_m: i64) -> Result<f64> {
        Ok(self.alpha_minus[self.slot(two_m)?])
    }

    /// `α_m^(+)` for `m = two_m / 2`.
    pub fn raising(&self, two_m: i64) -> Result<f64> {
        Ok(self.alpha_plus[self.slot(two_m)?])
    }
}

/// Dicke ladder for `N` emitters.
pub fn dicke_ladder(n: usize) -> Result<DickeCoefficients> {
    if n == 0 {
        return Err(Error::param("N", "must be >= 1"));
    }
    let half = n as f64 / 2.0;
    let norm = (n as f64).sqrt();
    let mut alpha_plus = Vec::with_capacity(n + 1);
    let mut alpha_minus = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let m = i as f64 - half;
        alpha_plus.push(((half - m) * (half + m + 1.0)).max(0.0).sqrt() / norm);
        alpha_minus.push(((half + m) * (half - m + 1.0)).max(0.0).sqrt() / norm);
    }
    Ok(DickeCoefficients { n, alpha_plus, alpha_minus })
}

/// State-dependent decay rates of the Dicke state `|N/2, m⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchingRates {
    /// `Γ_{S,m} = (α_m^(−))² Γ_S^{λ=0}`.
    pub symmetric: f64,
    /// `Γ_{k,m} = (α_m^(−))² Γ_k^{λ=0}/(N−1)` for `k = 1..N−1`.
    pub dark: Vec<f64>,
}

impl BranchingRates {
    /// `Γ_{S,m} / Σ_k Γ_{k,m}` (infinite when the dark rates vanish).
    pub fn symmetric_dominance(&self) -> f64 {
        self.symmetric / self.dark.iter().sum::<f64>()
    }
}

/// Branching of losses from `|N/2, m⟩` (`m = two_m/2`) into the symmetric
/// and dark channels, using the bare (λ = 0) collective rates.
pub fn branching_rates(cm: &CouplingMatrices, two_m: i64) -> Result<BranchingRates> {
    let n = cm.n();
    if n < 2 {
        return Err(Error::param("N", "branching needs at least two emitters"));
    }
    let rates = circulant_spectrum(&cm.gamma, CIRCULANT_TOL)?;
    let a2 = dicke_ladder(n)?.lowering(two_m)?.powi(2);
    Ok(BranchingRates {
        symmetric: a2 * rates[0],
        dark: rates[1..].iter().map(|g| a2 * g / (n as f64 - 1.0)).collect(),
    })
}

/// Vibronic coupling `⟨S, n|H|A_k, n+1⟩ = √((n+1)/N) λν` (independent of `k`).
pub fn vibronic_collective_coupling(n_emitters: usize, lambda: f64, nu: f64, n: usize) -> f64 {
    ((n + 1) as f64 / n_emitters as f64).sqrt() * lambda * nu
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::coupling_matrices;
    use crate::dynamics::{build_hamiltonian, ModelMode, SystemModel};
    use crate::geometry::{build_ring, Polarization};
    use crate::vibronic::{CollapseConvention, VibronicParams};
    use nalgebra::DVector;

    #[test]
    fn dimer_operators_are_symmetric_and_antisymmetric() {
        let layout = HilbertLayout::two_level_sites(2);
        let s = symmetric_operator(&layout, 2).unwrap().to_dense();
        let a = collective_operator(&layout, 2, 1).unwrap().to_dense();
        let s1 = lowering_operator(&layout, 0).unwrap().to_dense();
        let s2 = lowering_operator(&layout, 1).unwrap().to_dense();
        let r = C64::new(1.0 / 2f64.sqrt(), 0.0);
        assert!((&s - (&s1 + &s2) * r).norm() < 1e-14);
        // e^{iπ j} with j = 1, 2 gives (−σ1 + σ2)/√2: antisymmetric up to sign.
        assert!((&a - (&s2 - &s1) * r).norm() < 1e-14);
    }

    #[test]
    fn collective_operators_are_orthogonal() {
        let n = 4;
        let layout = HilbertLayout::two_level_sites(n);
        let ops: Vec<_> = (0..n).map(|k| collective_operator(&layout, n, k).unwrap().to_dense()).collect();
        let g = |a: &nalgebra::DMatrix<C64>, b: &nalgebra::DMatrix<C64>| (a.adjoint() * b).trace();
        let norm = g(&ops[0], &ops[0]).re;
        for k in 0..n {
            for kp in 0..n {
                let v = g(&ops[k], &ops[kp]);
                let expect = if k == kp { norm } else { 0.0 };
                assert!((v - C64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
        // [S, A_k†] annihilates the ground state for k ≠ 0.
        let ground = DVector::from_fn(layout.total_dim(), |i, _| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0));
        for a in &ops[1..] {
            let comm = &ops[0] * a.adjoint() - a.adjoint() * &ops[0];
            assert!((comm * &ground).norm() < 1e-12);
        }
    }

    #[test]
    fn dicke_coefficients() {
        let d = dicke_ladder(2).unwrap();
        assert!((d.lowering(2).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(d.raising(2).unwrap(), 0.0);
        assert_eq!(d.lowering(-2).unwrap(), 0.0);
        // Cascade from the top: Σ_m N (α_m^(−))² / (N α_m^(−)²) photons — one per step;
        // the rate-weighted sum N Σ_m (α_m^(−))² equals the total ladder weight.
        for n in 1..10usize {
            let d = dicke_ladder(n).unwrap();
            let steps = d.alpha_minus.iter().filter(|a| **a > 0.0).count();
            assert_eq!(steps, n);
            let total: f64 = d.alpha_minus.iter().map(|a| a * a * n as f64).sum();
            let expect: f64 = (0..=n).map(|i| (i * (n - i + 1)) as f64).sum();
            assert!((total - expect).abs() < 1e-9);
        }
        assert!(d_is_err(dicke_ladder(3).unwrap().lowering(2)));
    }

    fn d_is_err(r: Result<f64>) -> bool {
        r.is_err()
    }

    #[test]
    fn symmetric_channel_dominates_for_dense_ring() {
        let geom = build_ring(14, 0.1, Polarization::Perpendicular).unwrap();
        let cm = coupling_matrices(&geom, 1.0).unwrap();
        for two_m in (-12..=14).step_by(2) {
            let b = branching_rates(&cm, two_m).unwrap();
            assert!(b.symmetric_dominance() > 5.0, "m = {two_m}/2: {}", b.symmetric_dominance());
        }
        let b = branching_rates(&cm, -14).unwrap();
        assert_eq!(b.symmetric, 0.0);
        assert!(b.dark.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn mode_shifts_diagonalize_the_hopping_matrix() {
        let geom = build_ring(6, 0.07, Polarization::Perpendicular).unwrap();
        let cm = coupling_matrices(&geom, 1.0).unwrap();
        let modes = collective_modes(&cm, 0.2, 0.5).unwrap();
        let renorm = renormalized_couplings(&cm, 0.2, 0.5);
        let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(renorm.omega).eigenvalues.iter().copied().collect();
        let mut shifts: Vec<f64> = modes.iter().map(|m| m.energy_shift).collect();
        ev.sort_by(f64::total_cmp);
        shifts.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&shifts) {
            assert!((a - b).abs() < 1e-10);
        }
        let total: f64 = modes.iter().map(|m| m.decay).sum();
        assert!((total - 6.0).abs() < 1e-10);
    }

    #[test]
    fn vibronic_coupling_matches_hamiltonian_element() {
        let n = 3;
        let (lambda, nu) = (0.3, 2.0);
        assert!((vibronic_collective_coupling(n, lambda, nu, 0) - lambda * nu / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(vibronic_collective_coupling(n, 0.0, nu, 2), 0.0);
        let geom = build_ring(n, 0.2, Polarization::Perpendicular).unwrap();
        let cm = coupling_matrices(&geom, 1.0).unwrap();
        let mut m = SystemModel::new(geom.positions.clone(), cm, ModelMode::Full);
        m.vib = Some(VibronicParams { lambda, nu, gamma_nu: 0.0, n_max: 2, collapse_convention: CollapseConvention::Local });
        let layout = m.layout().unwrap();
        let h = build_hamiltonian(&m, &layout).unwrap();
        // Collective vibrational creation operators c_q† = (1/√N) Σ_j e^{−2πi j q/N} b_j†.
        let dim = layout.total_dim();
        let bdag: Vec<SparseOperator> =
            (0..n).map(|j| crate::quantum_core::boson_annihilation(&layout, n + j).unwrap().adjoint()).collect();
        let c_dag = |q: usize| {
            let terms: Vec<(C64, &SparseOperator)> = bdag
                .iter()
                .enumerate()
                .map(|(j, b)| (C64::from_polar(1.0 / (n as f64).sqrt(), -2.0 * std::f64::consts::PI * ((j + 1) * q) as f64 / n as f64), b))
                .collect();
            SparseOperator::linear_combination(dim, &terms).unwrap()
        };
        let vacuum: Vec<C64> = (0..dim).map(|i| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0)).collect();
        let excite = |op: &SparseOperator, v: &[C64]| op.adjoint().apply(v);
        for vib_n in 0..2usize {
            for k in 1..n {
                let mut best: f64 = 0.0;
                for q in 0..n {
                    let cq = c_dag(q);
                    let mut bra = excite(&collective_operator(&layout, n, 0).unwrap(), &vacuum);
                    let mut ket = excite(&collective_operator(&layout, n, k).unwrap(), &vacuum);
                    for _ in 0..vib_n {
                        bra = cq.apply(&bra);
                    }
                    for _ in 0..=vib_n {
                        ket = cq.apply(&ket);
                    }
                    let nb: f64 = bra.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                    let nk: f64 = ket.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                    let hk = h.apply(&ket);
                    let elem: C64 = bra.iter().zip(&hk).map(|(a, b)| a.conj() * b).sum::<C64>() / (nb * nk);
                    best = best.max(elem.norm());
                }
                let expect = vibronic_collective_coupling(n, lambda, nu, vib_n);
                assert!((best - expect).abs() < 1e-10, "n = {vib_n}, k = {k}: {best} vs {expect}");
            }
        }
    }
}
