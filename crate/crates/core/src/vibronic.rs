//! Vibronic and thermal analytics: Huang–Rhys factors, Franck–Condon weights,
//! thermal displacement traces, renormalized couplings and collective decay
//! rates, and the superradiance criterion.

use serde::{Deserialize, Serialize};

use crate::coupling::{circulant_spectrum, CouplingMatrices};
use crate::{Error, Result};

/// Tolerance used to decide whether a coupling matrix is circulant.
const CIRCULANT_TOL: f64 = 1e-9;

/// Which vibrational collapse operator is used for relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollapseConvention {
    /// Bare `b_j`.
    Local,
    /// `b_j − λ σ_j†σ_j`, relaxing toward the displaced excited-state minimum.
    #[default]
    PolaronCorrected,
}

/// One intramolecular vibrational mode per molecule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VibronicParams {
    /// Dimensionless vibronic coupling `λ` (Huang–Rhys factor `λ²`).
    pub lambda: f64,
    /// Vibrational frequency `ν` in units of `Γ0`.
    pub nu: f64,
    /// Vibrational relaxation rate `Γ_ν`.
    pub gamma_nu: f64,
    /// Fock truncation per mode.
    pub n_max: usize,
    #[serde(default)]
    pub collapse_convention: CollapseConvention,
}

impl VibronicParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::param("vibronic.lambda", "must be finite and >= 0"));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::param("vibronic.nu", "must be finite and > 0"));
        }
        if !(self.gamma_nu >= 0.0 && self.gamma_nu.is_finite()) {
            return Err(Error::param("vibronic.gamma_nu", "must be finite and >= 0"));
        }
        if self.n_max < 1 {
            return Err(Error::param("vibronic.n_max", "must be >= 1"));
        }
        Ok(())
    }
}

/// Thermal state of the vibrational bath, by occupancy or temperature.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalEnvironment {
    /// Mean thermal occupancy `n̄`.
    pub nbar: f64,
    /// Temperature in frequency units (`k_B T/ħ` in units of `Γ0`), if given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
}

impl ThermalEnvironment {
    pub fn from_nbar(nbar: f64) -> Self {
        Self { nbar, temperature: None }
    }

    pub fn from_temperature(nu: f64, temperature: f64) -> Self {
        Self { nbar: thermal_occupancy(nu, temperature), temperature: Some(temperature) }
    }
}

/// Parameters of the ground/excited harmonic potentials of one molecule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MolecularPotentialParams {
    /// Reduced mass `μ`.
    pub mu: f64,
    /// Offset `R_ge` between ground and excited potential minima.
    pub r_ge: f64,
    /// Vibrational frequency `ν`.
    pub nu: f64,
}

/// Bose occupancy `n̄ = 1/(e^{ν/T} − 1)`; `T = 0` gives 0.
pub fn thermal_occupancy(nu: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        0.0
    } else {
        1.0 / (nu / temperature).exp_m1()
    }
}

/// `λ = μν R_ge q_zpm` with `q_zpm = 1/√(2μν)`, i.e. `λ = √(μν/2)·R_ge`.
pub fn huang_rhys_from_geometry(p: &MolecularPotentialParams) -> f64 {
    (p.mu * p.nu / 2.0).sqrt() * p.r_ge
}

/// Thermal trace of displacement operators between two sites:
/// `exp(−λ²(1+2n̄))` for distinct sites, `1` for the same site.
pub fn thermal_displacement_factor(lambda: f64, nbar: f64, same_site: bool) -> f64 {
    if same_site {
        1.0
    } else {
        (-lambda * lambda * (1.0 + 2.0 * nbar)).exp()
    }
}

/// Poissonian Franck–Condon weight `P(n) = e^{−λ²} λ^{2n} / n!`.
pub fn franck_condon_distribution(lambda: f64, n: usize) -> f64 {
    let l2 = lambda * lambda;
    if l2 == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let ln_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    (-l2 + n as f64 * l2.ln() - ln_fact).exp()
}

/// Off-diagonal `Ω` and `Γ` multiplied by the thermal displacement factor;
/// diagonals unchanged.
pub fn renormalized_couplings(cm: &CouplingMatrices, lambda: f64, nbar: f64) -> CouplingMatrices {
    let f = thermal_displacement_factor(lambda, nbar, false);
    let mut out = cm.clone();
    let n = cm.n();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out.omega[(i, j)] *= f;
                out.gamma[(i, j)] *= f;
            }
        }
    }
    out
}

/// DFT of the first row of `Γ` for a circulant (ring) coupling matrix:
/// the bare collective decay rates `Γ_k^{λ=0}`, `k = 0` symmetric.
pub fn bare_collective_decay_rates(cm: &CouplingMatrices) -> Result<Vec<f64>> {
    circulant_spectrum(&cm.gamma, CIRCULANT_TOL)
}

/// Renormalized collective decay rates
/// `Γ_k^λ = Γ0[1 − f] + Γ_k^{λ=0} f`, `f = exp(−λ²(1+2n̄))`.
pub fn collective_decay_rates(cm: &CouplingMatrices, lambda: f64, nbar: f64) -> Result<Vec<f64>> {
    let f = thermal_displacement_factor(lambda, nbar, false);
    Ok(bare_collective_decay_rates(cm)?
        .into_iter()
        .map(|g| cm.gamma0 * (1.0 - f) + g * f)
        .collect())
}

/// Right-hand side factor `(1 + e^{−2λ²(1+2n̄)}) / e^{−2λ²(1+2n̄)}` of the
/// superradiance condition.
pub fn superradiance_threshold_factor(lambda: f64, nbar: f64) -> f64 {
    let f2 = thermal_displacement_factor(lambda, nbar, false).powi(2);
    (1.0 + f2) / f2
}

/// True iff `Σ_k (Γ_k^{λ=0})² > [(1+e^{−2λ²(1+2n̄)})/e^{−2λ²(1+2n̄)}]·N·Γ0²`
/// (with `Γ0 = 1`): the fully inverted array initially emits with a positive
/// intensity slope.
pub fn superradiance_criterion(bare_rates: &[f64], lambda: f64, nbar: f64, n: usize) -> bool {
    let lhs: f64 = bare_rates.iter().map(|g| g * g).sum();
    lhs > superradiance_threshold_factor(lambda, nbar) * n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::coupling_matrices;
    use crate::geometry::{build_ring, Polarization};

    fn ring(n: usize, d: f64) -> CouplingMatrices {
        coupling_matrices(&build_ring(n, d, Polarization::Perpendicular).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn occupancy_limits() {
        assert_eq!(thermal_occupancy(3.0, 0.0), 0.0);
        let nu = 2.5;
        assert!((thermal_occupancy(nu, nu / 2.0_f64.ln()) - 1.0).abs() < 1e-12);
        let high = thermal_occupancy(nu, 100.0 * nu);
        assert!((high / 100.0 - 1.0).abs() < 0.01);
        let env = ThermalEnvironment::from_temperature(nu, 1.7);
        assert!((env.nbar - 1.0 / ((nu / 1.7).exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn huang_rhys_substitution() {
        let p = |r_ge| MolecularPotentialParams { mu: 1.0, nu: 2.0, r_ge };
        assert_eq!(huang_rhys_from_geometry(&p(0.0)), 0.0);
        assert!((huang_rhys_from_geometry(&p(0.15)) - 0.15).abs() < 1e-15);
        assert!((huang_rhys_from_geometry(&p(0.3)) - 2.0 * huang_rhys_from_geometry(&p(0.15))).abs() < 1e-15);
    }

    #[test]
    fn displacement_factor_values() {
        assert_eq!(thermal_displacement_factor(0.0, 3.0, false), 1.0);
        assert_eq!(thermal_displacement_factor(0.7, 3.0, true), 1.0);
        assert!((thermal_displacement_factor(0.4, 0.0, false) - (-0.16f64).exp()).abs() < 1e-15);
        assert!((thermal_displacement_factor(0.15, 0.0, false) - 0.977751).abs() < 5e-7);
    }

    #[test]
    fn franck_condon_weights() {
        assert_eq!(franck_condon_distribution(0.0, 0), 1.0);
        assert_eq!(franck_condon_distribution(0.0, 3), 0.0);
        assert!((franck_condon_distribution(1.0, 1) - 0.367879).abs() < 5e-7);
        for lambda in [0.1, 0.5, 1.0] {
            let total: f64 = (0..=50).map(|n| franck_condon_distribution(lambda, n)).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn renormalization_scales_off_diagonals() {
        let cm = ring(2, 1.0 / 40.0);
        assert_eq!(renormalized_couplings(&cm, 0.0, 0.0), cm);
        let r = renormalized_couplings(&cm, 0.15, 0.0);
        let f = (-0.0225f64).exp();
        assert!((r.omega[(0, 1)] - f * cm.omega[(0, 1)]).abs() < 1e-12);
        assert!((r.omega[(0, 1)] - 186.85).abs() < 0.1);
        assert_eq!(r.gamma[(0, 0)], 1.0);
        let strong = renormalized_couplings(&cm, 10.0, 0.0);
        assert!(strong.omega[(0, 1)].abs() < 1e-30 && strong.gamma[(0, 1)].abs() < 1e-40);
    }

    #[test]
    fn dicke_limit_collective_rates() {
        let n = 6;
        let cm = ring(n, 1e-4);
        let bare = collective_decay_rates(&cm, 0.0, 0.0).unwrap();
        assert!((bare[0] / n as f64 - 1.0).abs() < 1e-3);
        let lambda: f64 = 0.4;
        let f = (-lambda * lambda).exp();
        let dressed = collective_decay_rates(&cm, lambda, 0.0).unwrap();
        assert!((dressed[0] - (1.0 + f * (n as f64 - 1.0))).abs() < 1e-3);
        for g in &dressed[1..] {
            assert!((g - (1.0 - f)).abs() < 1e-3);
        }
        let f_hot = thermal_displacement_factor(lambda, 1.0, false);
        let hot = collective_decay_rates(&cm, lambda, 1.0).unwrap();
        assert!((hot[3] - (1.0 - f_hot)).abs() < 1e-3);
    }

    #[test]
    fn collective_rates_reject_non_circulant_input() {
        let geom = crate::geometry::build_chain(4, 0.1).unwrap();
        let cm = coupling_matrices(&geom, 1.0).unwrap();
        assert!(matches!(collective_decay_rates(&cm, 0.1, 0.0), Err(Error::NotCirculant { .. })));
    }

    #[test]
    fn criterion_in_dicke_limit() {
        // Dicke limit rates: Γ_S = N, all others 0.
        let dicke = |n: usize| {
            let mut r = vec![0.0; n];
            r[0] = n as f64;
            r
        };
        assert!(!superradiance_criterion(&dicke(2), 0.0, 0.0, 2));
        assert!(superradiance_criterion(&dicke(3), 0.0, 0.0, 3));
        assert!(!superradiance_criterion(&dicke(8), 1.3, 0.0, 8));
        // Boundary λ² = ln(N−1)/2.
        let lb = (7.0f64.ln() / 2.0).sqrt();
        assert!(superradiance_criterion(&dicke(8), lb - 1e-3, 0.0, 8));
        assert!(!superradiance_criterion(&dicke(8), lb + 1e-3, 0.0, 8));
    }

    #[test]
    fn criterion_for_fig2_ring() {
        let cm = ring(8, 0.04);
        let bare = bare_collective_decay_rates(&cm).unwrap();
        assert!(superradiance_criterion(&bare, 0.15, 0.0, 8));
        // At λ = 0 the factor is exactly 2: Σ Γ_k² > 2NΓ0².
        assert_eq!(superradiance_threshold_factor(0.0, 0.0), 2.0);
    }
}
