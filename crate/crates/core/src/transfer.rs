//! Vibrationally mediated transfer from the symmetric (bright) state into
//! antisymmetric (dark) states: closed-form transfer rates for dimers and
//! rings, the population rate equations, and a cross-check of both against
//! the full vibronic master equation of a dimer.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::collective::{collective_modes, collective_operator};
use crate::coupling::{coupling_matrices, CouplingMatrices};
use crate::dynamics::{build_spec, evolve_with, EvolveDiagnostics, EvolveOptions, ModelMode, SystemModel};
use crate::geometry::build_dimer;
use crate::quantum_core::{lowering_operator, trace_product, DensityMatrix, HilbertLayout, SparseOperator};
use crate::vibronic::{thermal_displacement_factor, CollapseConvention, ThermalEnvironment, VibronicParams};
use crate::{Error, Result, C64};

/// Smallest `|E⟩` population used when fitting its exponential decay.
const E_DECAY_FIT_FLOOR: f64 = 1e-4;

/// Which closed form of the transfer rate to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferVariant {
    /// Lorentzian of half width `Γ_ν/2`.
    #[default]
    VibrationalWidth,
    /// Lorentzian of half width `(Γ_ν + Γ_k − Γ_S)/2` (`(Γ_ν + Γ_S − Γ_k)/2`
    /// for the back transfer), from the Heisenberg-equation derivation with
    /// fast vibrational relaxation.
    ElectronicCorrected,
}

/// Transfer between the symmetric state and one dark mode `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeTransfer {
    pub k: usize,
    /// `κ_{S→A_k}` in units of `Γ0`.
    pub kappa_s_to_a: f64,
    /// `κ_{A_k→S}` in units of `Γ0`.
    pub kappa_a_to_s: f64,
    /// `Ω_S − Ω_k − ν`.
    pub resonance_detuning: f64,
}

/// Transfer rates into every dark mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferRates {
    pub modes: Vec<ModeTransfer>,
}

impl TransferRates {
    /// `Σ_k κ_{S→A_k}`: the extra loss rate of the symmetric state.
    pub fn total_s_to_a(&self) -> f64 {
        self.modes.iter().map(|m| m.kappa_s_to_a).sum()
    }
}

/// `λ²ν² w / (w² + δ²)` with half width `w`.
fn lorentzian_rate(lambda: f64, nu: f64, half_width: f64, detuning: f64) -> f64 {
    lambda * lambda * nu * nu * half_width / (half_width * half_width + detuning * detuning)
}

fn half_widths(variant: TransferVariant, gamma_nu: f64, gamma_s: f64, gamma_a: f64) -> Result<(f64, f64)> {
    let (fwd, back) = match variant {
        TransferVariant::VibrationalWidth => (gamma_nu, gamma_nu),
        TransferVariant::ElectronicCorrected => (gamma_nu + gamma_a - gamma_s, gamma_nu + gamma_s - gamma_a),
    };
    if !(fwd > 0.0 && back > 0.0) {
        return Err(Error::param(
            "gamma_nu",
            format!("transfer linewidths must be positive (got {fwd} and {back}); Γ_ν must exceed |Γ_S − Γ_A|"),
        ));
    }
    Ok((fwd / 2.0, back / 2.0))
}

fn mode_transfer(
    k: usize,
    lambda: f64,
    nu: f64,
    gamma_nu: f64,
    splitting: f64,
    gamma_s: f64,
    gamma_a: f64,
    variant: TransferVariant,
) -> Result<ModeTransfer> {
    let (w_fwd, w_back) = half_widths(variant, gamma_nu, gamma_s, gamma_a)?;
    Ok(ModeTransfer {
        k,
        kappa_s_to_a: lorentzian_rate(lambda, nu, w_fwd, splitting - nu),
        kappa_a_to_s: lorentzian_rate(lambda, nu, w_back, splitting + nu),
        resonance_detuning: splitting - nu,
    })
}

fn check_vibronic(lambda: f64, nu: f64, gamma_nu: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::param("lambda", "must be finite and >= 0"));
    }
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::param("nu", "must be finite and > 0"));
    }
    if !(gamma_nu > 0.0 && gamma_nu.is_finite()) {
        return Err(Error::param("gamma_nu", "must be finite and > 0"));
    }
    Ok(())
}

/// Dimer transfer rates for symmetric/antisymmetric splitting `2Ω`.
pub fn dimer_transfer_rates(
    lambda: f64,
    nu: f64,
    gamma_nu: f64,
    omega: f64,
    gamma_s: f64,
    gamma_a: f64,
    variant: TransferVariant,
) -> Result<TransferRates> {
    check_vibronic(lambda, nu, gamma_nu)?;
    let mode = mode_transfer(1, lambda, nu, gamma_nu, 2.0 * omega, gamma_s, gamma_a, variant)?;
    Ok(TransferRates { modes: vec![mode] })
}

/// Transfer rates from the symmetric mode into each dark mode `k = 1..N` of
/// a ring, with resonance at `ν = Ω^λ_S − Ω^λ_k` (renormalized shifts at
/// zero temperature).
pub fn ring_transfer_rates(
    cm: &CouplingMatrices,
    lambda: f64,
    nu: f64,
    gamma_nu: f64,
    variant: TransferVariant,
) -> Result<TransferRates> {
    check_vibronic(lambda, nu, gamma_nu)?;
    let modes = collective_modes(cm, lambda, 0.0)?;
    let s = modes[0];
    let modes = modes[1..]
        .iter()
        .map(|m| mode_transfer(m.k, lambda, nu, gamma_nu, s.energy_shift - m.energy_shift, s.decay, m.decay, variant))
        .collect::<Result<_>>()?;
    Ok(TransferRates { modes })
}

/// Source term from the doubly excited state `|E⟩`, which decays at
/// `to_symmetric + to_antisymmetric` into the two single-excitation states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeFeed {
    pub p_e0: f64,
    pub to_symmetric: f64,
    pub to_antisymmetric: f64,
}

/// Population traces of the rate model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePopulations {
    pub times: Vec<f64>,
    pub p_e: Vec<f64>,
    pub p_s: Vec<f64>,
    pub p_a: Vec<f64>,
}

/// Closed-form solution of the symmetric/antisymmetric rate equations
///
/// `ṗ_S = −(Γ_S + κ_{S→A}) p_S + κ_{A→S} p_A (+ feed)`,
/// `ṗ_A = −(Γ_A + κ_{A→S}) p_A + κ_{S→A} p_S (+ feed)`,
///
/// by the matrix exponential of the rate matrix at every grid time.
pub fn rate_equation_evolution(
    p_s0: f64,
    p_a0: f64,
    rates: &ModeTransfer,
    gamma_s: f64,
    gamma_a: f64,
    cascade: Option<&CascadeFeed>,
    t_grid: &[f64],
) -> Result<RatePopulations> {
    let in_unit = |v: f64| (0.0..=1.0).contains(&v);
    let p_e0 = cascade.map_or(0.0, |c| c.p_e0);
    if !in_unit(p_s0) || !in_unit(p_a0) || !in_unit(p_e0) || p_s0 + p_a0 + p_e0 > 1.0 + 1e-12 {
        return Err(Error::param("populations", "must lie in [0, 1] and sum to at most 1"));
    }
    let (to_s, to_a) = cascade.map_or((0.0, 0.0), |c| (c.to_symmetric, c.to_antisymmetric));
    let all = [gamma_s, gamma_a, rates.kappa_s_to_a, rates.kappa_a_to_s, to_s, to_a];
    if all.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
        return Err(Error::param("rates", "all rates must be finite and >= 0"));
    }
    let (ksa, kas) = (rates.kappa_s_to_a, rates.kappa_a_to_s);
    #[rustfmt::skip]
    let m = Matrix3::new(
        -(to_s + to_a), 0.0,             0.0,
        to_s,           -(gamma_s + ksa), kas,
        to_a,           ksa,             -(gamma_a + kas),
    );
    let p0 = Vector3::new(p_e0, p_s0, p_a0);
    let mut out = RatePopulations { times: t_grid.to_vec(), p_e: vec![], p_s: vec![], p_a: vec![] };
    for &t in t_grid {
        let p = (m * t).exp() * p0;
        out.p_e.push(p[0]);
        out.p_s.push(p[1]);
        out.p_a.push(p[2]);
    }
    Ok(out)
}

/// Full-model dimer run compared with the rate equations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimerTransferConfig {
    /// Separation in units of `λ0` (dipoles perpendicular to the axis).
    pub d: f64,
    pub lambda: f64,
    /// Vibrational frequency; defaults to the resonance `2Ω(d)`.
    #[serde(default)]
    pub nu: Option<f64>,
    pub gamma_nu: f64,
    pub n_max: usize,
    #[serde(default)]
    pub variant: TransferVariant,
    pub t_final: f64,
    pub n_times: usize,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
}

fn default_rtol() -> f64 {
    1e-8
}

fn default_atol() -> f64 {
    1e-10
}

impl DimerTransferConfig {
    /// Dimer at `d = λ0/40` with `ν = 2Ω`, `Γ_ν = 30Γ0`, `λ = 0.1`.
    pub fn resonant_reference() -> Self {
        Self {
            d: 1.0 / 40.0,
            lambda: 0.1,
            nu: None,
            gamma_nu: 30.0,
            n_max: 4,
            variant: TransferVariant::VibrationalWidth,
            t_final: 5.0,
            n_times: 501,
            rtol: default_rtol(),
            atol: default_atol(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::param("d", "must be finite and > 0"));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::param("t_final", "must be finite and > 0"));
        }
        if self.n_times < 2 {
            return Err(Error::param("n_times", "must be >= 2"));
        }
        if self.n_max < 1 {
            return Err(Error::param("n_max", "must be >= 1"));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let n = self.n_times;
        (0..n).map(|i| self.t_final * i as f64 / (n - 1) as f64).collect()
    }
}

/// Population traces of the full model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullPopulations {
    pub times: Vec<f64>,
    pub p_e: Vec<f64>,
    pub p_s: Vec<f64>,
    pub p_a: Vec<f64>,
}

/// Outcome of [`validate_against_full_model`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferComparison {
    /// Bare dipole-dipole shift `Ω(d)`.
    pub omega: f64,
    pub nu: f64,
    /// Vibrationally renormalized decay rates used by the rate model.
    pub gamma_s: f64,
    pub gamma_a: f64,
    /// Closed-form rates.
    pub rates: ModeTransfer,
    /// Decay rate of `|E⟩` fitted from the full model, used as cascade feed.
    pub e_decay_rate: f64,
    /// `κ_{S→A}` extracted from a full-model run started in `|S⟩` by the
    /// balance `p_A(T) + ∫(Γ_A + κ_{A→S}) p_A = κ_{S→A} ∫ p_S`.
    pub kappa_extracted: f64,
    /// Full model started in `|E⟩`.
    pub full: FullPopulations,
    /// Full model started in `|S⟩`, used for the rate extraction.
    pub from_symmetric: FullPopulations,
    pub rate: RatePopulations,
    /// `max_t |p_A^full − p_A^rate|`.
    pub max_p_a_discrepancy: f64,
    pub peak_p_a_full: f64,
    pub peak_p_a_rate: f64,
    /// `|t_peak^full − t_peak^rate|`.
    pub peak_time_discrepancy: f64,
    pub diagnostics: EvolveDiagnostics,
}

struct DimerProjectors {
    p_e: SparseOperator,
    p_s: SparseOperator,
    p_a: SparseOperator,
}

fn dimer_projectors(layout: &HilbertLayout) -> Result<DimerProjectors> {
    let n1 = {
        let s = lowering_operator(layout, 0)?;
        s.adjoint().mul(&s)?
    };
    let n2 = {
        let s = lowering_operator(layout, 1)?;
        s.adjoint().mul(&s)?
    };
    let p_e = n1.mul(&n2)?;
    let proj = |k: usize| -> Result<SparseOperator> {
        let c = collective_operator(layout, 2, k)?;
        c.adjoint().mul(&c)?.sub(&p_e)
    };
    Ok(DimerProjectors { p_s: proj(0)?, p_a: proj(1)?, p_e })
}

fn run_full(
    model: &SystemModel,
    start: &[usize],
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<(FullPopulations, EvolveDiagnostics)> {
    let (layout, spec) = build_spec(model)?;
    let proj = dimer_projectors(&layout)?;
    let dim = layout.total_dim();
    let mut psi = vec![C64::new(0.0, 0.0); dim];
    match start {
        [a] => psi[*a] = C64::new(1.0, 0.0),
        [a, b] => {
            // Symmetric superposition of two basis states.
            let amp = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            psi[*a] = amp;
            psi[*b] = amp;
        }
        _ => return Err(Error::param("start", "one or two basis states expected")),
    }
    let rho0 = DensityMatrix::pure(&psi);
    let mut pops = FullPopulations { times: times.to_vec(), p_e: vec![], p_s: vec![], p_a: vec![] };
    let diag = evolve_with(&spec, &rho0, times, opts, |_, _, rho| {
        pops.p_e.push(trace_product(&proj.p_e, rho)?.re);
        pops.p_s.push(trace_product(&proj.p_s, rho)?.re);
        pops.p_a.push(trace_product(&proj.p_a, rho)?.re);
        Ok(())
    })?;
    Ok((pops, diag))
}

fn trapezoid(t: &[f64], y: &[f64]) -> f64 {
    t.windows(2).zip(y.windows(2)).map(|(tw, yw)| 0.5 * (tw[1] - tw[0]) * (yw[0] + yw[1])).sum()
}

/// Least-squares slope of `−ln p_E(t)` over points with `p_E` above the fit
/// floor.
fn fit_decay_rate(t: &[f64], p: &[f64]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = t.iter().zip(p).filter(|(_, &v)| v > E_DECAY_FIT_FLOOR).map(|(&t, &v)| (t, v.ln())).collect();
    if pts.len() < 3 {
        return Err(Error::param("n_times", "too few points to fit the |E> decay; refine the time grid"));
    }
    let n = pts.len() as f64;
    let (st, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t, b + y));
    let (mt, my) = (st / n, sy / n);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + (t - mt) * (y - my), b + (t - mt) * (t - mt)));
    Ok(-num / den)
}

fn peak(t: &[f64], y: &[f64]) -> (f64, f64) {
    t.iter().zip(y).fold((f64::NEG_INFINITY, 0.0), |(best, bt), (&t, &v)| if v > best { (v, t) } else { (best, bt) })
}

/// Run the full vibronic master equation of a dimer from `|E⟩` (and from
/// `|S⟩` for the rate extraction) and compare with the rate equations.
///
/// The rate model is fed from `|E⟩` at the decay rate fitted from the full
/// model, split between `|S⟩` and `|A⟩` in proportion `Γ_S : Γ_A`.
pub fn validate_against_full_model(cfg: &DimerTransferConfig) -> Result<TransferComparison> {
    cfg.validate()?;
    let geom = build_dimer(cfg.d)?;
    let cm = coupling_matrices(&geom, 1.0)?;
    let omega = cm.omega[(0, 1)];
    let nu = cfg.nu.unwrap_or(2.0 * omega);
    check_vibronic(cfg.lambda, nu, cfg.gamma_nu)?;
    let mut model = SystemModel::new(geom.positions.clone(), cm.clone(), ModelMode::Full);
    model.vib = Some(VibronicParams {
        lambda: cfg.lambda,
        nu,
        gamma_nu: cfg.gamma_nu,
        n_max: cfg.n_max,
        collapse_convention: CollapseConvention::PolaronCorrected,
    });
    model.thermal = ThermalEnvironment::from_nbar(0.0);
    let layout = model.layout()?;
    let opts = EvolveOptions { rtol: cfg.rtol, atol: cfg.atol, ..Default::default() };
    let times = cfg.times();

    let ee = layout.index(&[1, 1, 0, 0]);
    let (full, diag_e) = run_full(&model, &[ee], &times, &opts)?;
    let (eg, ge) = (layout.index(&[1, 0, 0, 0]), layout.index(&[0, 1, 0, 0]));
    let (from_s, diag_s) = run_full(&model, &[eg, ge], &times, &opts)?;

    let f = thermal_displacement_factor(cfg.lambda, 0.0, false);
    let g12 = cm.gamma[(0, 1)];
    let gamma_s = 1.0 + f * g12;
    let gamma_a = 1.0 - f * g12;
    let rates = dimer_transfer_rates(cfg.lambda, nu, cfg.gamma_nu, omega, gamma_s, gamma_a, cfg.variant)?.modes[0];

    let e_decay_rate = fit_decay_rate(&times, &full.p_e)?;
    let cascade = CascadeFeed {
        p_e0: 1.0,
        to_symmetric: e_decay_rate * gamma_s / (gamma_s + gamma_a),
        to_antisymmetric: e_decay_rate * gamma_a / (gamma_s + gamma_a),
    };
    let rate = rate_equation_evolution(0.0, 0.0, &rates, gamma_s, gamma_a, Some(&cascade), &times)?;

    let int_s = trapezoid(&times, &from_s.p_s);
    let int_a = trapezoid(&times, &from_s.p_a);
    let kappa_extracted = (from_s.p_a.last().copied().unwrap_or(0.0) + (gamma_a + rates.kappa_a_to_s) * int_a) / int_s;

    let max_p_a_discrepancy = full.p_a.iter().zip(&rate.p_a).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let (peak_p_a_full, t_full) = peak(&times, &full.p_a);
    let (peak_p_a_rate, t_rate) = peak(&times, &rate.p_a);
    Ok(TransferComparison {
        omega,
        nu,
        gamma_s,
        gamma_a,
        rates,
        e_decay_rate,
        kappa_extracted,
        full,
        from_symmetric: from_s,
        rate,
        max_p_a_discrepancy,
        peak_p_a_full,
        peak_p_a_rate,
        peak_time_discrepancy: (t_full - t_rate).abs(),
        diagnostics: diag_e.merge(&diag_s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_ring, Polarization};

    #[test]
    fn reference_dimer_rates() {
        let (lambda, omega, gamma_nu) = (0.1, 191.1, 30.0);
        let nu = 2.0 * omega;
        let r = dimer_transfer_rates(lambda, nu, gamma_nu, omega, 2.0, 0.0, TransferVariant::VibrationalWidth).unwrap().modes[0];
        // On resonance the Lorentzian collapses to 2λ²ν²/Γ_ν.
        let oracle = 2.0 * lambda * lambda * nu * nu / gamma_nu;
        assert!((r.kappa_s_to_a - oracle).abs() < 1e-9 * oracle);
        assert!((r.kappa_s_to_a - 97.38).abs() < 5e-3);
        assert!((r.kappa_a_to_s - 0.0375).abs() < 5e-5, "{}", r.kappa_a_to_s);
        assert!(r.kappa_s_to_a / r.kappa_a_to_s > 2.5e3);
    }

    #[test]
    fn zero_coupling_gives_zero_rates() {
        for v in [TransferVariant::VibrationalWidth, TransferVariant::ElectronicCorrected] {
            let r = dimer_transfer_rates(0.0, 10.0, 5.0, 3.0, 1.5, 0.5, v).unwrap().modes[0];
            assert_eq!((r.kappa_s_to_a, r.kappa_a_to_s), (0.0, 0.0));
        }
    }

    #[test]
    fn corrected_variant_collapses_to_vibrational_width_for_equal_rates() {
        let a = dimer_transfer_rates(0.2, 7.0, 4.0, 3.0, 1.0, 1.0, TransferVariant::VibrationalWidth).unwrap();
        let b = dimer_transfer_rates(0.2, 7.0, 4.0, 3.0, 1.0, 1.0, TransferVariant::ElectronicCorrected).unwrap();
        assert!((a.modes[0].kappa_s_to_a - b.modes[0].kappa_s_to_a).abs() < 1e-12);
        assert!(dimer_transfer_rates(0.2, 7.0, 0.5, 3.0, 2.0, 0.0, TransferVariant::ElectronicCorrected).is_err());
    }

    #[test]
    fn resonance_maximizes_forward_rate() {
        let omega = 5.0;
        let scan: Vec<(f64, f64)> = (1..400)
            .map(|i| {
                let nu = 0.05 * i as f64;
                let r = dimer_transfer_rates(0.1, nu, 0.3, omega, 1.0, 0.0, TransferVariant::VibrationalWidth).unwrap();
                (nu, r.modes[0].kappa_s_to_a)
            })
            .collect();
        let best = scan.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        assert!((best.0 - 2.0 * omega).abs() < 0.05 + 1e-12, "maximum at {}", best.0);
    }

    #[test]
    fn ring_of_two_reduces_to_dimer() {
        let geom = build_ring(2, 0.05, Polarization::Perpendicular).unwrap();
        let cm = coupling_matrices(&geom, 1.0).unwrap();
        let lambda = 0.15;
        let ring = ring_transfer_rates(&cm, lambda, 30.0, 10.0, TransferVariant::ElectronicCorrected).unwrap();
        let modes = collective_modes(&cm, lambda, 0.0).unwrap();
        let f = thermal_displacement_factor(lambda, 0.0, false);
        let dimer = dimer_transfer_rates(lambda, 30.0, 10.0, f * cm.omega[(0, 1)], modes[0].decay, modes[1].decay, TransferVariant::ElectronicCorrected)
            .unwrap();
        assert!((ring.modes[0].kappa_s_to_a - dimer.modes[0].kappa_s_to_a).abs() < 1e-10);
        assert!((ring.modes[0].kappa_a_to_s - dimer.modes[0].kappa_a_to_s).abs() < 1e-10);
    }

    #[test]
    fn far_detuned_ring_transfer_is_suppressed() {
        let geom = build_ring(7, 1.0 / 30.0, Polarization::Perpendicular).unwrap();
        let cm = coupling_matrices(&geom, 1.0).unwrap();
        let gamma_nu = 1.0;
        let modes = collective_modes(&cm, 0.15, 0.0).unwrap();
        let max_split = modes.iter().map(|m| (modes[0].energy_shift - m.energy_shift).abs()).fold(0.0, f64::max);
        let nu = max_split + 100.0 * gamma_nu;
        let r = ring_transfer_rates(&cm, 0.15, nu, gamma_nu, TransferVariant::VibrationalWidth).unwrap();
        let resonant = 0.15f64.powi(2) * nu * nu * 2.0 / gamma_nu;
        assert!(r.modes.iter().all(|m| m.kappa_s_to_a < 1e-4 * resonant));
    }

    #[test]
    fn rate_equations_match_analytic_limits() {
        let t: Vec<f64> = (0..200).map(|i| 0.1 * i as f64).collect();
        let zero = ModeTransfer { k: 1, kappa_s_to_a: 0.0, kappa_a_to_s: 0.0, resonance_detuning: 0.0 };
        let p = rate_equation_evolution(0.3, 0.6, &zero, 1.0, 0.0, None, &t).unwrap();
        assert!(p.p_a.iter().all(|v| (v - 0.6).abs() < 1e-14));

        let (gs, kappa) = (2.0, 5.0);
        let fwd = ModeTransfer { kappa_s_to_a: kappa, ..zero };
        let p = rate_equation_evolution(1.0, 0.0, &fwd, gs, 0.0, None, &t).unwrap();
        assert!((p.p_a.last().unwrap() - kappa / (gs + kappa)).abs() < 1e-12);
        // Without the cascade the total excitation never increases.
        let tot: Vec<f64> = p.p_s.iter().zip(&p.p_a).map(|(a, b)| a + b).collect();
        assert!(tot.windows(2).all(|w| w[1] <= w[0] + 1e-14));
    }

    #[test]
    fn cascade_feed_reaches_near_unity_dark_population() {
        let r = dimer_transfer_rates(0.1, 382.2, 30.0, 191.1, 2.0, 0.01, TransferVariant::VibrationalWidth).unwrap().modes[0];
        let feed = CascadeFeed { p_e0: 1.0, to_symmetric: 2.0, to_antisymmetric: 0.0 };
        let t: Vec<f64> = (0..500).map(|i| 0.01 * i as f64).collect();
        let p = rate_equation_evolution(0.0, 0.0, &r, 2.0, 0.01, Some(&feed), &t).unwrap();
        assert!(p.p_a.iter().copied().fold(0.0, f64::max) > 0.9);
        assert!((p.p_e[100] - (-2.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn decay_fit_recovers_exponential() {
        let t: Vec<f64> = (0..50).map(|i| 0.1 * i as f64).collect();
        let p: Vec<f64> = t.iter().map(|t| (-1.7 * t).exp()).collect();
        assert!((fit_decay_rate(&t, &p).unwrap() - 1.7).abs() < 1e-12);
    }

    #[test]
    fn uncoupled_dimer_keeps_dark_state_empty() {
        let cfg = DimerTransferConfig { lambda: 0.0, n_max: 1, t_final: 1.0, n_times: 21, ..DimerTransferConfig::resonant_reference() };
        let c = validate_against_full_model(&cfg).unwrap();
        assert!(c.from_symmetric.p_a.iter().all(|v| v.abs() < 1e-8));
        // With λ = 0 the |E⟩ decay is 2Γ0 by the two-emitter sum rule.
        assert!((c.e_decay_rate - 2.0).abs() < 1e-5);
    }
}
