//! Incoherently pumped nanoring light source: a central pump emitter coupled
//! to the symmetric mode of a ring, the closed symmetric-subspace equations
//! for `⟨σ_p†σ_p⟩`, `⟨S†S⟩`, `⟨S†σ_p⟩`, their analytic steady state, the
//! full traced master-equation model, and threshold analysis.

use nalgebra::{DMatrix, DVector, Matrix4, Vector4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collective::{collective_modes, symmetric_operator, CollectiveMode};
use crate::coupling::{coupling_matrices, CouplingMatrices};
use crate::dynamics::model::{build_spec, ModelMode, PumpChannel, SystemModel};
use crate::dynamics::steady_state;
use crate::geometry::build_ring_with_center_radius;
use crate::observables::{collective_intensity, emitted_intensity, g2_zero, g2_zero_collective, PumpSite};
use crate::quantum_core::{lowering_operator, trace_product, HilbertLayout};
use crate::vibronic::{renormalized_couplings, thermal_displacement_factor};
use crate::{Error, Result, C64};

/// All pump-ring pairs must agree to this tolerance.
const PUMP_SYMMETRY_TOL: f64 = 1e-12;
/// Relative slack on the positivity of the pump-ring decay matrix.
const DISSIPATOR_PSD_TOL: f64 = 1e-9;

/// Pump parameters as they enter the equations of motion (renormalized
/// couplings).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSpec {
    /// Incoherent pump rate `η_p`.
    pub eta_p: f64,
    /// Rotating-frame transition frequency `ω_p` of the pump emitter.
    pub omega_p: f64,
    /// Coherent pump-ring rate `Ω_p^λ`.
    pub omega_coupling: f64,
    /// Dissipative pump-ring rate `Γ_p^λ`.
    pub gamma_coupling: f64,
}

impl PumpSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta_p >= 0.0 && self.eta_p.is_finite()) {
            return Err(Error::param("eta_p", "must be finite and >= 0"));
        }
        if !(self.omega_p.is_finite() && self.omega_coupling.is_finite() && self.gamma_coupling.is_finite()) {
            return Err(Error::param("pump", "rates must be finite"));
        }
        Ok(())
    }
}

/// Form of the closed pump-ring equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReducedForm {
    /// Cross-decay terms weighted by `Γ_p` and rotation `−iΔ sp`, as the
    /// closed equations are usually written.
    #[default]
    Literal,
    /// Re-derived from the master equation: cross-decay terms weighted by the
    /// collective channel rate `√N Γ_p`, rotation `+iΔ sp` as generated by
    /// `Ω_S S†S + ω_p σ_p†σ_p`. Identical to `Literal` when `Γ_p = 0` in
    /// all populations.
    Derived,
}

/// Symmetric-mode parameters of the ring seen by the pump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingMode {
    /// Number of ring emitters `N`.
    pub n: usize,
    /// Symmetric decay rate `Γ_S^λ`.
    pub gamma_s: f64,
    /// Symmetric shift `Ω_S^λ`.
    pub omega_s: f64,
}

/// Second moments of the reduced pump-ring model.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReducedState {
    /// `⟨σ_p†σ_p⟩`.
    pub pp: f64,
    /// `⟨S†S⟩`.
    pub ss: f64,
    /// `⟨S†σ_p⟩`.
    pub sp: C64,
}

impl ReducedState {
    fn to_vector(self) -> Vector4<f64> {
        Vector4::new(self.pp, self.ss, self.sp.re, self.sp.im)
    }

    fn from_vector(x: &Vector4<f64>) -> Self {
        Self { pp: x[0], ss: x[1], sp: C64::new(x[2], x[3]) }
    }
}

/// The closed equations as `dx/dt = A x + b` with `x = (pp, ss, Re sp, Im sp)`:
///
/// ```text
/// d pp = −(Γ0+η_p) pp + η_p − 2√N Ω_p Im sp − Γ_p Re sp
/// d ss = −Γ_S ss + 2√N Ω_p Im sp − Γ_p Re sp
/// d sp = −((Γ0+η_p+Γ_S)/2) sp − iΔ sp + i√N Ω_p (pp − ss) − (Γ_p/2)(ss + pp)
/// ```
///
/// with `Δ = Ω_S − ω_p` the symmetric-mode detuning from the pump (see
/// [`ReducedForm`] for the re-derived variant).
fn reduced_system(pump: &PumpSpec, ring: &RingMode, gamma0: f64, form: ReducedForm) -> (Matrix4<f64>, Vector4<f64>) {
    let g = (ring.n as f64).sqrt() * pump.omega_coupling;
    let detuning = ring.omega_s - pump.omega_p;
    let (gp, delta) = match form {
        ReducedForm::Literal => (pump.gamma_coupling, detuning),
        ReducedForm::Derived => ((ring.n as f64).sqrt() * pump.gamma_coupling, -detuning),
    };
    let half = 0.5 * (gamma0 + pump.eta_p + ring.gamma_s);
    #[rustfmt::skip]
    let a = Matrix4::new(
        -(gamma0 + pump.eta_p), 0.0,            -gp,    -2.0 * g,
        0.0,                    -ring.gamma_s,  -gp,    2.0 * g,
        -0.5 * gp,              -0.5 * gp,      -half,  delta,
        g,                      -g,             -delta, -half,
    );
    (a, Vector4::new(pump.eta_p, 0.0, 0.0, 0.0))
}

fn validate_ring(ring: &RingMode) -> Result<()> {
    if ring.n == 0 {
        return Err(Error::param("N", "ring must contain at least one emitter"));
    }
    if !(ring.gamma_s >= 0.0 && ring.gamma_s.is_finite() && ring.omega_s.is_finite()) {
        return Err(Error::param("gamma_s", "symmetric rates must be finite, Γ_S >= 0"));
    }
    Ok(())
}

/// The pump and symmetric-mode decay matrix `[[Γ0, √NΓ_p], [√NΓ_p, Γ_S]]`
/// must be positive semidefinite, `NΓ_p² ≤ Γ0Γ_S`; geometric couplings
/// always are, independently chosen ones may not be.
fn validate_pair(pump: &PumpSpec, ring: &RingMode, gamma0: f64) -> Result<()> {
    pump.validate()?;
    validate_ring(ring)?;
    let lhs = ring.n as f64 * pump.gamma_coupling * pump.gamma_coupling;
    if lhs > gamma0 * ring.gamma_s * (1.0 + DISSIPATOR_PSD_TOL) {
        return Err(Error::param(
            "gamma_coupling",
            format!("N Γ_p² = {lhs} exceeds Γ0 Γ_S = {}: the decay matrix is not positive", gamma0 * ring.gamma_s),
        ));
    }
    Ok(())
}

/// Time derivative of the reduced model.
pub fn reduced_derivative(
    pump: &PumpSpec,
    ring: &RingMode,
    gamma0: f64,
    form: ReducedForm,
    state: &ReducedState,
) -> ReducedState {
    let (a, b) = reduced_system(pump, ring, gamma0, form);
    ReducedState::from_vector(&(a * state.to_vector() + b))
}

/// Fixed point of the reduced model from the 4×4 real linear system.
pub fn reduced_steady_state(pump: &PumpSpec, ring: &RingMode, gamma0: f64, form: ReducedForm) -> Result<ReducedState> {
    validate_pair(pump, ring, gamma0)?;
    let (a, b) = reduced_system(pump, ring, gamma0, form);
    let x = a
        .full_piv_lu()
        .solve(&(-b))
        .ok_or_else(|| Error::Solver("reduced pump-ring system is singular".into()))?;
    Ok(ReducedState::from_vector(&x))
}

/// Exact trajectory of the (affine, time-independent) reduced model on
/// `t_grid`, via the exponential of the augmented 5×5 generator.
pub fn reduced_trajectory(
    pump: &PumpSpec,
    ring: &RingMode,
    gamma0: f64,
    form: ReducedForm,
    initial: ReducedState,
    t_grid: &[f64],
) -> Result<Vec<ReducedState>> {
    validate_pair(pump, ring, gamma0)?;
    let (a, b) = reduced_system(pump, ring, gamma0, form);
    let mut aug = DMatrix::<f64>::zeros(5, 5);
    aug.view_mut((0, 0), (4, 4)).copy_from(&a);
    aug.view_mut((0, 4), (4, 1)).copy_from(&b);
    let x0 = initial.to_vector();
    let y0 = DVector::from_vec(vec![x0[0], x0[1], x0[2], x0[3], 1.0]);
    let t0 = t_grid.first().copied().unwrap_or(0.0);
    Ok(t_grid
        .iter()
        .map(|&t| {
            let y = (&aug * (t - t0)).exp() * &y0;
            ReducedState { pp: y[0], ss: y[1], sp: C64::new(y[2], y[3]) }
        })
        .collect())
}

/// Closed-form steady-state `⟨S†S⟩` for `Γ_p = 0`:
/// `N Γ̄ η_p Ω_p² / {Γ_S(Γ0+η_p)[(Γ̄/2)² + Δ²] + Γ̄² N Ω_p²}` with
/// `Γ̄ = Γ0 + η_p + Γ_S` and `Δ = Ω_S − ω_p`.
pub fn analytic_steady_state(pump: &PumpSpec, ring: &RingMode, gamma0: f64) -> Result<f64> {
    pump.validate()?;
    validate_ring(ring)?;
    if pump.gamma_coupling != 0.0 {
        return Err(Error::param("gamma_coupling", "the closed form requires Γ_p = 0"));
    }
    let n = ring.n as f64;
    let gbar = gamma0 + pump.eta_p + ring.gamma_s;
    let delta = ring.omega_s - pump.omega_p;
    let op2 = pump.omega_coupling * pump.omega_coupling;
    let num = n * gbar * pump.eta_p * op2;
    if num == 0.0 {
        return Ok(0.0);
    }
    let den = ring.gamma_s * (gamma0 + pump.eta_p) * (0.25 * gbar * gbar + delta * delta) + gbar * gbar * n * op2;
    Ok(num / den)
}

/// Pump detuning selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PumpDetuning {
    /// `ω_p = Ω_S^{λ=0} + Ω_p^{λ=0}`.
    Optimal,
    /// Resonant with the renormalized symmetric mode, `ω_p = Ω_S^λ`.
    Resonant,
    /// Explicit rotating-frame frequency.
    Value(f64),
}

/// One pump-ring configuration. Couplings given here are bare (`λ = 0`)
/// values; the model multiplies them by the thermal displacement factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserConfig {
    /// Ring emitters `N`.
    pub n: usize,
    /// Ring radius `r` (pump-to-ring distance) in `λ0`.
    pub radius: f64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub nbar: f64,
    pub eta_p: f64,
    pub detuning: PumpDetuning,
    /// Bare `Ω_p`; geometric value at distance `r` when absent.
    #[serde(default)]
    pub omega_coupling: Option<f64>,
    /// Bare `Γ_p`; geometric value at distance `r` when absent.
    #[serde(default)]
    pub gamma_coupling: Option<f64>,
}

/// Resolved couplings of a [`LaserConfig`].
#[derive(Debug, Clone)]
pub struct LaserSetup {
    /// Renormalized couplings over ring sites `0..N` and the pump at `N`.
    pub couplings: CouplingMatrices,
    /// Renormalized ring modes, `k = 0` symmetric.
    pub modes: Vec<CollectiveMode>,
    pub ring: RingMode,
    /// Renormalized pump parameters.
    pub pump: PumpSpec,
    /// Bare `Ω_S^{λ=0}` and `Ω_p^{λ=0}`.
    pub bare_omega_s: f64,
    pub bare_omega_p: f64,
}

impl LaserConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::param("N", "a ring needs at least 2 emitters"));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::param("lambda", "must be finite and >= 0"));
        }
        if !(self.nbar >= 0.0 && self.nbar.is_finite()) {
            return Err(Error::param("nbar", "must be finite and >= 0"));
        }
        if !(self.eta_p >= 0.0 && self.eta_p.is_finite()) {
            return Err(Error::param("eta_p", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// Geometry, renormalization and pump detuning resolved into the rates
    /// entering both the full and the reduced model.
    pub fn setup(&self) -> Result<LaserSetup> {
        self.validate()?;
        let geom = build_ring_with_center_radius(self.n, self.radius)?;
        let mut bare = coupling_matrices(&geom, 1.0)?;
        let p = geom.center_index().expect("ring-with-center layout");
        let (om0, ga0) = (bare.omega[(p, 0)], bare.gamma[(p, 0)]);
        for j in 0..self.n {
            if (bare.omega[(p, j)] - om0).abs() > PUMP_SYMMETRY_TOL || (bare.gamma[(p, j)] - ga0).abs() > PUMP_SYMMETRY_TOL {
                return Err(Error::Configuration(format!("pump-ring coupling to site {j} breaks rotational symmetry")));
            }
        }
        let omega_p_bare = self.omega_coupling.unwrap_or(om0);
        let gamma_p_bare = self.gamma_coupling.unwrap_or(ga0);
        for j in 0..self.n {
            bare.omega[(p, j)] = omega_p_bare;
            bare.omega[(j, p)] = omega_p_bare;
            bare.gamma[(p, j)] = gamma_p_bare;
            bare.gamma[(j, p)] = gamma_p_bare;
        }
        let ring_bare = ring_block(&bare, self.n);
        let bare_omega_s = collective_modes(&ring_bare, 0.0, 0.0)?[0].energy_shift;
        let modes = collective_modes(&ring_bare, self.lambda, self.nbar)?;
        let f = thermal_displacement_factor(self.lambda, self.nbar, false);
        let ring = RingMode { n: self.n, gamma_s: modes[0].decay, omega_s: modes[0].energy_shift };
        let omega_p = match self.detuning {
            PumpDetuning::Optimal => bare_omega_s + omega_p_bare,
            PumpDetuning::Resonant => ring.omega_s,
            PumpDetuning::Value(w) => w,
        };
        let pump = PumpSpec { eta_p: self.eta_p, omega_p, omega_coupling: f * omega_p_bare, gamma_coupling: f * gamma_p_bare };
        pump.validate()?;
        Ok(LaserSetup {
            couplings: renormalized_couplings(&bare, self.lambda, self.nbar),
            modes,
            ring,
            pump,
            bare_omega_s,
            bare_omega_p: omega_p_bare,
        })
    }
}

fn ring_block(cm: &CouplingMatrices, n: usize) -> CouplingMatrices {
    CouplingMatrices {
        omega: cm.omega.view((0, 0), (n, n)).into_owned(),
        gamma: cm.gamma.view((0, 0), (n, n)).into_owned(),
        gamma0: cm.gamma0,
    }
}

fn traced_model(setup: &LaserSetup) -> SystemModel {
    let n = setup.ring.n;
    let positions = vec![[0.0; 3]; n + 1];
    let mut model = SystemModel::new(positions, setup.couplings.clone(), ModelMode::Traced);
    model.pump = Some(PumpChannel { site: n, eta_p: setup.pump.eta_p, detuning: setup.pump.omega_p });
    model
}

/// Steady-state observables of the full pump-ring master equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserPoint {
    pub eta_p: f64,
    /// Pump frequency `ω_p` used.
    pub omega_p: f64,
    /// Renormalized `Ω_p^λ`, `Γ_p^λ`.
    pub omega_coupling: f64,
    pub gamma_coupling: f64,
    pub pp: f64,
    pub ss: f64,
    pub sp_re: f64,
    pub sp_im: f64,
    /// Total ring population `Σ_j ⟨σ_j†σ_j⟩`.
    pub ring_excitation: f64,
    /// `Σ_jj' Γ^λ_jj' ⟨σ_j†σ_j'⟩` over ring and pump.
    pub intensity: f64,
    /// The same from the collective four-term split.
    pub intensity_collective: f64,
    /// Symmetric ring contribution `Γ_S^λ ⟨S†S⟩`.
    pub intensity_symmetric: f64,
    /// `g²(0)` of `E = Σ_j σ_j` over ring and pump (`NaN` when undefined).
    pub g2: f64,
    /// `g²(0)` from the collective expansion with `E = √N S + σ_p`.
    pub g2_collective: f64,
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl LaserPoint {
    pub fn reduced_state(&self) -> ReducedState {
        ReducedState { pp: self.pp, ss: self.ss, sp: C64::new(self.sp_re, self.sp_im) }
    }
}

/// Full traced master-equation steady state of ring plus central pump.
pub fn full_laser_model(cfg: &LaserConfig) -> Result<LaserPoint> {
    let setup = cfg.setup()?;
    full_laser_model_with(&setup)
}

/// [`full_laser_model`] on already resolved couplings.
pub fn full_laser_model_with(setup: &LaserSetup) -> Result<LaserPoint> {
    let n = setup.ring.n;
    let model = traced_model(setup);
    let (layout, spec) = build_spec(&model)?;
    let rho = steady_state(&spec)?;
    let m = rho.matrix();
    let s = symmetric_operator(&layout, n)?;
    let sp = lowering_operator(&layout, n)?;
    let ss = trace_product(&s.adjoint().mul(&s)?, m)?.re;
    let pp = trace_product(&sp.adjoint().mul(&sp)?, m)?.re;
    let cross = trace_product(&s.adjoint().mul(&sp)?, m)?;
    let ring_sites: Vec<usize> = (0..n).collect();
    let all_sites: Vec<usize> = (0..=n).collect();
    let ring_excitation = ring_sites
        .iter()
        .map(|&j| {
            let o = lowering_operator(&layout, j)?;
            Ok(trace_product(&o.adjoint().mul(&o)?, m)?.re)
        })
        .sum::<Result<f64>>()?;
    let pump_site = PumpSite { site: n, gamma_p: setup.pump.gamma_coupling, gamma_self: setup.couplings.gamma[(n, n)] };
    Ok(LaserPoint {
        eta_p: setup.pump.eta_p,
        omega_p: setup.pump.omega_p,
        omega_coupling: setup.pump.omega_coupling,
        gamma_coupling: setup.pump.gamma_coupling,
        pp,
        ss,
        sp_re: cross.re,
        sp_im: cross.im,
        ring_excitation,
        intensity: emitted_intensity(m, &layout, &setup.couplings.gamma, &all_sites)?,
        intensity_collective: collective_intensity(m, &layout, &setup.modes, Some(pump_site))?,
        intensity_symmetric: setup.ring.gamma_s * ss,
        g2: g2_zero(m, &layout, &all_sites)?.unwrap_or(f64::NAN),
        g2_collective: g2_zero_collective(m, &layout, n, Some(n))?.unwrap_or(f64::NAN),
        trace_error: (rho.trace() - 1.0).norm(),
        hermiticity_error: rho.hermiticity_error(),
        min_eigenvalue: rho.min_eigenvalue(),
    })
}

/// Independent configurations evaluated in parallel, results in input order.
pub fn laser_sweep(configs: &[LaserConfig]) -> Result<Vec<LaserPoint>> {
    configs.par_iter().map(full_laser_model).collect()
}

/// `⟨S_1|H|p⟩` between the pump-excited ring-ground state and the
/// symmetric single ring excitation, from the assembled Hamiltonian.
pub fn pump_ring_matrix_element(setup: &LaserSetup) -> Result<C64> {
    let n = setup.ring.n;
    let (layout, spec) = build_spec(&traced_model(setup))?;
    let ground = ground_index(&layout);
    let pump_excited = lowering_operator(&layout, n)?.adjoint().apply(&basis(layout.total_dim(), ground));
    let sym = symmetric_operator(&layout, n)?.adjoint().apply(&basis(layout.total_dim(), ground));
    let h_p = spec.hamiltonian.apply(&pump_excited);
    Ok(sym.iter().zip(&h_p).map(|(a, b)| a.conj() * b).sum())
}

fn ground_index(layout: &HilbertLayout) -> usize {
    layout.index(&vec![0; layout.len()])
}

fn basis(dim: usize, i: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); dim];
    v[i] = C64::new(1.0, 0.0);
    v
}

/// Log-log threshold characterization of an input-output curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    /// `d ln y / d ln x` on the first and last intervals.
    pub slope_low: f64,
    pub slope_high: f64,
    /// `x` at which the local slope crosses the mean of the two (log
    /// interpolation); `NaN` if it never does.
    pub threshold: f64,
}

impl ThresholdReport {
    /// `|slope_low| / |slope_high|`.
    pub fn slope_ratio(&self) -> f64 {
        self.slope_low.abs() / self.slope_high.abs()
    }
}

/// Threshold of a monotone positive curve `y(x)` from its log-log slopes.
pub fn threshold_analysis(x: &[f64], y: &[f64]) -> Result<ThresholdReport> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    if x.len() < 3 {
        return Err(Error::param("x", "need at least three points"));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::param("y", "log-log analysis needs positive finite values"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let slopes: Vec<f64> = (0..x.len() - 1).map(|i| (ly[i + 1] - ly[i]) / (lx[i + 1] - lx[i])).collect();
    let mids: Vec<f64> = (0..x.len() - 1).map(|i| 0.5 * (lx[i] + lx[i + 1])).collect();
    let slope_low = slopes[0];
    let slope_high = *slopes.last().expect("non-empty");
    let target = 0.5 * (slope_low + slope_high);
    let mut threshold = f64::NAN;
    for i in 0..slopes.len() - 1 {
        let (a, b) = (slopes[i] - target, slopes[i + 1] - target);
        if a == 0.0 {
            threshold = mids[i].exp();
            break;
        }
        if a * b < 0.0 {
            threshold = (mids[i] + (mids[i + 1] - mids[i]) * a / (a - b)).exp();
            break;
        }
    }
    Ok(ThresholdReport { slope_low, slope_high, threshold })
}

/// Logarithmically spaced grid of `count` points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const L: ReducedForm = ReducedForm::Literal;

    fn ring(gamma_s: f64, omega_s: f64) -> RingMode {
        RingMode { n: 5, gamma_s, omega_s }
    }

    fn pump(eta_p: f64, omega_coupling: f64) -> PumpSpec {
        PumpSpec { eta_p, omega_p: 0.0, omega_coupling, gamma_coupling: 0.0 }
    }

    #[test]
    fn closed_form_check_value() {
        let v = analytic_steady_state(&pump(1.0, 1.0), &ring(5.0, 0.0), 1.0).unwrap();
        assert!((v - 35.0 / 367.5).abs() < 1e-12);
        assert!((v - 0.09524).abs() < 1e-5);
        assert_eq!(analytic_steady_state(&pump(1.0, 0.0), &ring(5.0, 0.0), 1.0).unwrap(), 0.0);
        let sat = analytic_steady_state(&pump(1.0, 1e6), &ring(5.0, 3.0), 1.0).unwrap();
        assert!((sat - 1.0 / 7.0).abs() < 1e-9);
    }

    #[test]
    fn decoupled_pump() {
        let s = reduced_steady_state(&pump(3.0, 0.0), &ring(5.0, 1.0), 1.0, L).unwrap();
        assert!(s.ss.abs() < 1e-15);
        assert!((s.pp - 0.75).abs() < 1e-14);
    }

    #[test]
    fn reduced_fixed_point_matches_closed_form() {
        for (i, op) in log_grid(0.1, 10.0, 25).into_iter().enumerate() {
            let r = ring(4.3, 0.7 * i as f64);
            let p = pump(2.0, op);
            let s = reduced_steady_state(&p, &r, 1.0, L).unwrap();
            assert!((s.ss - analytic_steady_state(&p, &r, 1.0).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn forms_agree_without_cross_decay() {
        let (p, r) = (PumpSpec { omega_p: 1.3, ..pump(2.0, 0.7) }, ring(4.0, -0.4));
        let a = reduced_steady_state(&p, &r, 1.0, L).unwrap();
        let b = reduced_steady_state(&p, &r, 1.0, ReducedForm::Derived).unwrap();
        assert!((a.ss - b.ss).abs() < 1e-14 && (a.pp - b.pp).abs() < 1e-14);
        assert!((a.sp + b.sp.conj()).norm() < 1e-14);
    }

    #[test]
    fn trajectory_relaxes_to_fixed_point() {
        let (p, r) = (pump(1.5, 0.8), ring(3.0, 0.4));
        let t: Vec<f64> = (0..=40).map(|i| i as f64).collect();
        let traj = reduced_trajectory(&p, &r, 1.0, L, ReducedState::default(), &t).unwrap();
        let fixed = reduced_steady_state(&p, &r, 1.0, L).unwrap();
        let last = traj.last().unwrap();
        assert!((last.ss - fixed.ss).abs() < 1e-9 && (last.pp - fixed.pp).abs() < 1e-9);
        let d = reduced_derivative(&p, &r, 1.0, L, &fixed);
        assert!(d.pp.abs() + d.ss.abs() + d.sp.norm() < 1e-12);
    }

    #[test]
    fn weak_pump_response_is_linear() {
        let r = ring(5.0, 0.0);
        let reference = reduced_steady_state(&pump(1e-4, 1.0), &r, 1.0, L).unwrap().ss / 1e-4;
        for eta in [1e-3, 5e-3, 1e-2] {
            let ratio = reduced_steady_state(&pump(eta, 1.0), &r, 1.0, L).unwrap().ss / eta;
            assert!((ratio / reference - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn collective_enhancement_of_pump_coupling() {
        let cfg = LaserConfig {
            n: 5,
            radius: 0.05,
            lambda: 0.15,
            nbar: 0.0,
            eta_p: 1.0,
            detuning: PumpDetuning::Optimal,
            omega_coupling: Some(2.0),
            gamma_coupling: None,
        };
        let setup = cfg.setup().unwrap();
        let f = thermal_displacement_factor(0.15, 0.0, false);
        assert!((setup.pump.omega_coupling - 2.0 * f).abs() < 1e-15);
        let h = pump_ring_matrix_element(&setup).unwrap();
        assert!((h - C64::new(5f64.sqrt() * setup.pump.omega_coupling, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn isolated_pump_population() {
        // Far ring and vanishing couplings: the pump is a two-level rate balance.
        let cfg = LaserConfig {
            n: 3,
            radius: 0.3,
            lambda: 0.0,
            nbar: 0.0,
            eta_p: 3.0,
            detuning: PumpDetuning::Value(0.0),
            omega_coupling: Some(0.0),
            gamma_coupling: Some(0.0),
        };
        let pt = full_laser_model(&cfg).unwrap();
        assert!((pt.pp - 0.75).abs() < 1e-10);
        assert!(pt.ring_excitation.abs() < 1e-12);
        assert!((pt.intensity - pt.intensity_collective).abs() < 1e-10);
    }

    #[test]
    fn threshold_of_closed_form_curve() {
        let r = ring(5.0, 0.0);
        let x = log_grid(0.01, 100.0, 81);
        let y: Vec<f64> = x.iter().map(|&o| analytic_steady_state(&pump(1.0, o), &r, 1.0).unwrap()).collect();
        let rep = threshold_analysis(&x, &y).unwrap();
        assert!((rep.slope_low - 2.0).abs() < 1e-2);
        assert!(rep.slope_high.abs() < 1e-2);
        // Crossover where the two denominator terms balance.
        let expected = (5.0 * 2.0 * 0.25 * 49.0 / (49.0 * 5.0) as f64).sqrt();
        assert!((rep.threshold / expected - 1.0).abs() < 0.1, "{} vs {expected}", rep.threshold);
    }
}
