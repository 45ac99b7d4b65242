//! Physics runs behind the named scenarios: decay of an inverted ring,
//! initial intensity slopes, pulsed excitation of a (vibronic) ring and
//! pair-coupling tables.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::collective::{collective_modes, symmetric_operator};
use crate::coupling::{coupling_matrices, CouplingMatrices};
use crate::dynamics::model::{build_spec, ModelMode, SystemModel};
use crate::dynamics::{evolve_with, EvolveDiagnostics, EvolveOptions, Liouvillian, LiouvillianSpec, Method, PulseSpec};
use crate::geometry::{build_dimer, EmitterGeometry};
use crate::observables::intensity_operator;
use crate::quantum_core::{lowering_operator, trace_product, DensityMatrix, HilbertLayout, SparseOperator};
use crate::vibronic::{
    bare_collective_decay_rates, renormalized_couplings, superradiance_criterion, CollapseConvention, ThermalEnvironment,
    VibronicParams,
};
use crate::{Error, Result, C64};

/// Relative envelope level below which a pulse counts as switched off.
pub const PULSE_OFF_LEVEL: f64 = 1e-12;
/// Explicit steps per pulse width while the drive is on.
const STEPS_PER_PULSE_WIDTH: f64 = 20.0;

/// Time traces of one ring run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RingTrace {
    pub times: Vec<f64>,
    /// `Σ_jj' Γ_jj' ⟨σ_j†σ_j'⟩` with the couplings of the generator.
    pub intensity: Vec<f64>,
    /// Total electronic excitation `Σ_j ⟨σ_j†σ_j⟩`.
    pub excitation: Vec<f64>,
    /// `⟨S†S⟩`.
    pub symmetric_population: Vec<f64>,
    pub diagnostics: EvolveDiagnostics,
}

struct Probes {
    intensity: SparseOperator,
    excitation: SparseOperator,
    symmetric: SparseOperator,
}

impl Probes {
    fn new(layout: &HilbertLayout, gamma: &DMatrix<f64>, n: usize) -> Result<Self> {
        let sites: Vec<usize> = (0..n).collect();
        let mut excitation = SparseOperator::zeros(layout.total_dim());
        for &j in &sites {
            let s = lowering_operator(layout, j)?;
            excitation = excitation.add(&s.adjoint().mul(&s)?)?;
        }
        let s = symmetric_operator(layout, n)?;
        Ok(Self { intensity: intensity_operator(layout, gamma, &sites)?, excitation, symmetric: s.adjoint().mul(&s)? })
    }

    fn record(&self, trace: &mut RingTrace, t: f64, rho: &DMatrix<C64>) -> Result<()> {
        trace.times.push(t);
        trace.intensity.push(trace_product(&self.intensity, rho)?.re);
        trace.excitation.push(trace_product(&self.excitation, rho)?.re);
        trace.symmetric_population.push(trace_product(&self.symmetric, rho)?.re);
        Ok(())
    }
}

fn empty_trace() -> RingTrace {
    RingTrace {
        times: Vec::new(),
        intensity: Vec::new(),
        excitation: Vec::new(),
        symmetric_population: Vec::new(),
        diagnostics: EvolveDiagnostics { final_min_eigenvalue: f64::INFINITY, ..Default::default() },
    }
}

/// Electronic-only model of a ring with couplings renormalized by
/// `exp(−λ²(1+2n̄))`.
pub fn traced_ring_model(geom: &EmitterGeometry, lambda: f64, nbar: f64) -> Result<(SystemModel, CouplingMatrices)> {
    let cm = renormalized_couplings(&coupling_matrices(geom, 1.0)?, lambda, nbar);
    let model = SystemModel::new(geom.positions.clone(), cm.clone(), ModelMode::Traced);
    Ok((model, cm))
}

fn all_excited(layout: &HilbertLayout) -> usize {
    let mut digits = vec![0; layout.len()];
    for j in layout.two_level_indices() {
        digits[j] = 1;
    }
    layout.index(&digits)
}

/// Decay of the fully inverted ring in the traced model.
pub fn inverted_ring_decay(
    geom: &EmitterGeometry,
    lambda: f64,
    nbar: f64,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<RingTrace> {
    let (model, cm) = traced_ring_model(geom, lambda, nbar)?;
    let (layout, spec) = build_spec(&model)?;
    let probes = Probes::new(&layout, &cm.gamma, geom.len())?;
    let rho0 = DensityMatrix::basis_state(layout.total_dim(), all_excited(&layout));
    let mut trace = empty_trace();
    trace.diagnostics = evolve_with(&spec, &rho0, times, opts, |_, t, rho| probes.record(&mut trace, t, rho))?;
    Ok(trace)
}

/// Initial intensity slope of the inverted ring and the analytic prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialSlope {
    /// `dI/dt` at `t = 0` from `Tr(I L[ρ0])`.
    pub slope: f64,
    /// Whether the superradiance criterion predicts a positive slope.
    pub predicted_superradiant: bool,
}

/// Exact initial slope `Tr(I L[ρ0])` of the fully inverted traced ring; any
/// geometry.
pub fn measured_initial_slope(geom: &EmitterGeometry, lambda: f64, nbar: f64) -> Result<f64> {
    let (model, cm) = traced_ring_model(geom, lambda, nbar)?;
    let (layout, spec) = build_spec(&model)?;
    let probes = Probes::new(&layout, &cm.gamma, geom.len())?;
    let rho0 = DensityMatrix::basis_state(layout.total_dim(), all_excited(&layout));
    let l_rho = Liouvillian::new(&spec)?.apply(0.0, rho0.matrix());
    Ok(trace_product(&probes.intensity, &l_rho)?.re)
}

/// [`measured_initial_slope`] together with the superradiance criterion
/// (which needs a circulant, i.e. ordered, ring).
pub fn initial_intensity_slope(geom: &EmitterGeometry, lambda: f64, nbar: f64) -> Result<InitialSlope> {
    let bare = bare_collective_decay_rates(&coupling_matrices(geom, 1.0)?)?;
    Ok(InitialSlope {
        slope: measured_initial_slope(geom, lambda, nbar)?,
        predicted_superradiant: superradiance_criterion(&bare, lambda, nbar, geom.len()),
    })
}

/// Peak `(t, value)` of a sampled curve, refined by a parabola through the
/// largest sample and its neighbors.
pub fn refined_peak(times: &[f64], values: &[f64]) -> Option<(f64, f64)> {
    let (i, _) = values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if i == 0 || i + 1 == values.len() {
        return Some((times[i], values[i]));
    }
    let (t0, t1, t2) = (times[i - 1], times[i], times[i + 1]);
    let (y0, y1, y2) = (values[i - 1], values[i], values[i + 1]);
    // Lagrange parabola; vertex from its derivative.
    let d01 = (y1 - y0) / (t1 - t0);
    let d12 = (y2 - y1) / (t2 - t1);
    let a = (d12 - d01) / (t2 - t0);
    if a >= 0.0 {
        return Some((t1, y1));
    }
    let b = d01 - a * (t0 + t1);
    let tp = -b / (2.0 * a);
    let c = y1 - a * t1 * t1 - b * t1;
    Some((tp, a * tp * tp + b * tp + c))
}

/// Symmetric-channel decay rate: least-squares slope through the origin of
/// the emission rate `−dN_exc/dt` (central differences) against `⟨S†S⟩`,
/// over interior grid points with `t ≤ t_max`.
pub fn symmetric_decay_fit(trace: &RingTrace, t_max: f64) -> Result<f64> {
    let t = &trace.times;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 1..t.len().saturating_sub(1) {
        if t[i] > t_max {
            break;
        }
        let rate = -(trace.excitation[i + 1] - trace.excitation[i - 1]) / (t[i + 1] - t[i - 1]);
        let s = trace.symmetric_population[i];
        num += rate * s;
        den += s * s;
    }
    if den == 0.0 {
        return Err(Error::param("t_max", "no interior samples in the fit window"));
    }
    Ok(num / den)
}

/// Log-linear least-squares decay constant of `values` over `t ∈ [t_lo, t_hi]`.
pub fn exponential_decay_rate(times: &[f64], values: &[f64], t_lo: f64, t_hi: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, v)| **t >= t_lo && **t <= t_hi && **v > 0.0)
        .map(|(t, v)| (*t, v.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::param("fit_window", "fewer than two positive samples in the window"));
    }
    let m = pts.len() as f64;
    let (st, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mt, my) = (st / m, sy / m);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + (p.0 - mt) * (p.1 - my), a.1 + (p.0 - mt).powi(2)));
    Ok(-sxy / sxx)
}

/// Pulsed excitation of a ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulsedRun<'a> {
    pub geom: &'a EmitterGeometry,
    /// Vibronic parameters: explicit modes in [`ModelMode::Full`],
    /// renormalization only in [`ModelMode::Traced`].
    pub vib: VibronicParams,
    pub nbar: f64,
    pub mode: ModelMode,
    pub pulse: PulseSpec,
}

/// Rotating-frame frequency of the symmetric mode: `Ω_S^λ` for the traced
/// model, `Ω_S^{λ=0}` (the absorption maximum) for the full model.
pub fn symmetric_resonance(geom: &EmitterGeometry, lambda: f64, nbar: f64, mode: ModelMode) -> Result<f64> {
    let cm = coupling_matrices(geom, 1.0)?;
    let modes = match mode {
        ModelMode::Traced => collective_modes(&cm, lambda, nbar)?,
        ModelMode::Full => collective_modes(&cm, 0.0, 0.0)?,
    };
    Ok(modes[0].energy_shift)
}

/// Start in the global ground state (vibrations in their ground state),
/// integrate explicitly while the pulse is on and with the ladder propagator
/// afterwards.
pub fn pulsed_ring_run(run: &PulsedRun, times: &[f64], opts: &EvolveOptions) -> Result<RingTrace> {
    let cm = coupling_matrices(run.geom, 1.0)?;
    let mut model = SystemModel::new(run.geom.positions.clone(), cm, run.mode);
    model.vib = Some(run.vib);
    model.thermal = ThermalEnvironment::from_nbar(run.nbar);
    model.pulse = Some(run.pulse);
    let (layout, spec) = build_spec(&model)?;
    let gamma = model.effective_couplings().gamma;
    let probes = Probes::new(&layout, &gamma, run.geom.len())?;
    let rho0 = DensityMatrix::basis_state(layout.total_dim(), 0);
    let first = *times.first().ok_or_else(|| Error::param("t_grid", "empty"))?;
    let t_switch = run.pulse.switch_off_time(PULSE_OFF_LEVEL).max(first);
    let on: Vec<f64> = times.iter().copied().filter(|&t| t < t_switch).collect();
    let off: Vec<f64> = times.iter().copied().filter(|&t| t >= t_switch).collect();
    let mut trace = empty_trace();
    let mut rho = rho0;
    if !on.is_empty() {
        let mut grid = on.clone();
        if !off.is_empty() {
            grid.push(t_switch);
        }
        let explicit = EvolveOptions { method: Method::Explicit, max_step: run.pulse.tau / STEPS_PER_PULSE_WIDTH, ..*opts };
        let mut last = None;
        let diag = evolve_with(&spec, &rho, &grid, &explicit, |i, t, m| {
            if i < on.len() {
                probes.record(&mut trace, t, m)?;
            }
            if i + 1 == grid.len() {
                last = Some(m.clone());
            }
            Ok(())
        })?;
        trace.diagnostics = trace.diagnostics.merge(&diag);
        rho = DensityMatrix::from_matrix(last.expect("final point observed"));
    }
    if !off.is_empty() {
        let prepended = off[0] > t_switch;
        let mut grid = Vec::with_capacity(off.len() + 1);
        if prepended {
            grid.push(t_switch);
        }
        grid.extend(&off);
        let free: LiouvillianSpec = spec.without_drives();
        let diag = evolve_with(&free, &rho, &grid, opts, |i, t, m| {
            if i > 0 || !prepended {
                probes.record(&mut trace, t, m)?;
            }
            Ok(())
        })?;
        trace.diagnostics = trace.diagnostics.merge(&diag);
    }
    Ok(trace)
}

/// Default vibronic parameters for a pulsed run.
pub fn pulsed_vibronics(lambda: f64, nu: f64, gamma_nu: f64, n_max: usize) -> VibronicParams {
    VibronicParams { lambda, nu, gamma_nu, n_max, collapse_convention: CollapseConvention::PolaronCorrected }
}

/// One row of a dimer coupling table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingRow {
    pub d: f64,
    pub omega_12: f64,
    pub gamma_12: f64,
    /// `Γ0 ± Γ12`.
    pub gamma_s: f64,
    pub gamma_a: f64,
}

/// Pair couplings of a perpendicular-dipole dimer for each separation.
pub fn dimer_coupling_table(separations: &[f64]) -> Result<Vec<CouplingRow>> {
    separations
        .iter()
        .map(|&d| {
            let cm = coupling_matrices(&build_dimer(d)?, 1.0)?;
            let (w, g) = (cm.omega[(0, 1)], cm.gamma[(0, 1)]);
            Ok(CouplingRow { d, omega_12: w, gamma_12: g, gamma_s: 1.0 + g, gamma_a: 1.0 - g })
        })
        .collect()
}
