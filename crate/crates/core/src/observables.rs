//! Physical outputs: emitted intensity (bare and collective forms),
//! zero-delay second-order correlation, weak-drive absorption spectra with a
//! Lorentzian fit, Franck–Condon absorption weights and named traces.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix3, SymmetricEigen, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::collective::{collective_modes, collective_operator, CollectiveMode};
use crate::coupling::coupling_matrices;
use crate::dynamics::ladder::GradedLiouvillian;
use crate::dynamics::model::independent_couplings;
use crate::dynamics::{build_spec, steady_state, ModelMode, PulseSpec, SystemModel};
use crate::geometry::{build_ring, Polarization};
use crate::quantum_core::{lowering_operator, trace_product, HilbertLayout, SparseOperator, Subspace};
use crate::transfer::{ring_transfer_rates, TransferVariant};
use crate::vibronic::{CollapseConvention, VibronicParams};
use crate::{Error, Result, C64};

/// Intensities and correlations below this are reported as undefined.
pub const MIN_DEFINED_INTENSITY: f64 = 1e-12;
/// Excited population above which a weak-drive spectrum is flagged saturated.
pub const LINEAR_RESPONSE_LIMIT: f64 = 0.05;
/// Most negative intensity or `g²` value accepted as round-off.
pub const NEGATIVITY_TOL: f64 = -1e-9;
/// Largest grid spacing allowed relative to the fitted full width.
const MAX_SPACING_PER_WIDTH: f64 = 0.1;
/// Relative step below which the Lorentzian fit is converged.
const FIT_TOL: f64 = 1e-12;
const FIT_MAX_ITERATIONS: usize = 200;

/// Named channels sampled on a common time grid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObservableTrace {
    pub times: Vec<f64>,
    pub channels: BTreeMap<String, Vec<f64>>,
}

impl ObservableTrace {
    pub fn new(times: Vec<f64>) -> Self {
        Self { times, channels: BTreeMap::new() }
    }

    /// Append one sample to `name`, creating the channel if needed.
    pub fn push(&mut self, name: &str, value: f64) {
        self.channels.entry(name.to_string()).or_default().push(value);
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels.get(name).map(Vec::as_slice)
    }

    /// Every channel has one value per time, and intensity-like channels
    /// (`intensity*`, `g2*`) are non-negative up to round-off.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in &self.channels {
            if v.len() != self.times.len() {
                return Err(Error::DimensionMismatch { expected: self.times.len(), got: v.len() });
            }
            if (name.starts_with("intensity") || name.starts_with("g2")) && v.iter().any(|x| *x < NEGATIVITY_TOL) {
                return Err(Error::param(name, "negative beyond round-off"));
            }
        }
        Ok(())
    }
}

/// `Σ_{jj'} Γ_jj' σ_j†σ_j'` over the electronic `sites` (rows/columns of
/// `gamma` follow the order of `sites`).
pub fn intensity_operator(layout: &HilbertLayout, gamma: &DMatrix<f64>, sites: &[usize]) -> Result<SparseOperator> {
    if gamma.nrows() != sites.len() || gamma.ncols() != sites.len() {
        return Err(Error::DimensionMismatch { expected: sites.len(), got: gamma.nrows() });
    }
    let sig: Vec<SparseOperator> = sites.iter().map(|&j| lowering_operator(layout, j)).collect::<Result<_>>()?;
    let mut out = SparseOperator::zeros(layout.total_dim());
    for a in 0..sites.len() {
        for b in 0..sites.len() {
            if gamma[(a, b)] != 0.0 {
                out = out.add(&sig[a].adjoint().mul(&sig[b])?.scale(C64::new(gamma[(a, b)], 0.0)))?;
            }
        }
    }
    Ok(out)
}

/// Emitted intensity in the bare basis, `Σ_{jj'} Γ_jj' ⟨σ_j†σ_j'⟩`.
pub fn emitted_intensity(rho: &DMatrix<C64>, layout: &HilbertLayout, gamma: &DMatrix<f64>, sites: &[usize]) -> Result<f64> {
    Ok(trace_product(&intensity_operator(layout, gamma, sites)?, rho)?.re)
}

/// Pump emitter for the collective intensity split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSite {
    pub site: usize,
    /// Mutual pump-ring decay rate `Γ_p`.
    pub gamma_p: f64,
    /// Pump decay rate, normally `Γ0`.
    pub gamma_self: f64,
}

/// Emitted intensity in the collective basis of a ring on sites `0..N`:
/// `Γ_S⟨S†S⟩ + Σ_k Γ_k⟨A_k†A_k⟩ + 2√N Γ_p Re⟨S†σ_p⟩ + Γ_pp⟨σ_p†σ_p⟩`.
pub fn collective_intensity(
    rho: &DMatrix<C64>,
    layout: &HilbertLayout,
    modes: &[CollectiveMode],
    pump: Option<PumpSite>,
) -> Result<f64> {
    let n = modes.len();
    let mut total = 0.0;
    for m in modes {
        let c = collective_operator(layout, n, m.k)?;
        total += m.decay * trace_product(&c.adjoint().mul(&c)?, rho)?.re;
    }
    if let Some(p) = pump {
        let s = collective_operator(layout, n, 0)?;
        let sp = lowering_operator(layout, p.site)?;
        let cross = trace_product(&s.adjoint().mul(&sp)?, rho)?.re;
        total += 2.0 * (n as f64).sqrt() * p.gamma_p * cross;
        total += p.gamma_self * trace_product(&sp.adjoint().mul(&sp)?, rho)?.re;
    }
    Ok(total)
}

/// `g²(0) = ⟨E†E†EE⟩/⟨E†E⟩²` with `E = Σ_j σ_j` over `sites`; `None` when
/// `⟨E†E⟩` is below [`MIN_DEFINED_INTENSITY`].
pub fn g2_zero(rho: &DMatrix<C64>, layout: &HilbertLayout, sites: &[usize]) -> Result<Option<f64>> {
    let dim = layout.total_dim();
    let ops: Vec<SparseOperator> = sites.iter().map(|&j| lowering_operator(layout, j)).collect::<Result<_>>()?;
    let refs: Vec<(C64, &SparseOperator)> = ops.iter().map(|o| (C64::new(1.0, 0.0), o)).collect();
    let e = SparseOperator::linear_combination(dim, &refs)?;
    let ee = e.mul(&e)?;
    let first = trace_product(&e.adjoint().mul(&e)?, rho)?.re;
    if first < MIN_DEFINED_INTENSITY {
        return Ok(None);
    }
    let second = trace_product(&ee.adjoint().mul(&ee)?, rho)?.re;
    Ok(Some(second / (first * first)))
}

/// Collective evaluation of [`g2_zero`] for a ring on sites `0..N` plus an
/// optional pump site, using `E = √N S + σ_p`:
/// numerator `N²⟨S†S†SS⟩ + 4N⟨σ_p†S†Sσ_p⟩ + 4N√N Re⟨S†S†Sσ_p⟩`, denominator
/// `(N⟨S†S⟩ + 2√N Re⟨S†σ_p⟩ + ⟨σ_p†σ_p⟩)²`. The pump-only fourth-order term
/// vanishes for a two-level pump.
pub fn g2_zero_collective(rho: &DMatrix<C64>, layout: &HilbertLayout, n: usize, pump_site: Option<usize>) -> Result<Option<f64>> {
    let s = collective_operator(layout, n, 0)?;
    let sd = s.adjoint();
    let nf = n as f64;
    let ss = s.mul(&s)?;
    let mut num = nf * nf * trace_product(&ss.adjoint().mul(&ss)?, rho)?.re;
    let mut den = nf * trace_product(&sd.mul(&s)?, rho)?.re;
    if let Some(p) = pump_site {
        let sp = lowering_operator(layout, p)?;
        let sdsd_s = sd.mul(&sd)?.mul(&s)?;
        num += 4.0 * nf * trace_product(&sp.adjoint().mul(&sd)?.mul(&s)?.mul(&sp)?, rho)?.re;
        num += 4.0 * nf * nf.sqrt() * trace_product(&sdsd_s.mul(&sp)?, rho)?.re;
        den += 2.0 * nf.sqrt() * trace_product(&sd.mul(&sp)?, rho)?.re;
        den += trace_product(&sp.adjoint().mul(&sp)?, rho)?.re;
    }
    if den < MIN_DEFINED_INTENSITY {
        return Ok(None);
    }
    Ok(Some(num / (den * den)))
}

/// Gaussian pulse envelope `η exp[−(t−t0)²/τ²]`.
pub fn pulse_envelope(spec: &PulseSpec, t: f64) -> f64 {
    spec.amplitude(t)
}

/// Energy and absorption weight of one vibronic line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionLine {
    /// Energy relative to the bare transition.
    pub energy: f64,
    /// `|⟨ψ_n|σ†|g;0⟩|²`.
    pub weight: f64,
}

/// Golden-rule absorption lines of a single molecule with one vibrational
/// mode truncated at `n_max`: the excited-manifold Hamiltonian is
/// diagonalized and each eigenstate weighted by its overlap with `σ†|g;0⟩`.
pub fn franck_condon_absorption_weights(lambda: f64, nu: f64, n_max: usize) -> Result<Vec<AbsorptionLine>> {
    let vib = VibronicParams { lambda, nu, gamma_nu: 0.0, n_max, collapse_convention: CollapseConvention::Local };
    let cm = independent_couplings(1, 1.0);
    let mut model = SystemModel::new(vec![[0.0; 3]], cm, ModelMode::Full);
    model.vib = Some(vib);
    let (layout, spec) = build_spec(&model)?;
    let excited: Vec<usize> = (0..layout.total_dim()).filter(|&i| layout.excitation_number(i) == 1).collect();
    let h = spec.hamiltonian.submatrix(&excited, &excited);
    let eig = SymmetricEigen::new(h);
    let g0 = layout.index(&[0, 0]);
    let sigma_dag = lowering_operator(&layout, 0)?.adjoint();
    let drive: Vec<C64> = excited.iter().map(|&i| sigma_dag.get(i, g0)).collect();
    let mut lines: Vec<AbsorptionLine> = (0..excited.len())
        .map(|k| {
            let v = eig.eigenvectors.column(k);
            let amp: C64 = v.iter().zip(&drive).map(|(a, b)| a.conj() * b).sum();
            AbsorptionLine { energy: eig.eigenvalues[k], weight: amp.norm_sqr() }
        })
        .collect();
    lines.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(lines)
}

/// Lorentzian `h (w/2)² / ((x − c)² + (w/2)²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianFit {
    pub center: f64,
    /// Full width at half maximum.
    pub width: f64,
    pub height: f64,
    /// Root-mean-square residual relative to the height.
    pub relative_rms: f64,
}

impl LorentzianFit {
    pub fn eval(&self, x: f64) -> f64 {
        let hw = 0.5 * self.width;
        self.height * hw * hw / ((x - self.center).powi(2) + hw * hw)
    }
}

/// Least-squares Lorentzian fit of `(x, y)` samples: initial guess from the
/// weighted quadratic fit of `1/y`, refined by damped Gauss–Newton.
pub fn fit_lorentzian(x: &[f64], y: &[f64]) -> Result<LorentzianFit> {
    if x.len() != y.len() || x.len() < 4 {
        return Err(Error::param("spectrum", "need at least four matching samples to fit a Lorentzian"));
    }
    let (imax, &ymax) = y.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty");
    if !(ymax > 0.0) {
        return Err(Error::param("spectrum", "no positive signal to fit"));
    }
    // 1/y = a x² + b x + c for an exact Lorentzian; weight by y² to undo the
    // amplification of the tails.
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    for (&xi, &yi) in x.iter().zip(y) {
        if yi > 0.0 {
            let w = yi * yi;
            let row = Vector3::new(xi * xi, xi, 1.0);
            ata += row * row.transpose() * w;
            atb += row * (w / yi);
        }
    }
    let mut p = match ata.lu().solve(&atb) {
        Some(q) if q[0] > 0.0 => {
            let c = -q[1] / (2.0 * q[0]);
            let peak_inv = q[2] - q[1] * q[1] / (4.0 * q[0]);
            if peak_inv > 0.0 {
                Vector3::new(c, 2.0 * (peak_inv / q[0]).sqrt(), 1.0 / peak_inv)
            } else {
                Vector3::new(x[imax], (x[x.len() - 1] - x[0]).abs() / 4.0, ymax)
            }
        }
        _ => Vector3::new(x[imax], (x[x.len() - 1] - x[0]).abs() / 4.0, ymax),
    };
    let sse = |p: &Vector3<f64>| -> f64 {
        let f = LorentzianFit { center: p[0], width: p[1], height: p[2], relative_rms: 0.0 };
        x.iter().zip(y).map(|(&xi, &yi)| (f.eval(xi) - yi).powi(2)).sum()
    };
    let mut mu = 1e-3;
    let mut cost = sse(&p);
    for _ in 0..FIT_MAX_ITERATIONS {
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vector3::<f64>::zeros();
        for (&xi, &yi) in x.iter().zip(y) {
            let (c, w, h) = (p[0], p[1], p[2]);
            let hw2 = 0.25 * w * w;
            let den = (xi - c).powi(2) + hw2;
            let shape = hw2 / den;
            let r = h * shape - yi;
            let jac = Vector3::new(
                h * hw2 * 2.0 * (xi - c) / (den * den),
                h * (0.5 * w / den - hw2 * 0.5 * w / (den * den)),
                shape,
            );
            jtj += jac * jac.transpose();
            jtr += jac * r;
        }
        let mut accepted = false;
        for _ in 0..30 {
            let damped = jtj + Matrix3::from_diagonal(&jtj.diagonal()) * mu;
            let Some(step) = damped.lu().solve(&(-jtr)) else { break };
            let trial = p + step;
            let trial_cost = sse(&trial);
            if trial[1] > 0.0 && trial_cost <= cost {
                let small = step.iter().zip(p.iter()).all(|(s, v)| s.abs() <= FIT_TOL * (1.0 + v.abs()));
                p = trial;
                cost = trial_cost;
                mu = (mu * 0.3).max(1e-15);
                accepted = true;
                if small {
                    return finish_fit(p, cost, x.len());
                }
                break;
            }
            mu *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    finish_fit(p, cost, x.len())
}

fn finish_fit(p: Vector3<f64>, cost: f64, n: usize) -> Result<LorentzianFit> {
    if !(p[1] > 0.0 && p[2] > 0.0) || p.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solver("Lorentzian fit diverged".into()));
    }
    Ok(LorentzianFit { center: p[0], width: p[1], height: p[2], relative_rms: (cost / n as f64).sqrt() / p[2] })
}

/// Weak-drive absorption of a vibronic ring in the single-excitation
/// manifold.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbsorptionConfig {
    pub n: usize,
    pub d: f64,
    pub lambda: f64,
    pub nu: f64,
    pub gamma_nu: f64,
    /// Cap on the total number of vibrational quanta over all molecules.
    #[serde(default = "default_max_quanta")]
    pub max_quanta: usize,
    /// Drive amplitude `η` (uniform phase over the ring).
    #[serde(default = "default_drive")]
    pub eta: f64,
    /// Laser detunings from the bare transition.
    pub detunings: Vec<f64>,
}

fn default_max_quanta() -> usize {
    1
}

fn default_drive() -> f64 {
    0.01
}

/// Sampled spectrum plus fit and reference rates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AbsorptionSpectrum {
    pub detunings: Vec<f64>,
    /// Total excited population per detuning.
    pub excitation: Vec<f64>,
    pub fit: LorentzianFit,
    /// Set when the largest population exceeds [`LINEAR_RESPONSE_LIMIT`].
    pub saturated: bool,
    /// `Ω_S` at `λ = 0`.
    pub symmetric_shift: f64,
    /// `Γ^λ_S`.
    pub symmetric_decay: f64,
    /// `Σ_k κ_{S→A_k}`.
    pub total_transfer: f64,
    pub subspace_dim: usize,
}

impl AbsorptionSpectrum {
    /// `Γ_S + Σ_k κ_{S→A_k}`.
    pub fn predicted_width(&self) -> f64 {
        self.symmetric_decay + self.total_transfer
    }
}

/// Steady-state excited population to second order in the drive, computed
/// exactly in linear response from the graded generator restricted to at
/// most one electronic excitation and `max_quanta` vibrational quanta.
pub fn absorption_spectrum(cfg: &AbsorptionConfig) -> Result<AbsorptionSpectrum> {
    if cfg.n < 1 {
        return Err(Error::param("n", "must be >= 1"));
    }
    if !(cfg.eta > 0.0 && cfg.eta.is_finite()) {
        return Err(Error::param("eta", "must be finite and > 0"));
    }
    let (positions, cm) = if cfg.n == 1 {
        (vec![[0.0; 3]], independent_couplings(1, 1.0))
    } else {
        let geom = build_ring(cfg.n, cfg.d, Polarization::Perpendicular)?;
        let cm = coupling_matrices(&geom, 1.0)?;
        (geom.positions, cm)
    };
    let mut model = SystemModel::new(positions, cm.clone(), ModelMode::Full);
    model.vib = Some(VibronicParams {
        lambda: cfg.lambda,
        nu: cfg.nu,
        gamma_nu: cfg.gamma_nu,
        n_max: cfg.max_quanta.max(1),
        collapse_convention: CollapseConvention::PolaronCorrected,
    });
    let (layout, full_spec) = build_spec(&model)?;
    let quanta_ok = |i: usize| layout.vibrational_quanta(i) <= cfg.max_quanta;
    let sub = Subspace::from_predicate(&layout, |i| layout.excitation_number(i) <= 1 && quanta_ok(i));
    let spec = full_spec.restrict(&sub)?;
    let grading = spec.excitation_grading.clone().expect("graded by construction");
    let gl = GradedLiouvillian::new(&spec, &grading)?;

    // Undriven ground-manifold state.
    let ground = Subspace::from_predicate(&layout, |i| layout.excitation_number(i) == 0 && quanta_ok(i));
    let rho_ground = steady_state(&full_spec.restrict(&ground)?)?;
    let g0: Vec<usize> = gl.grade_indices(0).iter().map(|&p| ground.position(sub.state(p)).expect("ground state")).collect();
    let rho00 = DMatrix::from_fn(g0.len(), g0.len(), |a, b| rho_ground.matrix()[(g0[a], g0[b])]);

    let ops: Vec<SparseOperator> = (0..cfg.n).map(|j| lowering_operator(&layout, j)).collect::<Result<_>>()?;
    let refs: Vec<(C64, &SparseOperator)> = ops.iter().map(|o| (C64::new(cfg.eta, 0.0), o)).collect();
    let up = sub.restrict(&SparseOperator::linear_combination(layout.total_dim(), &refs)?.adjoint())?;
    let v_up = gl.operator_block(&up, 1, 0);

    let excitation: Vec<f64> =
        cfg.detunings.par_iter().map(|&delta| gl.weak_drive_excitation(&rho00, &v_up, delta)).collect::<Result<_>>()?;
    let fit = fit_lorentzian(&cfg.detunings, &excitation)?;
    let spacing = cfg.detunings.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    if spacing > MAX_SPACING_PER_WIDTH * fit.width {
        return Err(Error::param(
            "detunings",
            format!("grid spacing {spacing} exceeds a tenth of the fitted width {}", fit.width),
        ));
    }
    let bare = collective_modes(&cm, 0.0, 0.0)?;
    let dressed = collective_modes(&cm, cfg.lambda, 0.0)?;
    let total_transfer =
        if cfg.n > 1 { ring_transfer_rates(&cm, cfg.lambda, cfg.nu, cfg.gamma_nu, TransferVariant::VibrationalWidth)?.total_s_to_a() } else { 0.0 };
    Ok(AbsorptionSpectrum {
        saturated: excitation.iter().any(|&p| p > LINEAR_RESPONSE_LIMIT),
        detunings: cfg.detunings.clone(),
        excitation,
        fit,
        symmetric_shift: bare[0].energy_shift,
        symmetric_decay: dressed[0].decay,
        total_transfer,
        subspace_dim: sub.dim(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_core::DensityMatrix;
    use crate::vibronic::franck_condon_distribution;

    fn basis_rho(layout: &HilbertLayout, digits: &[usize]) -> DMatrix<C64> {
        DensityMatrix::basis_state(layout.total_dim(), layout.index(digits)).into_matrix()
    }

    #[test]
    fn single_excited_emitter_emits_gamma0() {
        let layout = HilbertLayout::two_level_sites(1);
        let rho = basis_rho(&layout, &[1]);
        let g = DMatrix::from_element(1, 1, 1.0);
        assert!((emitted_intensity(&rho, &layout, &g, &[0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn doubly_inverted_pair_correlation() {
        // ⟨E†E†EE⟩ = 4 and ⟨E†E⟩ = 2 on |ee⟩.
        let layout = HilbertLayout::two_level_sites(2);
        let rho = basis_rho(&layout, &[1, 1]);
        assert!((g2_zero(&rho, &layout, &[0, 1]).unwrap().unwrap() - 1.0).abs() < 1e-14);
        assert!((g2_zero_collective(&rho, &layout, 2, None).unwrap().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn single_emitter_antibunches_and_ground_is_undefined() {
        let layout = HilbertLayout::two_level_sites(1);
        assert_eq!(g2_zero(&basis_rho(&layout, &[1]), &layout, &[0]).unwrap(), Some(0.0));
        assert_eq!(g2_zero(&basis_rho(&layout, &[0]), &layout, &[0]).unwrap(), None);
    }

    #[test]
    fn pulse_envelope_values() {
        let p = PulseSpec { eta: 260.0, t0: 0.1, tau: 0.1, omega_l: 0.0, k_vector: [1.0, 0.0, 0.0] };
        assert_eq!(pulse_envelope(&p, 0.1), 260.0);
        assert!((pulse_envelope(&p, 0.2) - 260.0 / std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn lorentzian_fit_recovers_parameters() {
        let truth = LorentzianFit { center: 1.3, width: 0.7, height: 2.5, relative_rms: 0.0 };
        let x: Vec<f64> = (0..121).map(|i| -2.0 + 0.05 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&v| truth.eval(v)).collect();
        let f = fit_lorentzian(&x, &y).unwrap();
        assert!((f.center - 1.3).abs() < 1e-9 && (f.width - 0.7).abs() < 1e-9 && (f.height - 2.5).abs() < 1e-9, "{f:?}");
    }

    #[test]
    fn polaron_lines_follow_franck_condon() {
        let lambda: f64 = 0.3;
        // Fock truncation converges from the bottom of the ladder up: at
        // n_max = 8 the third and fourth lines carry 3e-7 and 2e-5 errors,
        // at n_max = 12 every line up to n = 4 is exact to 1e-8.
        let lines = franck_condon_absorption_weights(lambda, 1.0, 8).unwrap();
        for (n, line) in lines.iter().take(3).enumerate() {
            assert!((line.energy - n as f64).abs() < 1e-8, "E_{n} = {}", line.energy);
        }
        for (n, line) in lines.iter().take(4).enumerate() {
            assert!((line.weight - franck_condon_distribution(lambda, n)).abs() < 1e-3);
        }
        let lines = franck_condon_absorption_weights(lambda, 1.0, 12).unwrap();
        for (n, line) in lines.iter().take(5).enumerate() {
            assert!((line.energy - n as f64).abs() < 1e-8, "E_{n} = {}", line.energy);
        }
    }

    #[test]
    fn single_emitter_absorption_has_natural_width() {
        let cfg = AbsorptionConfig {
            n: 1,
            d: 0.1,
            lambda: 0.0,
            nu: 5.0,
            gamma_nu: 1.0,
            max_quanta: 1,
            eta: 1e-3,
            detunings: (0..81).map(|i| -2.0 + 0.05 * i as f64).collect(),
        };
        let s = absorption_spectrum(&cfg).unwrap();
        assert!((s.fit.width - 1.0).abs() < 1e-6, "{:?}", s.fit);
        assert!(s.fit.center.abs() < 1e-8);
        assert!(!s.saturated);
    }
}
