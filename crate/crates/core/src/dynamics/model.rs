//! Assembly of the molecular Hamiltonian and dissipators from couplings and
//! vibronic parameters.
//!
//! Two model modes are supported:
//!
//! * [`ModelMode::Full`] — one two-level system plus one truncated vibrational
//!   mode per molecule, Holstein coupling, bare dipole-dipole couplings, and
//!   vibrational relaxation at `Γ_ν`;
//! * [`ModelMode::Traced`] — electronic degrees of freedom only, with every
//!   off-diagonal coupling multiplied by the thermal displacement factor
//!   `exp(−λ²(1+2n̄))`.
//!
//! Energies are given in the frame rotating at the bare transition
//! frequency, so `detuning` replaces `ω0`.

use nalgebra::DMatrix;

use super::{Dissipator, Drive, LiouvillianSpec, PulseSpec};
use crate::coupling::CouplingMatrices;
use crate::geometry::{dot, Vec3};
use crate::quantum_core::{boson_annihilation, lowering_operator, HilbertLayout, SparseOperator};
use crate::vibronic::{renormalized_couplings, CollapseConvention, ThermalEnvironment, VibronicParams};
use crate::{Error, Result, C64, K0};

/// Simulation mode of the vibrational degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelMode {
    /// Explicit vibrational modes.
    Full,
    /// Vibrations traced out into renormalized couplings.
    #[default]
    Traced,
}

/// Incoherently pumped electronic site (collapse `σ_p†` at `eta_p`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpChannel {
    /// Electronic site index of the pumped emitter.
    pub site: usize,
    pub eta_p: f64,
    /// Rotating-frame transition frequency of the pumped emitter.
    pub detuning: f64,
}

/// Everything needed to assemble one master equation.
#[derive(Debug, Clone)]
pub struct SystemModel {
    /// Positions of all electronic sites (used for drive phases).
    pub positions: Vec<Vec3>,
    /// Bare couplings over all electronic sites. In traced mode they are
    /// renormalized when `vib` is present.
    pub couplings: CouplingMatrices,
    pub vib: Option<VibronicParams>,
    pub thermal: ThermalEnvironment,
    pub mode: ModelMode,
    /// Rotating-frame transition frequency of the molecules.
    pub detuning: f64,
    pub pulse: Option<PulseSpec>,
    pub pump: Option<PumpChannel>,
}

impl SystemModel {
    /// Undriven, unpumped model with zero detuning.
    pub fn new(positions: Vec<Vec3>, couplings: CouplingMatrices, mode: ModelMode) -> Self {
        Self {
            positions,
            couplings,
            vib: None,
            thermal: ThermalEnvironment::default(),
            mode,
            detuning: 0.0,
            pulse: None,
            pump: None,
        }
    }

    /// Number of electronic sites.
    pub fn sites(&self) -> usize {
        self.couplings.n()
    }

    fn validate(&self) -> Result<()> {
        let n = self.sites();
        if self.positions.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.positions.len() });
        }
        if let Some(v) = &self.vib {
            v.validate()?;
        }
        if !(self.thermal.nbar >= 0.0 && self.thermal.nbar.is_finite()) {
            return Err(Error::param("thermal.nbar", "must be finite and >= 0"));
        }
        if let Some(p) = &self.pulse {
            p.validate()?;
        }
        if let Some(p) = &self.pump {
            if p.site >= n {
                return Err(Error::param("pump.site", "out of range"));
            }
            if !(p.eta_p >= 0.0 && p.eta_p.is_finite()) {
                return Err(Error::param("pump.eta_p", "must be finite and >= 0"));
            }
        }
        if self.mode == ModelMode::Full {
            if self.vib.is_none() {
                return Err(Error::Configuration("full mode requires vibronic parameters".into()));
            }
            if self.pump.is_some() {
                return Err(Error::Configuration("pumped models are simulated in traced mode only".into()));
            }
        }
        Ok(())
    }

    /// Hilbert layout implied by the mode: in full mode electronic sites
    /// `0..N` followed by boson modes `N..2N`.
    pub fn layout(&self) -> Result<HilbertLayout> {
        self.validate()?;
        match self.mode {
            ModelMode::Full => HilbertLayout::molecules_with_modes(self.sites(), self.vib.expect("validated").n_max),
            ModelMode::Traced => Ok(HilbertLayout::two_level_sites(self.sites())),
        }
    }

    /// Couplings entering the generator: renormalized in traced mode.
    pub fn effective_couplings(&self) -> CouplingMatrices {
        match (self.mode, &self.vib) {
            (ModelMode::Traced, Some(v)) => renormalized_couplings(&self.couplings, v.lambda, self.thermal.nbar),
            _ => self.couplings.clone(),
        }
    }
}

fn check_layout(model: &SystemModel, layout: &HilbertLayout) -> Result<()> {
    let expected = model.layout()?;
    if model.mode == ModelMode::Traced && !layout.boson_indices().is_empty() {
        return Err(Error::Configuration("traced mode cannot be combined with explicit vibrational modes".into()));
    }
    if layout != &expected {
        return Err(Error::Configuration(format!(
            "layout inconsistent with model: expected {} subsystems of total dimension {}, got {} of {}",
            expected.len(),
            expected.total_dim(),
            layout.len(),
            layout.total_dim()
        )));
    }
    Ok(())
}

fn number_op(s: &SparseOperator) -> Result<SparseOperator> {
    s.adjoint().mul(s)
}

/// Drive operator `Σ_j e^{−ik·r_j} σ_j` over the non-pumped sites.
pub fn drive_operator(model: &SystemModel, layout: &HilbertLayout, pulse: &PulseSpec) -> Result<SparseOperator> {
    let dim = layout.total_dim();
    let k = pulse.k_vector.map(|v| v * K0);
    let mut terms = Vec::new();
    let mut ops = Vec::new();
    for j in 0..model.sites() {
        if model.pump.is_some_and(|p| p.site == j) {
            continue;
        }
        ops.push(lowering_operator(layout, j)?);
        terms.push(C64::from_polar(1.0, -dot(&k, &model.positions[j])));
    }
    let refs: Vec<(C64, &SparseOperator)> = terms.into_iter().zip(ops.iter()).collect();
    SparseOperator::linear_combination(dim, &refs)
}

/// Hamiltonian in the rotating frame:
/// `Σ_j (δ_j + λ²ν) σ_j†σ_j + ν b_j†b_j − λν σ_j†σ_j (b_j + b_j†) + Σ_{j≠j'} Ω_jj' σ_j†σ_j'`
/// (full mode) or `Σ_j δ_j σ_j†σ_j + Σ_{j≠j'} Ω^λ_jj' σ_j†σ_j'` (traced).
/// Pulse drives are returned separately by [`build_spec`].
pub fn build_hamiltonian(model: &SystemModel, layout: &HilbertLayout) -> Result<SparseOperator> {
    check_layout(model, layout)?;
    let n = model.sites();
    let dim = layout.total_dim();
    let cm = model.effective_couplings();
    let sigmas: Vec<SparseOperator> = (0..n).map(|j| lowering_operator(layout, j)).collect::<Result<_>>()?;
    let mut h = SparseOperator::zeros(dim);
    for j in 0..n {
        let nj = number_op(&sigmas[j])?;
        let mut delta = model.detuning;
        if let Some(p) = model.pump.filter(|p| p.site == j) {
            delta = p.detuning;
        }
        if model.mode == ModelMode::Full {
            let v = model.vib.expect("validated");
            let b = boson_annihilation(layout, n + j)?;
            let x = b.add(&b.adjoint())?;
            let bb = b.adjoint().mul(&b)?;
            h = h.add(&nj.scale(C64::new(delta + v.lambda * v.lambda * v.nu, 0.0)))?;
            h = h.add(&bb.scale(C64::new(v.nu, 0.0)))?;
            h = h.add(&nj.mul(&x)?.scale(C64::new(-v.lambda * v.nu, 0.0)))?;
        } else if delta != 0.0 {
            h = h.add(&nj.scale(C64::new(delta, 0.0)))?;
        }
        for jp in 0..n {
            let w = cm.omega[(j, jp)];
            if jp != j && w != 0.0 {
                h = h.add(&sigmas[j].adjoint().mul(&sigmas[jp])?.scale(C64::new(w, 0.0)))?;
            }
        }
    }
    Ok(h)
}

/// Dissipators: the radiative channel with the (renormalized in traced
/// mode) `Γ` matrix over all `σ_j` — which includes the mutual pump-ring
/// terms — the incoherent pump `σ_p†`, and in full mode vibrational
/// relaxation (and thermal excitation when `n̄ > 0`) with collapse
/// `b_j − λσ_j†σ_j` or `b_j` per the collapse convention.
pub fn build_dissipators(model: &SystemModel, layout: &HilbertLayout) -> Result<Vec<Dissipator>> {
    check_layout(model, layout)?;
    let n = model.sites();
    let cm = model.effective_couplings();
    let sigmas: Vec<SparseOperator> = (0..n).map(|j| lowering_operator(layout, j)).collect::<Result<_>>()?;
    let mut out = vec![Dissipator::from_real(&cm.gamma, sigmas.clone())];
    if let Some(p) = model.pump {
        if p.eta_p > 0.0 {
            out.push(Dissipator::single(p.eta_p, sigmas[p.site].adjoint()));
        }
    }
    if model.mode == ModelMode::Full {
        let v = model.vib.expect("validated");
        if v.gamma_nu > 0.0 {
            let shift = match v.collapse_convention {
                CollapseConvention::PolaronCorrected => v.lambda,
                CollapseConvention::Local => 0.0,
            };
            let mut lower = Vec::with_capacity(n);
            let mut raise = Vec::with_capacity(n);
            for (j, s) in sigmas.iter().enumerate() {
                let b = boson_annihilation(layout, n + j)?;
                let nj = number_op(s)?.scale(C64::new(shift, 0.0));
                lower.push(b.sub(&nj)?);
                raise.push(b.adjoint().sub(&nj)?);
            }
            let nbar = model.thermal.nbar;
            out.push(Dissipator::diagonal(&vec![v.gamma_nu * (nbar + 1.0); n], lower));
            if nbar > 0.0 {
                out.push(Dissipator::diagonal(&vec![v.gamma_nu * nbar; n], raise));
            }
        }
    }
    Ok(out)
}

/// Complete generator with excitation grading and optional pulse drive.
pub fn build_spec(model: &SystemModel) -> Result<(HilbertLayout, LiouvillianSpec)> {
    let layout = model.layout()?;
    let mut spec = LiouvillianSpec::new(build_hamiltonian(model, &layout)?);
    spec.dissipators = build_dissipators(model, &layout)?;
    if let Some(pulse) = model.pulse {
        let op = drive_operator(model, &layout, &pulse)?;
        spec.drives.push(Drive { envelope: std::sync::Arc::new(move |t| pulse.coefficient(t)), operator: op });
    }
    spec.excitation_grading = Some((0..layout.total_dim()).map(|i| layout.excitation_number(i)).collect());
    Ok((layout, spec))
}

/// Couplings of `n` non-interacting emitters (`Ω = 0`, `Γ = Γ0·I`).
pub fn independent_couplings(n: usize, gamma0: f64) -> CouplingMatrices {
    CouplingMatrices { omega: DMatrix::zeros(n, n), gamma: DMatrix::identity(n, n) * gamma0, gamma0 }
}
