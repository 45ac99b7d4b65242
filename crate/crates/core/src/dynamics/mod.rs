//! Lindblad master equations: generator specification, time propagation and
//! steady states.
//!
//! A [`LiouvillianSpec`] holds the Hamiltonian (rotating frame), a list of
//! dissipators in non-diagonal form
//! `Σ_mm' R_mm' (L_m ρ L_m'† − ½{L_m'† L_m, ρ})`, and optional
//! time-dependent drives `f(t) O + f̄(t) O†`. [`evolve`] integrates `ρ(t)`
//! either with the explicit adaptive Dormand–Prince scheme or, for
//! time-independent generators with excitation-ladder structure, with the
//! implicit graded propagator of [`ladder`]. [`steady_state`] solves for the
//! null vector of the generator on the coherence-free sector.

pub mod dopri;
pub mod ladder;
pub mod liouvillian;
pub mod model;

use std::sync::Arc;

use nalgebra::{DMatrix, FullPivLU};
use serde::{Deserialize, Serialize};

pub use liouvillian::Liouvillian;
pub use model::{build_dissipators, build_hamiltonian, build_spec, ModelMode, PumpChannel, SystemModel};

use crate::quantum_core::{DensityMatrix, SparseOperator, Subspace};
use crate::{Error, Result, C64};
use ladder::{GradedLiouvillian, LadderOptions};
use liouvillian::{superoperator_dense, PairIndex};

/// Tolerance on the minimum eigenvalue of a rate matrix.
pub const RATE_MATRIX_PSD_TOL: f64 = -1e-9;
/// Tolerance on the Hermiticity of a rate matrix.
pub const RATE_MATRIX_HERMITICITY_TOL: f64 = 1e-10;
/// Largest number of coherence-free unknowns solved by dense LU.
pub const DENSE_STEADY_STATE_LIMIT: usize = 2500;
/// Convergence threshold `‖dρ/dt‖₁` of the long-time steady-state fallback.
pub const STEADY_STATE_DERIVATIVE_TOL: f64 = 1e-10;
/// Relative pivot size below which the constrained steady-state system is
/// declared rank deficient.
pub const NULL_SPACE_PIVOT_TOL: f64 = 1e-12;

/// Time-dependent complex envelope `f(t)`.
pub type Envelope = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// Drive term `f(t) O + f̄(t) O†`.
#[derive(Clone)]
pub struct Drive {
    pub envelope: Envelope,
    pub operator: SparseOperator,
}

impl std::fmt::Debug for Drive {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Drive").field("operator_nnz", &self.operator.nnz()).finish()
    }
}

/// One dissipator `Σ_mm' R_mm' (L_m ρ L_m'† − ½{L_m'† L_m, ρ})`.
#[derive(Debug, Clone)]
pub struct Dissipator {
    /// Hermitian positive semidefinite `M × M` rate matrix.
    pub rate_matrix: DMatrix<C64>,
    /// The `M` collapse operators.
    pub collapse_ops: Vec<SparseOperator>,
}

impl Dissipator {
    /// Single collapse operator at `rate`.
    pub fn single(rate: f64, op: SparseOperator) -> Self {
        Self { rate_matrix: DMatrix::from_element(1, 1, C64::new(rate, 0.0)), collapse_ops: vec![op] }
    }

    /// Real symmetric rate matrix over `ops`.
    pub fn from_real(rates: &DMatrix<f64>, ops: Vec<SparseOperator>) -> Self {
        Self { rate_matrix: rates.map(|v| C64::new(v, 0.0)), collapse_ops: ops }
    }

    /// Independent channels `γ_m D[L_m]`.
    pub fn diagonal(rates: &[f64], ops: Vec<SparseOperator>) -> Self {
        let r = DMatrix::from_fn(rates.len(), rates.len(), |i, j| C64::new(if i == j { rates[i] } else { 0.0 }, 0.0));
        Self { rate_matrix: r, collapse_ops: ops }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        let m = self.collapse_ops.len();
        if m == 0 {
            return Err(Error::param("dissipator", "collapse operator list is empty"));
        }
        if self.rate_matrix.nrows() != m || self.rate_matrix.ncols() != m {
            return Err(Error::DimensionMismatch { expected: m, got: self.rate_matrix.nrows() });
        }
        for op in &self.collapse_ops {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: op.dim() });
            }
        }
        let herm = (&self.rate_matrix - self.rate_matrix.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max);
        let scale = self.rate_matrix.iter().map(|v| v.norm()).fold(1.0, f64::max);
        if herm > RATE_MATRIX_HERMITICITY_TOL * scale {
            return Err(Error::param("rate_matrix", format!("not Hermitian (error {herm:e})")));
        }
        let min = nalgebra::SymmetricEigen::new(self.rate_matrix.clone()).eigenvalues.min();
        if min < RATE_MATRIX_PSD_TOL * scale {
            return Err(Error::param("rate_matrix", format!("not positive semidefinite (min eigenvalue {min:e})")));
        }
        Ok(())
    }
}

/// Complete description of one master equation.
#[derive(Debug, Clone)]
pub struct LiouvillianSpec {
    pub hamiltonian: SparseOperator,
    pub dissipators: Vec<Dissipator>,
    pub drives: Vec<Drive>,
    /// Electronic excitation number of every basis state, when known; enables
    /// the graded propagator and the coherence-free steady-state sector.
    pub excitation_grading: Option<Vec<usize>>,
}

impl LiouvillianSpec {
    pub fn new(hamiltonian: SparseOperator) -> Self {
        Self { hamiltonian, dissipators: Vec::new(), drives: Vec::new(), excitation_grading: None }
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// Check rate matrices (Hermitian PSD), collapse lists and dimensions.
    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        if self.hamiltonian.hermiticity_error() > 1e-10 * self.hamiltonian.values().iter().map(|v| v.norm()).fold(1.0, f64::max) {
            return Err(Error::param("hamiltonian", "not Hermitian"));
        }
        for d in &self.dissipators {
            d.validate(dim)?;
        }
        for d in &self.drives {
            if d.operator.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: d.operator.dim() });
            }
        }
        if let Some(g) = &self.excitation_grading {
            if g.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: g.len() });
            }
        }
        Ok(())
    }

    /// Copy of the spec with all drives removed.
    pub fn without_drives(&self) -> Self {
        Self { drives: Vec::new(), ..self.clone() }
    }

    /// Restriction of every operator to an invariant (or deliberately
    /// truncated) subspace.
    pub fn restrict(&self, sub: &Subspace) -> Result<Self> {
        let dissipators = self
            .dissipators
            .iter()
            .map(|d| {
                Ok(Dissipator {
                    rate_matrix: d.rate_matrix.clone(),
                    collapse_ops: d.collapse_ops.iter().map(|op| sub.restrict(op)).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?;
        let drives = self
            .drives
            .iter()
            .map(|d| Ok(Drive { envelope: d.envelope.clone(), operator: sub.restrict(&d.operator)? }))
            .collect::<Result<_>>()?;
        Ok(Self {
            hamiltonian: sub.restrict(&self.hamiltonian)?,
            dissipators,
            drives,
            excitation_grading: self.excitation_grading.as_ref().map(|g| sub.states().iter().map(|&s| g[s]).collect()),
        })
    }

    /// Whether the graded (ladder) propagator applies.
    pub fn ladder_compatible(&self) -> bool {
        self.excitation_grading.as_ref().is_some_and(|g| GradedLiouvillian::compatible(self, g))
    }
}

/// Gaussian laser pulse `η exp[−(t−t0)²/τ²]` at rotating-frame detuning
/// `omega_l` and wave vector `k_vector` (in units of `k0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    pub eta: f64,
    pub t0: f64,
    pub tau: f64,
    #[serde(default)]
    pub omega_l: f64,
    #[serde(default = "default_k_vector")]
    pub k_vector: [f64; 3],
}

fn default_k_vector() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

impl PulseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::param("pulse.tau", "must be positive"));
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::param("pulse.eta", "must be non-negative"));
        }
        if !self.t0.is_finite() || !self.omega_l.is_finite() || self.k_vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("pulse", "non-finite field"));
        }
        Ok(())
    }

    /// Real envelope `η exp[−(t−t0)²/τ²]`.
    pub fn amplitude(&self, t: f64) -> f64 {
        self.eta * (-((t - self.t0) / self.tau).powi(2)).exp()
    }

    /// Complex drive coefficient `f(t) = Ω_ℓ(t) e^{iω_ℓ t}` multiplying
    /// `Σ_j e^{−ik·r_j} σ_j`.
    pub fn coefficient(&self, t: f64) -> C64 {
        C64::from_polar(self.amplitude(t), self.omega_l * t)
    }

    /// Time after which the envelope is below `rel` of its peak.
    pub fn switch_off_time(&self, rel: f64) -> f64 {
        self.t0 + self.tau * (-rel.ln()).sqrt()
    }
}

/// Propagation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Ladder when compatible, explicit otherwise.
    #[default]
    Auto,
    Explicit,
    Ladder,
}

/// Integration controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    pub method: Method,
    pub max_steps: usize,
    /// Upper bound on explicit steps (useful to resolve short pulses).
    pub max_step: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, method: Method::Auto, max_steps: 2_000_000, max_step: f64::INFINITY }
    }
}

/// Diagnostics of one trajectory.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EvolveDiagnostics {
    /// `max_t |Tr ρ(t) − 1|` over the grid.
    pub max_trace_drift: f64,
    /// `max_t ‖ρ − ρ†‖_max` over the grid.
    pub max_hermiticity_error: f64,
    /// Smallest eigenvalue of the final state.
    pub final_min_eigenvalue: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub used_ladder: bool,
}

impl EvolveDiagnostics {
    /// Combine diagnostics of consecutive or independent runs.
    pub fn merge(&self, other: &Self) -> Self {
        Self {
            max_trace_drift: self.max_trace_drift.max(other.max_trace_drift),
            max_hermiticity_error: self.max_hermiticity_error.max(other.max_hermiticity_error),
            final_min_eigenvalue: self.final_min_eigenvalue.min(other.final_min_eigenvalue),
            accepted_steps: self.accepted_steps + other.accepted_steps,
            rejected_steps: self.rejected_steps + other.rejected_steps,
            used_ladder: self.used_ladder || other.used_ladder,
        }
    }
}

/// States on the grid plus diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub diagnostics: EvolveDiagnostics,
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::param("t_grid", "empty"));
    }
    if t_grid.iter().any(|t| !t.is_finite()) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("t_grid", "must be finite and strictly increasing"));
    }
    Ok(())
}

fn hermiticity(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut e: f64 = 0.0;
    for j in 0..n {
        for i in j..n {
            e = e.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    e
}

/// Replace a column-major `n × n` matrix by its Hermitian part. Applied to
/// every explicit derivative so that Runge–Kutta combinations stay exactly
/// Hermitian instead of accumulating round-off.
fn hermitian_part_in_place(m: &mut [C64], n: usize) {
    for j in 0..n {
        m[j * n + j].im = 0.0;
        for i in j + 1..n {
            let v = 0.5 * (m[j * n + i] + m[i * n + j].conj());
            m[j * n + i] = v;
            m[i * n + j] = v.conj();
        }
    }
}

/// Integrate `ρ(t)` over `t_grid`, calling `observe(i, t_i, ρ(t_i))` at each
/// grid point instead of storing states.
pub fn evolve_with(
    spec: &LiouvillianSpec,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    opts: &EvolveOptions,
    mut observe: impl FnMut(usize, f64, &DMatrix<C64>) -> Result<()>,
) -> Result<EvolveDiagnostics> {
    spec.validate()?;
    check_grid(t_grid)?;
    rho0.validate()?;
    if rho0.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: rho0.dim() });
    }
    let use_ladder = match opts.method {
        Method::Explicit => false,
        Method::Ladder => {
            if !spec.ladder_compatible() {
                return Err(Error::Configuration("ladder propagation requested for an incompatible generator".into()));
            }
            true
        }
        Method::Auto => spec.ladder_compatible(),
    };
    let mut diag = EvolveDiagnostics { used_ladder: use_ladder, ..Default::default() };
    let mut last: Option<DMatrix<C64>> = None;
    let n_grid = t_grid.len();
    let mut record = |i: usize, t: f64, rho: &DMatrix<C64>, diag: &mut EvolveDiagnostics| -> Result<()> {
        diag.max_trace_drift = diag.max_trace_drift.max((rho.trace() - C64::new(1.0, 0.0)).norm());
        diag.max_hermiticity_error = diag.max_hermiticity_error.max(hermiticity(rho));
        observe(i, t, rho)?;
        if i + 1 == n_grid {
            last = Some(rho.clone());
        }
        Ok(())
    };
    if use_ladder {
        let grading = spec.excitation_grading.as_ref().expect("checked by ladder_compatible");
        let gl = GradedLiouvillian::new(spec, grading)?;
        let lopts = LadderOptions {
            rtol: opts.rtol,
            atol: opts.atol,
            pade_degree: 3,
            max_steps: opts.max_steps,
            initial_step: None,
        };
        let stats = ladder::integrate(&gl, rho0.matrix(), t_grid, &lopts, |i, t, blocks| {
            let rho = gl.merge(blocks);
            record(i, t, &rho, &mut diag)
        })?;
        diag.accepted_steps = stats.accepted;
        diag.rejected_steps = stats.rejected;
    } else {
        let liou = Liouvillian::new(spec)?;
        let n = spec.dim();
        let mut scratch = Vec::new();
        let dopts = dopri::DopriOptions { rtol: opts.rtol, atol: opts.atol, max_steps: opts.max_steps, max_step: opts.max_step };
        let stats = dopri::integrate(
            |t, y, dy| {
                liou.apply_into(t, y, dy, &mut scratch);
                hermitian_part_in_place(dy, n);
            },
            t_grid,
            rho0.as_slice(),
            &dopts,
            |i, t, y| {
                let rho = DMatrix::from_column_slice(n, n, y);
                record(i, t, &rho, &mut diag)
            },
        )?;
        diag.accepted_steps = stats.accepted;
        diag.rejected_steps = stats.rejected;
    }
    let last = last.expect("final grid point observed");
    diag.final_min_eigenvalue = DensityMatrix::from_matrix(last).min_eigenvalue();
    Ok(diag)
}

/// Integrate `ρ(t)` and return the states on `t_grid`. Trace drift is
/// reported, never corrected.
pub fn evolve(spec: &LiouvillianSpec, rho0: &DensityMatrix, t_grid: &[f64], opts: &EvolveOptions) -> Result<Trajectory> {
    let mut states = Vec::with_capacity(t_grid.len());
    let diagnostics = evolve_with(spec, rho0, t_grid, opts, |_, _, rho| {
        states.push(DensityMatrix::from_matrix(rho.clone()));
        Ok(())
    })?;
    Ok(Trajectory { times: t_grid.to_vec(), states, diagnostics })
}

/// Whether the coherence-free sector `{(a, b): grade(a) = grade(b)}` is
/// invariant: grade-conserving Hamiltonian and uniform-shift collapse
/// operators.
fn coherence_free_sector(spec: &LiouvillianSpec) -> Option<PairIndex> {
    let g = spec.excitation_grading.as_ref()?;
    if !spec.drives.is_empty() || spec.hamiltonian.entries().any(|(r, c, _)| g[r] != g[c]) {
        return None;
    }
    for d in &spec.dissipators {
        for op in &d.collapse_ops {
            let mut shift: Option<i64> = None;
            for (r, c, _) in op.entries() {
                let s = g[r] as i64 - g[c] as i64;
                if shift.is_some_and(|v| v != s) {
                    return None;
                }
                shift = Some(s);
            }
        }
        // Cross terms between operators of different shift would mix sectors.
        let shifts: Vec<Option<i64>> = d
            .collapse_ops
            .iter()
            .map(|op| op.entries().next().map(|(r, c, _)| g[r] as i64 - g[c] as i64))
            .collect();
        for (m, sm) in shifts.iter().enumerate() {
            for (mp, smp) in shifts.iter().enumerate() {
                if let (Some(a), Some(b)) = (sm, smp) {
                    if a != b && d.rate_matrix[(m, mp)] != C64::new(0.0, 0.0) {
                        return None;
                    }
                }
            }
        }
    }
    let dim = spec.dim();
    let pairs = (0..dim).flat_map(|b| (0..dim).filter(move |&a| g[a] == g[b]).map(move |a| (a, b))).collect();
    Some(PairIndex::new(pairs))
}

/// Steady state of a time-independent generator.
///
/// The null vector is computed by a dense full-pivot LU on the invariant
/// coherence-free sector (or on all `dim²` unknowns when no grading is
/// known), with one equation replaced by the trace constraint. A second
/// vanishing pivot signals a degenerate null space. Above
/// [`DENSE_STEADY_STATE_LIMIT`] unknowns the state is obtained by long-time
/// integration until `‖dρ/dt‖₁ <` [`STEADY_STATE_DERIVATIVE_TOL`].
pub fn steady_state(spec: &LiouvillianSpec) -> Result<DensityMatrix> {
    spec.validate()?;
    if !spec.drives.is_empty() {
        return Err(Error::Configuration("steady state requires a time-independent generator".into()));
    }
    let dim = spec.dim();
    let index = coherence_free_sector(spec).unwrap_or_else(|| PairIndex::all(dim));
    if index.len() > DENSE_STEADY_STATE_LIMIT {
        return steady_state_by_integration(spec);
    }
    let mut s = superoperator_dense(spec, &index)?;
    let n = index.len();
    // Replace the equation of ρ_00 by Tr ρ = 1.
    let row = index.get(0, 0).expect("diagonal pairs are always present");
    let mut rhs = nalgebra::DVector::<C64>::zeros(n);
    for q in 0..n {
        let (a, b) = index.pairs[q];
        s[(row, q)] = if a == b { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
    }
    rhs[row] = C64::new(1.0, 0.0);
    let lu = FullPivLU::new(s);
    let u = lu.u();
    let diag: Vec<f64> = (0..n).map(|i| u[(i, i)].norm()).collect();
    let max = diag.iter().copied().fold(0.0, f64::max);
    let deficient = diag.iter().filter(|&&v| v <= NULL_SPACE_PIVOT_TOL * max).count();
    if deficient > 0 {
        return Err(Error::MultipleSteadyStates { dimension: deficient + 1 });
    }
    let x = lu.solve(&rhs).ok_or_else(|| Error::Solver("steady-state system is singular".into()))?;
    let mut rho = DMatrix::<C64>::zeros(dim, dim);
    for (q, &(a, b)) in index.pairs.iter().enumerate() {
        rho[(a, b)] = x[q];
    }
    let mut rho = DensityMatrix::from_matrix(rho);
    rho.hermitize();
    Ok(rho)
}

fn steady_state_by_integration(spec: &LiouvillianSpec) -> Result<DensityMatrix> {
    let liou = Liouvillian::new(spec)?;
    let dim = spec.dim();
    let mut rho = DensityMatrix::maximally_mixed(dim);
    let opts = EvolveOptions { rtol: 1e-10, atol: 1e-13, ..Default::default() };
    let mut span = 10.0;
    let mut elapsed = 0.0;
    while elapsed < 1e6 {
        let traj = evolve(spec, &rho, &[0.0, span], &opts)?;
        rho = traj.states.into_iter().last().expect("two grid points");
        elapsed += span;
        let deriv: f64 = liou.apply(0.0, rho.matrix()).iter().map(|v| v.norm()).sum();
        if deriv < STEADY_STATE_DERIVATIVE_TOL {
            rho.hermitize();
            return Ok(rho);
        }
        span *= 2.0;
    }
    Err(Error::Solver("long-time integration did not reach a steady state".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_core::{lowering_operator, HilbertLayout};

    fn emitter_spec(gamma: f64, pump: f64) -> LiouvillianSpec {
        let layout = HilbertLayout::two_level_sites(1);
        let s = lowering_operator(&layout, 0).unwrap();
        let mut spec = LiouvillianSpec::new(SparseOperator::zeros(2));
        spec.dissipators.push(Dissipator::single(gamma, s.clone()));
        if pump > 0.0 {
            spec.dissipators.push(Dissipator::single(pump, s.adjoint()));
        }
        spec.excitation_grading = Some(vec![0, 1]);
        spec
    }

    #[test]
    fn single_emitter_decay_both_methods() {
        let spec = emitter_spec(1.0, 0.0);
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
        for method in [Method::Explicit, Method::Ladder] {
            let opts = EvolveOptions { method, ..Default::default() };
            let traj = evolve(&spec, &DensityMatrix::basis_state(2, 1), &grid, &opts).unwrap();
            for (t, rho) in grid.iter().zip(&traj.states) {
                assert!((rho.matrix()[(1, 1)].re - (-t).exp()).abs() < 1e-7, "{method:?} t = {t}");
            }
            assert!(traj.diagnostics.max_trace_drift < 1e-8);
            assert_eq!(traj.diagnostics.used_ladder, method == Method::Ladder);
        }
    }

    #[test]
    fn pumped_emitter_steady_state() {
        let rho = steady_state(&emitter_spec(1.0, 3.0)).unwrap();
        assert!((rho.matrix()[(1, 1)].re - 0.75).abs() < 1e-12);
        assert!((rho.matrix()[(0, 0)].re - 0.25).abs() < 1e-12);
        let rho = steady_state(&emitter_spec(1.0, 0.0)).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_null_space_is_reported() {
        let mut spec = LiouvillianSpec::new(SparseOperator::zeros(2));
        spec.excitation_grading = Some(vec![0, 1]);
        match steady_state(&spec) {
            Err(Error::MultipleSteadyStates { dimension }) => assert_eq!(dimension, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_rate_matrix_rejected() {
        let s = lowering_operator(&HilbertLayout::two_level_sites(1), 0).unwrap();
        let mut spec = LiouvillianSpec::new(SparseOperator::zeros(2));
        spec.dissipators.push(Dissipator::single(-1.0, s));
        assert!(spec.validate().is_err());
        spec.dissipators[0].collapse_ops.clear();
        assert!(spec.validate().is_err());
    }

    #[test]
    fn ladder_matches_explicit_on_vibronic_dimer() {
        use crate::coupling::coupling_matrices;
        use crate::geometry::build_dimer;
        use crate::vibronic::{CollapseConvention, ThermalEnvironment, VibronicParams};
        let geom = build_dimer(0.1).unwrap();
        let cm = coupling_matrices(&geom, 1.0).unwrap();
        let mut m = SystemModel::new(geom.positions.clone(), cm, ModelMode::Full);
        m.vib = Some(VibronicParams {
            lambda: 0.4,
            nu: 3.0,
            gamma_nu: 2.0,
            n_max: 2,
            collapse_convention: CollapseConvention::PolaronCorrected,
        });
        m.thermal = ThermalEnvironment::from_nbar(0.3);
        m.detuning = 0.7;
        let (layout, spec) = build_spec(&m).unwrap();
        assert!(spec.ladder_compatible());
        let e = layout.index(&[1, 1, 0, 0]);
        let rho0 = DensityMatrix::basis_state(layout.total_dim(), e);
        let grid = [0.0, 0.1, 0.5, 1.0, 3.0];
        let tight = EvolveOptions { rtol: 1e-10, atol: 1e-12, ..Default::default() };
        let a = evolve(&spec, &rho0, &grid, &EvolveOptions { method: Method::Explicit, ..tight }).unwrap();
        let b = evolve(&spec, &rho0, &grid, &EvolveOptions { method: Method::Ladder, ..tight }).unwrap();
        assert!(b.diagnostics.used_ladder);
        for (x, y) in a.states.iter().zip(&b.states) {
            let diff = (x.matrix() - y.matrix()).iter().map(|v| v.norm()).fold(0.0, f64::max);
            assert!(diff < 1e-7, "max deviation {diff}");
        }
        assert!(b.diagnostics.max_trace_drift < 1e-10);
    }

    #[test]
    fn pulse_envelope_values() {
        let p = PulseSpec { eta: 2.0, t0: 1.0, tau: 0.5, omega_l: 0.0, k_vector: [1.0, 0.0, 0.0] };
        assert_eq!(p.amplitude(1.0), 2.0);
        assert!((p.amplitude(1.5) - 2.0 / std::f64::consts::E).abs() < 1e-15);
        assert!((p.amplitude(0.5) - 2.0 / std::f64::consts::E).abs() < 1e-15);
        assert!(p.amplitude(p.switch_off_time(1e-12)) <= 2.0 * 1e-12 * (1.0 + 1e-9));
    }
}
