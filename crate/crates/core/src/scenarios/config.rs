//! Scenario configuration documents: strict JSON parsing, defaults and range
//! validation.
//!
//! A document is a JSON object with a `scenario` discriminator, the fields of
//! that scenario, and two optional envelope keys shared by all scenarios:
//! `out_dir` and `seed`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::model::ModelMode;
use crate::dynamics::{EvolveOptions, PulseSpec};
use crate::geometry::{DisorderSpec, Polarization};
use crate::laser::{LaserConfig, PumpDetuning, ReducedForm};
use crate::observables::AbsorptionConfig;
use crate::transfer::DimerTransferConfig;
use crate::{Error, Result};

/// Uniform time grid `t_i = t_start + (t_final − t_start) i/(n_times − 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    #[serde(default)]
    pub t_start: f64,
    pub t_final: f64,
    pub n_times: usize,
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        let n = self.n_times;
        let span = self.t_final - self.t_start;
        (0..n).map(|i| self.t_start + span * i as f64 / (n - 1) as f64).collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_start.is_finite() && self.t_start >= 0.0) {
            return Err(Error::param("t_grid.t_start", "must be finite and >= 0"));
        }
        if !(self.t_final.is_finite() && self.t_final > self.t_start) {
            return Err(Error::param("t_grid.t_final", "must be finite and > t_start"));
        }
        if self.n_times < 2 {
            return Err(Error::param("t_grid.n_times", "must be >= 2"));
        }
        Ok(())
    }
}

/// Integrator tolerances shared by the time-dependent scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: default_rtol(), atol: default_atol() }
    }
}

impl Tolerances {
    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions { rtol: self.rtol, atol: self.atol, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("tolerances.rtol", self.rtol), ("tolerances.atol", self.atol)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::param(name, format!("must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }
}

fn default_rtol() -> f64 {
    1e-8
}

fn default_atol() -> f64 {
    1e-10
}

fn default_nbar_list() -> Vec<f64> {
    vec![0.0]
}

fn default_dicke_grid() -> TimeGrid {
    TimeGrid { t_start: 0.0, t_final: 1.0, n_times: 201 }
}

fn default_pulsed_n_max() -> usize {
    2
}

fn default_k_vector() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

/// Superradiant decay of a fully inverted ring in the traced model, one
/// trace per vibrational occupancy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DickeDecayConfig {
    pub n: usize,
    pub d: f64,
    pub lambda: f64,
    /// Thermal vibrational occupancies `n̄`, one trace each.
    #[serde(default = "default_nbar_list")]
    pub nbar: Vec<f64>,
    #[serde(default)]
    pub polarization: Polarization,
    #[serde(default = "default_dicke_grid")]
    pub t_grid: TimeGrid,
    /// Positional disorder averaged over its realizations.
    #[serde(default)]
    pub disorder: Option<DisorderSpec>,
    /// Upper end of the early-time symmetric-channel fit; `0.2/N` if absent.
    #[serde(default)]
    pub fit_t_max: Option<f64>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Pulse of a [`PulsedRingConfig`]; the carrier defaults to the symmetric
/// resonance of the ring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    pub eta: f64,
    pub t0: f64,
    pub tau: f64,
    #[serde(default)]
    pub omega_l: Option<f64>,
    /// Wave vector in units of `k0`.
    #[serde(default = "default_k_vector")]
    pub k_vector: [f64; 3],
}

impl PulseConfig {
    pub fn spec(&self, resonance: f64) -> PulseSpec {
        PulseSpec {
            eta: self.eta,
            t0: self.t0,
            tau: self.tau,
            omega_l: self.omega_l.unwrap_or(resonance),
            k_vector: self.k_vector,
        }
    }
}

/// Gaussian-pulse excitation of a ring from its ground state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulsedRingConfig {
    pub n: usize,
    pub d: f64,
    #[serde(default)]
    pub polarization: Polarization,
    pub lambda: f64,
    #[serde(default)]
    pub nbar: f64,
    #[serde(default)]
    pub mode: ModelMode,
    /// Vibrational frequency and relaxation rate; required in `full` mode.
    #[serde(default)]
    pub nu: Option<f64>,
    #[serde(default)]
    pub gamma_nu: Option<f64>,
    /// Fock truncation per molecule in `full` mode.
    #[serde(default = "default_pulsed_n_max")]
    pub n_max: usize,
    pub pulse: PulseConfig,
    pub t_grid: TimeGrid,
    /// Window `[t_lo, t_hi]` of the late-time exponential fit of the
    /// excitation.
    #[serde(default)]
    pub fit_window: Option<[f64; 2]>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Collective dispersion of a ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionConfig {
    pub n: usize,
    pub d: f64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub nbar: f64,
    #[serde(default)]
    pub polarization: Polarization,
    /// Also write the bare `Ω` and `Γ` matrices.
    #[serde(default)]
    pub dump_couplings: bool,
}

/// Quantity swept by a [`NanoringLaserConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LaserSweepVariable {
    /// Bare pump-ring coherent coupling `Ω_p`.
    OmegaCoupling,
    /// Incoherent pump rate `η_p`.
    EtaP,
    /// Pump transition frequency `ω_p`.
    PumpFrequency,
}

impl LaserSweepVariable {
    pub fn column(&self) -> &'static str {
        match self {
            Self::OmegaCoupling => "omega_coupling",
            Self::EtaP => "eta_p",
            Self::PumpFrequency => "omega_p",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserSweep {
    pub variable: LaserSweepVariable,
    pub values: Vec<f64>,
}

/// Incoherently pumped emitter at the center of a ring, swept over one
/// parameter; every point is compared with the closed pump-ring equations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NanoringLaserConfig {
    pub laser: LaserConfig,
    pub sweep: LaserSweep,
    #[serde(default)]
    pub reduced_form: ReducedForm,
}

impl NanoringLaserConfig {
    /// Point configurations of the sweep, in order.
    pub fn points(&self) -> Vec<LaserConfig> {
        self.sweep
            .values
            .iter()
            .map(|&x| {
                let mut c = self.laser.clone();
                match self.sweep.variable {
                    LaserSweepVariable::OmegaCoupling => c.omega_coupling = Some(x),
                    LaserSweepVariable::EtaP => c.eta_p = x,
                    LaserSweepVariable::PumpFrequency => c.detuning = PumpDetuning::Value(x),
                }
                c
            })
            .collect()
    }
}

/// Pair couplings of a perpendicular-dipole dimer over a set of separations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingTableConfig {
    pub separations: Vec<f64>,
}

/// The physics of one scenario.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "scenario", rename_all = "snake_case")]
pub enum ScenarioKind {
    DickeDecay(DickeDecayConfig),
    PulsedRing(PulsedRingConfig),
    Dispersion(DispersionConfig),
    DimerTransfer(DimerTransferConfig),
    RingAbsorption(AbsorptionConfig),
    NanoringLaser(NanoringLaserConfig),
    CouplingTable(CouplingTableConfig),
}

/// Names and one-line descriptions of all scenarios.
pub const SCENARIOS: [(&str, &str); 7] = [
    ("dicke_decay", "superradiant decay of a fully inverted ring, one trace per vibrational occupancy"),
    ("pulsed_ring", "Gaussian-pulse excitation of a ring and its post-pulse decay"),
    ("dispersion", "collective shifts and decay rates of a ring versus quasimomentum"),
    ("dimer_transfer", "vibrationally assisted symmetric-to-antisymmetric transfer in a dimer"),
    ("ring_absorption", "weak-drive absorption spectrum of a vibronic ring with Lorentzian fit"),
    ("nanoring_laser", "incoherently pumped center emitter coupled to a ring, swept over one parameter"),
    ("coupling_table", "dimer pair couplings over a set of separations"),
];

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        let i = match self {
            Self::DickeDecay(_) => 0,
            Self::PulsedRing(_) => 1,
            Self::Dispersion(_) => 2,
            Self::DimerTransfer(_) => 3,
            Self::RingAbsorption(_) => 4,
            Self::NanoringLaser(_) => 5,
            Self::CouplingTable(_) => 6,
        };
        SCENARIOS[i].0
    }

    /// Range checks; error names are field paths within the scenario.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::DickeDecay(c) => {
                check_ring(c.n, c.d)?;
                check_nonneg("lambda", c.lambda)?;
                if c.nbar.is_empty() {
                    return Err(Error::param("nbar", "needs at least one occupancy"));
                }
                for (i, &nb) in c.nbar.iter().enumerate() {
                    check_nonneg(&format!("nbar[{i}]"), nb)?;
                }
                c.t_grid.validate()?;
                if let Some(dis) = &c.disorder {
                    dis.validate()?;
                }
                if let Some(t) = c.fit_t_max {
                    check_positive("fit_t_max", t)?;
                }
                c.tolerances.validate()
            }
            Self::PulsedRing(c) => {
                check_ring(c.n, c.d)?;
                check_nonneg("lambda", c.lambda)?;
                check_nonneg("nbar", c.nbar)?;
                c.pulse.spec(0.0).validate()?;
                c.t_grid.validate()?;
                if c.mode == ModelMode::Full {
                    check_positive("nu", c.nu.ok_or_else(|| Error::param("nu", "required in full mode"))?)?;
                    check_nonneg("gamma_nu", c.gamma_nu.ok_or_else(|| Error::param("gamma_nu", "required in full mode"))?)?;
                    if c.n_max < 1 {
                        return Err(Error::param("n_max", "must be >= 1"));
                    }
                }
                if let Some([lo, hi]) = c.fit_window {
                    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                        return Err(Error::param("fit_window", "needs finite t_lo < t_hi"));
                    }
                }
                c.tolerances.validate()
            }
            Self::Dispersion(c) => {
                check_ring(c.n, c.d)?;
                check_nonneg("lambda", c.lambda)?;
                check_nonneg("nbar", c.nbar)
            }
            Self::DimerTransfer(c) => {
                c.validate()?;
                check_nonneg("lambda", c.lambda)?;
                check_nonneg("gamma_nu", c.gamma_nu)
            }
            Self::RingAbsorption(c) => {
                check_ring(c.n, c.d)?;
                check_nonneg("lambda", c.lambda)?;
                check_positive("nu", c.nu)?;
                check_nonneg("gamma_nu", c.gamma_nu)?;
                if c.detunings.len() < 4 {
                    return Err(Error::param("detunings", "needs at least four points for the fit"));
                }
                Ok(())
            }
            Self::NanoringLaser(c) => {
                c.laser.validate().map_err(|e| prefix_field("laser", e))?;
                if c.sweep.values.is_empty() {
                    return Err(Error::param("sweep.values", "needs at least one value"));
                }
                for p in c.points() {
                    p.validate().map_err(|e| prefix_field("sweep.values", e))?;
                }
                Ok(())
            }
            Self::CouplingTable(c) => {
                if c.separations.is_empty() {
                    return Err(Error::param("separations", "needs at least one separation"));
                }
                for (i, &d) in c.separations.iter().enumerate() {
                    check_positive(&format!("separations[{i}]"), d)?;
                }
                Ok(())
            }
        }
    }
}

fn check_ring(n: usize, d: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::param("n", format!("needs at least 2 emitters, got {n}")));
    }
    check_positive("d", d)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::param(name, format!("must be finite and > 0, got {v}")));
    }
    Ok(())
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::param(name, format!("must be finite and >= 0, got {v}")));
    }
    Ok(())
}

fn prefix_field(prefix: &str, e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => Error::InvalidParameter { name: format!("{prefix}.{name}"), reason },
        other => other,
    }
}

/// A complete configuration document; parse with [`parse_config`].
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioConfig {
    #[serde(flatten)]
    pub kind: ScenarioKind,
    /// Output directory used when none is given on the command line.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    /// Master seed; overrides the seed of a disorder block when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ScenarioConfig {
    pub fn new(kind: ScenarioKind) -> Self {
        Self { kind, out_dir: None, seed: None }
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Range checks with the scenario name prefixed to the field path.
    pub fn validate(&self) -> Result<()> {
        self.kind.validate().map_err(|e| prefix_field(self.name(), e))
    }
}

/// Strict parse of a configuration document: unknown keys, unknown
/// scenarios and out-of-range values are rejected, defaults are filled in.
pub fn parse_config_str(text: &str) -> Result<ScenarioConfig> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let mut map = match value {
        serde_json::Value::Object(m) => m,
        _ => return Err(Error::Configuration("a configuration must be a JSON object".into())),
    };
    // The scenario fields are checked strictly by their own structs; the
    // envelope keys are split off first because the two cannot be combined
    // in one derived deserializer.
    let out_dir = match map.remove("out_dir") {
        None | Some(serde_json::Value::Null) => None,
        Some(serde_json::Value::String(s)) => Some(s),
        Some(_) => return Err(Error::param("out_dir", "must be a string")),
    };
    let seed = match map.remove("seed") {
        None | Some(serde_json::Value::Null) => None,
        Some(v) => Some(v.as_u64().ok_or_else(|| Error::param("seed", "must be a non-negative integer"))?),
    };
    let scenario = match map.get("scenario") {
        Some(serde_json::Value::String(s)) => s.clone(),
        Some(_) => return Err(Error::param("scenario", "must be a string")),
        None => return Err(Error::param("scenario", "missing discriminator")),
    };
    if !SCENARIOS.iter().any(|(n, _)| *n == scenario) {
        let known: Vec<&str> = SCENARIOS.iter().map(|(n, _)| *n).collect();
        return Err(Error::param("scenario", format!("unknown scenario `{scenario}`; known: {}", known.join(", "))));
    }
    map.remove("scenario");
    let kind = deserialize_kind(&scenario, serde_json::Value::Object(map))
        .map_err(|(path, msg)| Error::Configuration(format!("{scenario}.{path}: {msg}")))?;
    let cfg = ScenarioConfig { kind, out_dir, seed };
    cfg.validate()?;
    Ok(cfg)
}

/// Deserialize the fields of a named scenario, reporting the field path of
/// the first error.
fn deserialize_kind(name: &str, fields: serde_json::Value) -> std::result::Result<ScenarioKind, (String, String)> {
    fn strict<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> std::result::Result<T, (String, String)> {
        serde_path_to_error::deserialize(v).map_err(|e| (e.path().to_string(), e.into_inner().to_string()))
    }
    Ok(match name {
        "dicke_decay" => ScenarioKind::DickeDecay(strict(fields)?),
        "pulsed_ring" => ScenarioKind::PulsedRing(strict(fields)?),
        "dispersion" => ScenarioKind::Dispersion(strict(fields)?),
        "dimer_transfer" => ScenarioKind::DimerTransfer(strict(fields)?),
        "ring_absorption" => ScenarioKind::RingAbsorption(strict(fields)?),
        "nanoring_laser" => ScenarioKind::NanoringLaser(strict(fields)?),
        "coupling_table" => ScenarioKind::CouplingTable(strict(fields)?),
        other => return Err(("scenario".into(), format!("unknown scenario `{other}`"))),
    })
}

/// [`parse_config_str`] on the contents of a file.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    parse_config_str(&text)
}
