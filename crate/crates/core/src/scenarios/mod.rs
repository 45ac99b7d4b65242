//! Named end-to-end experiments, their configuration and persisted results.
//!
//! [`run_scenario`] computes everything in memory (in parallel over sweep
//! points and disorder realizations), then writes the CSV tables, a JSON
//! summary and the manifest through a single writer. For a fixed
//! configuration and seed the CSV output is bit-identical between runs.

pub mod config;
pub mod drivers;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::band_structure::{circulant_dispersion, dispersion};
use crate::collective::collective_modes;
use crate::coupling::coupling_matrices;
use crate::dynamics::EvolveDiagnostics;
use crate::geometry::{apply_disorder, build_ring, DisorderSpec};
use crate::laser::{
    analytic_steady_state, full_laser_model_with, reduced_steady_state, threshold_analysis, LaserPoint, ThresholdReport,
};
use crate::observables::{absorption_spectrum, AbsorptionConfig, LorentzianFit};
use crate::transfer::{validate_against_full_model, DimerTransferConfig, ModeTransfer};
use crate::{Error, Result};

pub use config::{
    parse_config, parse_config_str, CouplingTableConfig, DickeDecayConfig, DispersionConfig, LaserSweep,
    LaserSweepVariable, NanoringLaserConfig, PulseConfig, PulsedRingConfig, ScenarioConfig, ScenarioKind, TimeGrid,
    Tolerances, SCENARIOS,
};
pub use drivers::*;
pub use output::{
    Cell, FileEntry, Manifest, Provenance, RealizationSeed, RunDiagnostics, Table, MANIFEST_FILE, SUMMARY_FILE,
};

/// Early-time window of the symmetric-channel fit, in units of `1/(NΓ0)`.
pub const DICKE_FIT_WINDOW: f64 = 0.2;
/// Ring excitation below which the pumped ring is compared with the closed
/// pump-ring equations.
pub const LASER_WEAK_EXCITATION: f64 = 0.2;

/// Names and descriptions of the available scenarios.
pub fn list_scenarios() -> &'static [(&'static str, &'static str)] {
    &SCENARIOS
}

/// Peak and fits of one decay trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DickeTraceSummary {
    pub nbar: f64,
    /// Parabola-refined intensity maximum.
    pub peak_time: f64,
    pub peak_intensity: f64,
    /// Early-time symmetric-channel rate (`None` if the grid has no samples
    /// in the fit window).
    pub symmetric_decay_rate: Option<f64>,
    /// Exact `dI/dt` at `t = 0` (mean over realizations).
    pub initial_slope: f64,
    /// Superradiance criterion of the ordered ring.
    pub predicted_superradiant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulsedSummary {
    /// Carrier frequency used.
    pub omega_l: f64,
    /// Time after which the drive is dropped.
    pub pulse_off_time: f64,
    pub peak_time: f64,
    pub peak_excitation: f64,
    /// Log-linear decay constant of the excitation over `fit_window`.
    pub late_decay_rate: Option<f64>,
    /// `Γ0 (1 − e^{−λ²(1+2n̄)})`.
    pub predicted_trapped_rate: f64,
    /// Smallest renormalized collective decay rate of the ring.
    pub dark_mode_decay: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionSummary {
    pub bright_count: usize,
    pub bright_cutoff: i64,
    /// `Σ_k Γ_k`.
    pub total_decay: f64,
    /// `max_k |z_k^dense − z_k^DFT|`.
    pub circulant_max_deviation: f64,
    /// `Γ0 (1 − e^{−λ²(1+2n̄)})`.
    pub dark_floor: f64,
    /// Largest `|Γ_k − floor|/floor` over modes with `|k|` beyond twice the
    /// cutoff (`None` if there are none or the floor vanishes).
    pub dark_floor_max_relative_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferSummary {
    pub omega: f64,
    pub nu: f64,
    pub gamma_s: f64,
    pub gamma_a: f64,
    pub rates: ModeTransfer,
    pub e_decay_rate: f64,
    pub kappa_extracted: f64,
    pub max_p_a_discrepancy: f64,
    pub peak_p_a_full: f64,
    pub peak_p_a_rate: f64,
    pub peak_time_discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionSummary {
    pub fit: LorentzianFit,
    /// `Γ_S + Σ_k κ_{S→A_k}`.
    pub predicted_width: f64,
    pub symmetric_shift: f64,
    pub symmetric_decay: f64,
    pub total_transfer: f64,
    pub saturated: bool,
    pub subspace_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaserSummary {
    /// Renormalized `Ω_S`, `Γ_S` of the ring.
    pub omega_s: f64,
    pub gamma_s: f64,
    /// Full-model points, in sweep order.
    pub points: Vec<LaserPoint>,
    /// Closed-form `⟨S†S⟩` per point (only without cross decay).
    pub analytic_ss: Option<Vec<f64>>,
    /// Largest `|ss_full − ss_reduced|/ss_reduced` over points with ring
    /// excitation below [`LASER_WEAK_EXCITATION`].
    pub weak_pump_max_relative_deviation: Option<f64>,
    /// Threshold of `⟨S†S⟩` versus the swept coupling.
    pub threshold: Option<ThresholdReport>,
}

/// Typed scenario summary, also written to [`SUMMARY_FILE`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "snake_case")]
pub enum ScenarioSummary {
    DickeDecay { traces: Vec<DickeTraceSummary> },
    PulsedRing(PulsedSummary),
    Dispersion(DispersionSummary),
    DimerTransfer(TransferSummary),
    RingAbsorption(AbsorptionSummary),
    NanoringLaser(LaserSummary),
    CouplingTable { rows: Vec<CouplingRow> },
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub out_dir: PathBuf,
    pub manifest: Manifest,
    pub summary: ScenarioSummary,
    /// The tables as written.
    pub tables: Vec<Table>,
}

impl ScenarioResult {
    pub fn table(&self, file: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.file == file)
    }
}

struct Computed {
    tables: Vec<Table>,
    summary: ScenarioSummary,
    diagnostics: RunDiagnostics,
}

/// Validate, run and persist one scenario into `out_dir`.
pub fn run_scenario(config: &ScenarioConfig, out_dir: &Path) -> Result<ScenarioResult> {
    config.validate()?;
    let start = Instant::now();
    let computed = match &config.kind {
        ScenarioKind::DickeDecay(c) => run_dicke(c, config.seed)?,
        ScenarioKind::PulsedRing(c) => run_pulsed(c)?,
        ScenarioKind::Dispersion(c) => run_dispersion(c)?,
        ScenarioKind::DimerTransfer(c) => run_transfer(c)?,
        ScenarioKind::RingAbsorption(c) => run_absorption(c)?,
        ScenarioKind::NanoringLaser(c) => run_laser(c)?,
        ScenarioKind::CouplingTable(c) => run_coupling_table(c)?,
    };
    let summary_json = serde_json::to_value(&computed.summary)?;
    let config_json = serde_json::to_value(config)?;
    let diagnostics = computed.diagnostics;
    let manifest = output::write_outputs(out_dir, &computed.tables, &summary_json, |files| Manifest {
        config: config_json,
        files,
        diagnostics,
        provenance: Provenance {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_seconds: start.elapsed().as_secs_f64(),
        },
    })?;
    Ok(ScenarioResult { out_dir: out_dir.to_path_buf(), manifest, summary: computed.summary, tables: computed.tables })
}

fn merge_all<'a>(diags: impl IntoIterator<Item = &'a EvolveDiagnostics>) -> Option<EvolveDiagnostics> {
    diags.into_iter().copied().reduce(|a, b| a.merge(&b))
}

fn run_dicke(c: &DickeDecayConfig, seed: Option<u64>) -> Result<Computed> {
    let ordered = build_ring(c.n, c.d, c.polarization)?;
    let disorder: Option<DisorderSpec> = c.disorder.map(|mut d| {
        if let Some(s) = seed {
            d.seed = s;
        }
        d
    });
    let realizations = disorder.map_or(1, |d| d.realizations);
    let times = c.t_grid.times();
    let opts = c.tolerances.evolve_options();
    let jobs: Vec<(usize, usize)> =
        (0..c.nbar.len()).flat_map(|i| (0..realizations).map(move |r| (i, r))).collect();
    let runs: Vec<(RingTrace, f64)> = jobs
        .par_iter()
        .map(|&(i, r)| {
            let geom = match &disorder {
                Some(spec) => apply_disorder(&ordered, spec, r)?,
                None => ordered.clone(),
            };
            let trace = inverted_ring_decay(&geom, c.lambda, c.nbar[i], &times, &opts)?;
            let slope = measured_initial_slope(&geom, c.lambda, c.nbar[i])?;
            Ok((trace, slope))
        })
        .collect::<Result<_>>()?;

    let fit_t_max = c.fit_t_max.unwrap_or(DICKE_FIT_WINDOW / c.n as f64);
    let mut tables = Vec::new();
    let mut traces = Vec::new();
    for (i, &nbar) in c.nbar.iter().enumerate() {
        let group = &runs[i * realizations..(i + 1) * realizations];
        let mean = average_traces(group.iter().map(|g| &g.0), &times);
        let slope = group.iter().map(|g| g.1).sum::<f64>() / realizations as f64;
        let (peak_time, peak_intensity) = refined_peak(&mean.times, &mean.intensity).unwrap_or((f64::NAN, f64::NAN));
        traces.push(DickeTraceSummary {
            nbar,
            peak_time,
            peak_intensity,
            symmetric_decay_rate: symmetric_decay_fit(&mean, fit_t_max).ok(),
            initial_slope: slope,
            predicted_superradiant: initial_intensity_slope(&ordered, c.lambda, nbar)?.predicted_superradiant,
        });
        tables.push(ring_trace_table(&format!("trace_nbar_{i}.csv"), &mean));
    }
    let mut summary_table = Table::new(
        "peaks.csv",
        "table",
        &["nbar", "peak_time", "peak_intensity", "symmetric_decay_rate", "initial_slope", "predicted_superradiant"],
    );
    for s in &traces {
        summary_table.push(vec![
            s.nbar.into(),
            s.peak_time.into(),
            s.peak_intensity.into(),
            s.symmetric_decay_rate.unwrap_or(f64::NAN).into(),
            s.initial_slope.into(),
            s.predicted_superradiant.into(),
        ]);
    }
    tables.push(summary_table);
    let realization_seeds = match &disorder {
        Some(d) => (0..d.realizations).map(|r| RealizationSeed { index: r, seed: d.seed, stream: r as u64 }).collect(),
        None => Vec::new(),
    };
    Ok(Computed {
        tables,
        summary: ScenarioSummary::DickeDecay { traces },
        diagnostics: RunDiagnostics {
            evolution: merge_all(runs.iter().map(|r| &r.0.diagnostics)),
            realization_seeds,
        },
    })
}

/// Sample-wise mean of traces on a common grid, in input order.
fn average_traces<'a>(traces: impl Iterator<Item = &'a RingTrace>, times: &[f64]) -> RingTrace {
    let mut mean = RingTrace {
        times: times.to_vec(),
        intensity: vec![0.0; times.len()],
        excitation: vec![0.0; times.len()],
        symmetric_population: vec![0.0; times.len()],
        diagnostics: EvolveDiagnostics::default(),
    };
    let mut count = 0usize;
    for t in traces {
        for j in 0..times.len() {
            mean.intensity[j] += t.intensity[j];
            mean.excitation[j] += t.excitation[j];
            mean.symmetric_population[j] += t.symmetric_population[j];
        }
        mean.diagnostics = if count == 0 { t.diagnostics } else { mean.diagnostics.merge(&t.diagnostics) };
        count += 1;
    }
    let inv = 1.0 / count.max(1) as f64;
    for v in [&mut mean.intensity, &mut mean.excitation, &mut mean.symmetric_population] {
        v.iter_mut().for_each(|x| *x *= inv);
    }
    mean
}

fn ring_trace_table(file: &str, trace: &RingTrace) -> Table {
    Table::from_columns(
        file,
        "trace",
        &[
            ("t", &trace.times),
            ("intensity", &trace.intensity),
            ("excitation", &trace.excitation),
            ("symmetric_population", &trace.symmetric_population),
        ],
    )
}

fn run_pulsed(c: &PulsedRingConfig) -> Result<Computed> {
    let geom = build_ring(c.n, c.d, c.polarization)?;
    // In traced mode only λ enters; ν and Γ_ν are placeholders.
    let vib = pulsed_vibronics(c.lambda, c.nu.unwrap_or(1.0), c.gamma_nu.unwrap_or(0.0), c.n_max);
    let omega_l = symmetric_resonance(&geom, c.lambda, c.nbar, c.mode)?;
    let pulse = c.pulse.spec(omega_l);
    let run = PulsedRun { geom: &geom, vib, nbar: c.nbar, mode: c.mode, pulse };
    let trace = pulsed_ring_run(&run, &c.t_grid.times(), &c.tolerances.evolve_options())?;
    let (peak_time, peak_excitation) = refined_peak(&trace.times, &trace.excitation).unwrap_or((f64::NAN, f64::NAN));
    let late_decay_rate = match c.fit_window {
        Some([lo, hi]) => Some(exponential_decay_rate(&trace.times, &trace.excitation, lo, hi)?),
        None => None,
    };
    let modes = collective_modes(&coupling_matrices(&geom, 1.0)?, c.lambda, c.nbar)?;
    let summary = PulsedSummary {
        omega_l: pulse.omega_l,
        pulse_off_time: pulse.switch_off_time(PULSE_OFF_LEVEL),
        peak_time,
        peak_excitation,
        late_decay_rate,
        predicted_trapped_rate: 1.0 - (-c.lambda * c.lambda * (1.0 + 2.0 * c.nbar)).exp(),
        dark_mode_decay: modes.iter().map(|m| m.decay).fold(f64::INFINITY, f64::min),
    };
    Ok(Computed {
        tables: vec![ring_trace_table("trace.csv", &trace)],
        summary: ScenarioSummary::PulsedRing(summary),
        diagnostics: RunDiagnostics { evolution: Some(trace.diagnostics), realization_seeds: Vec::new() },
    })
}

fn run_dispersion(c: &DispersionConfig) -> Result<Computed> {
    let geom = build_ring(c.n, c.d, c.polarization)?;
    let cm = coupling_matrices(&geom, 1.0)?;
    let disp = dispersion(&geom, &cm, c.lambda, c.nbar)?;
    let dft = circulant_dispersion(&cm, c.lambda, c.nbar);
    let circulant_max_deviation =
        disp.eigenvalues.iter().zip(&dft).map(|(a, (_, b))| (a - b).norm()).fold(0.0, f64::max);
    let dark_floor = 1.0 - (-c.lambda * c.lambda * (1.0 + 2.0 * c.nbar)).exp();
    let deep_dark: Vec<f64> =
        disp.modes.iter().filter(|m| m.k.abs() > 2 * disp.bright_cutoff).map(|m| m.decay).collect();
    let dark_floor_max_relative_deviation = (dark_floor > 0.0 && !deep_dark.is_empty())
        .then(|| deep_dark.iter().map(|g| (g - dark_floor).abs() / dark_floor).fold(0.0, f64::max));
    let mut table = Table::new("dispersion.csv", "table", &["k", "q_d_over_2pi", "energy_shift", "decay", "bright"]);
    for m in &disp.modes {
        let qd = m.q * c.d / (2.0 * std::f64::consts::PI);
        table.push(vec![m.k.into(), qd.into(), m.energy_shift.into(), m.decay.into(), m.bright.into()]);
    }
    let mut tables = vec![table];
    if c.dump_couplings {
        for (file, m) in [("omega_matrix.csv", &cm.omega), ("gamma_matrix.csv", &cm.gamma)] {
            tables.push(matrix_table(file, m, c.n, c.d));
        }
    }
    let summary = DispersionSummary {
        bright_count: disp.bright_count(),
        bright_cutoff: disp.bright_cutoff,
        total_decay: disp.total_decay(),
        circulant_max_deviation,
        dark_floor,
        dark_floor_max_relative_deviation,
    };
    Ok(Computed { tables, summary: ScenarioSummary::Dispersion(summary), diagnostics: RunDiagnostics::default() })
}

/// Row-major matrix dump; the leading columns repeat `N` and `d` so every
/// row is self-describing.
fn matrix_table(file: &str, m: &nalgebra::DMatrix<f64>, n: usize, d: f64) -> Table {
    let mut cols: Vec<String> = vec!["N".into(), "d".into(), "row".into()];
    cols.extend((0..m.ncols()).map(|j| format!("c{j}")));
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new(file, "matrix", &col_refs);
    for i in 0..m.nrows() {
        let mut row: Vec<Cell> = vec![(n as i64).into(), d.into(), (i as i64).into()];
        row.extend(m.row(i).iter().map(|&x| Cell::Real(x)));
        t.push(row);
    }
    t
}

fn run_transfer(c: &DimerTransferConfig) -> Result<Computed> {
    let cmp = validate_against_full_model(c)?;
    if cmp.rate.times.len() != cmp.full.times.len() {
        return Err(Error::DimensionMismatch { expected: cmp.full.times.len(), got: cmp.rate.times.len() });
    }
    let populations = Table::from_columns(
        "populations.csv",
        "trace",
        &[
            ("t", &cmp.full.times),
            ("p_e", &cmp.full.p_e),
            ("p_s", &cmp.full.p_s),
            ("p_a", &cmp.full.p_a),
            ("p_e_rate", &cmp.rate.p_e),
            ("p_s_rate", &cmp.rate.p_s),
            ("p_a_rate", &cmp.rate.p_a),
        ],
    );
    let from_s = Table::from_columns(
        "from_symmetric.csv",
        "trace",
        &[
            ("t", &cmp.from_symmetric.times),
            ("p_e", &cmp.from_symmetric.p_e),
            ("p_s", &cmp.from_symmetric.p_s),
            ("p_a", &cmp.from_symmetric.p_a),
        ],
    );
    let summary = TransferSummary {
        omega: cmp.omega,
        nu: cmp.nu,
        gamma_s: cmp.gamma_s,
        gamma_a: cmp.gamma_a,
        rates: cmp.rates,
        e_decay_rate: cmp.e_decay_rate,
        kappa_extracted: cmp.kappa_extracted,
        max_p_a_discrepancy: cmp.max_p_a_discrepancy,
        peak_p_a_full: cmp.peak_p_a_full,
        peak_p_a_rate: cmp.peak_p_a_rate,
        peak_time_discrepancy: cmp.peak_time_discrepancy,
    };
    Ok(Computed {
        tables: vec![populations, from_s],
        summary: ScenarioSummary::DimerTransfer(summary),
        diagnostics: RunDiagnostics { evolution: Some(cmp.diagnostics), realization_seeds: Vec::new() },
    })
}

fn run_absorption(c: &AbsorptionConfig) -> Result<Computed> {
    let spec = absorption_spectrum(c)?;
    let fitted: Vec<f64> = spec.detunings.iter().map(|&x| spec.fit.eval(x)).collect();
    let table = Table::from_columns(
        "spectrum.csv",
        "spectrum",
        &[("detuning", &spec.detunings), ("excitation", &spec.excitation), ("lorentzian", &fitted)],
    );
    let summary = AbsorptionSummary {
        fit: spec.fit,
        predicted_width: spec.predicted_width(),
        symmetric_shift: spec.symmetric_shift,
        symmetric_decay: spec.symmetric_decay,
        total_transfer: spec.total_transfer,
        saturated: spec.saturated,
        subspace_dim: spec.subspace_dim,
    };
    Ok(Computed {
        tables: vec![table],
        summary: ScenarioSummary::RingAbsorption(summary),
        diagnostics: RunDiagnostics::default(),
    })
}

fn run_laser(c: &NanoringLaserConfig) -> Result<Computed> {
    let base = c.laser.setup()?;
    let results: Vec<(LaserPoint, f64, crate::laser::ReducedState, Option<f64>)> = c
        .points()
        .par_iter()
        .map(|cfg| {
            let setup = cfg.setup()?;
            let point = full_laser_model_with(&setup)?;
            let reduced = reduced_steady_state(&setup.pump, &setup.ring, 1.0, c.reduced_form)?;
            let analytic = if setup.pump.gamma_coupling == 0.0 {
                Some(analytic_steady_state(&setup.pump, &setup.ring, 1.0)?)
            } else {
                None
            };
            Ok((point, sweep_value(c, cfg, &point), reduced, analytic))
        })
        .collect::<Result<_>>()?;

    let var = c.sweep.variable.column();
    let mut table = Table::new(
        "sweep.csv",
        "sweep",
        &[
            var,
            "ss",
            "pp",
            "sp_re",
            "sp_im",
            "intensity",
            "g2",
            "g2_collective",
            "ring_excitation",
            "ss_reduced",
            "pp_reduced",
            "sp_re_reduced",
            "sp_im_reduced",
            "min_eigenvalue",
        ],
    );
    for (p, x, r, _) in &results {
        table.push(
            [
                *x,
                p.ss,
                p.pp,
                p.sp_re,
                p.sp_im,
                p.intensity,
                p.g2,
                p.g2_collective,
                p.ring_excitation,
                r.ss,
                r.pp,
                r.sp.re,
                r.sp.im,
                p.min_eigenvalue,
            ]
            .into_iter()
            .map(Cell::Real)
            .collect(),
        );
    }
    let weak: Vec<f64> = results
        .iter()
        .filter(|(p, ..)| p.ring_excitation < LASER_WEAK_EXCITATION)
        .map(|(p, _, r, _)| (p.ss - r.ss).abs() / r.ss)
        .collect();
    let threshold = if c.sweep.variable == LaserSweepVariable::OmegaCoupling && results.len() >= 3 {
        let x: Vec<f64> = results.iter().map(|r| r.1).collect();
        let y: Vec<f64> = results.iter().map(|r| r.0.ss).collect();
        threshold_analysis(&x, &y).ok()
    } else {
        None
    };
    let analytic_ss: Option<Vec<f64>> = results.iter().map(|r| r.3).collect();
    let evolution = results
        .iter()
        .map(|(p, ..)| EvolveDiagnostics {
            max_trace_drift: p.trace_error,
            max_hermiticity_error: p.hermiticity_error,
            final_min_eigenvalue: p.min_eigenvalue,
            ..Default::default()
        })
        .reduce(|a, b| a.merge(&b));
    let summary = LaserSummary {
        omega_s: base.ring.omega_s,
        gamma_s: base.ring.gamma_s,
        points: results.iter().map(|r| r.0).collect(),
        analytic_ss,
        weak_pump_max_relative_deviation: (!weak.is_empty()).then(|| weak.iter().copied().fold(0.0, f64::max)),
        threshold,
    };
    Ok(Computed {
        tables: vec![table],
        summary: ScenarioSummary::NanoringLaser(summary),
        diagnostics: RunDiagnostics { evolution, realization_seeds: Vec::new() },
    })
}

fn sweep_value(c: &NanoringLaserConfig, cfg: &crate::laser::LaserConfig, p: &LaserPoint) -> f64 {
    match c.sweep.variable {
        LaserSweepVariable::OmegaCoupling => cfg.omega_coupling.unwrap_or(f64::NAN),
        LaserSweepVariable::EtaP => cfg.eta_p,
        LaserSweepVariable::PumpFrequency => p.omega_p,
    }
}

fn run_coupling_table(c: &CouplingTableConfig) -> Result<Computed> {
    let rows = dimer_coupling_table(&c.separations)?;
    let mut table = Table::new("couplings.csv", "table", &["d", "omega_12", "gamma_12", "gamma_s", "gamma_a"]);
    for r in &rows {
        table.push([r.d, r.omega_12, r.gamma_12, r.gamma_s, r.gamma_a].into_iter().map(Cell::Real).collect());
    }
    Ok(Computed {
        tables: vec![table],
        summary: ScenarioSummary::CouplingTable { rows },
        diagnostics: RunDiagnostics::default(),
    })
}
