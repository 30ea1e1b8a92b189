//! Command-line front end: scenario presets, JSON configuration, and the
//! simulate / reduce / gate / sweep commands with deterministic CSV/JSON
//! output.
//!
//! All numeric output uses 9 significant digits so identical configs
//! produce byte-identical files.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    absolute_phase, evolve_effective, norm_sq_series, population, relative_phase,
};
use crate::error::{Result, SimError};
use crate::gate::{
    run_full_gate, sweep, GateOptions, GateReport, LogicalState, SweepAxis, SweepField,
    SweepRow, DEFAULT_SWEEP_CAP,
};
use crate::model::{BasisState, ParameterSet, PulseEnvelope, StateVector};
use crate::reduction::{
    adiabaticity_diagnostics, approximate_parameters, effective_parameters, gate_duration,
    phase_mismatch,
};

pub const SCHEMA_VERSION: &str = "cavity-gate-sim/1";

/// Tracked basis states for the simulate time series, in column order.
pub const TRACKED_STATES: [&str; 8] = ["a10", "010", "1a0", "ea0", "ae0", "aa1", "0e0", "0a1"];

const DEFAULT_RAMP_US: f64 = 0.5;
const DEFAULT_N_MAX: usize = 2;

/// Named parameter presets.
#[derive(Debug, Clone, Copy)]
pub struct ScenarioPreset {
    pub name: &'static str,
    pub omega: f64,
    pub delta_l: f64,
    pub delta_c: f64,
    pub g: f64,
    pub gamma: f64,
    pub kappa: f64,
}

pub const PRESETS: [ScenarioPreset; 4] = [
    ScenarioPreset {
        name: "fig2",
        omega: 20.0,
        delta_l: 100.0,
        delta_c: 50.0,
        g: 10.0,
        gamma: 0.0,
        kappa: 0.0,
    },
    ScenarioPreset {
        name: "fig3",
        omega: 10.0,
        delta_l: 30.0,
        delta_c: 8.75,
        g: 3.0,
        gamma: 0.0,
        kappa: 0.0,
    },
    ScenarioPreset {
        name: "fig2-dissipative",
        omega: 20.0,
        delta_l: 100.0,
        delta_c: 50.0,
        g: 10.0,
        gamma: 0.05,
        kappa: 0.1,
    },
    ScenarioPreset {
        name: "fig3-dissipative",
        omega: 10.0,
        delta_l: 30.0,
        delta_c: 8.75,
        g: 3.0,
        gamma: 0.03,
        kappa: 0.1,
    },
];

impl ScenarioPreset {
    pub fn by_name(name: &str) -> Result<&'static ScenarioPreset> {
        PRESETS
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| SimError::Config(format!("preset: unknown preset \"{name}\"")))
    }

    pub fn params(&self) -> ParameterSet<f64> {
        ParameterSet::new(
            self.omega,
            self.delta_l,
            self.delta_c,
            self.g,
            self.gamma,
            self.kappa,
            DEFAULT_N_MAX,
            PulseEnvelope::SinSquaredRamp {
                ramp_time: DEFAULT_RAMP_US,
            },
        )
        .expect("presets are valid")
    }
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepAxisConfig {
    pub field: String,
    pub values: Vec<f64>,
}

/// Everything a command run needs. Explicit fields override the preset
/// individually; a fully-defaulted config runs the fig2 scenario.
#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub omega: Option<f64>,
    pub delta_l: Option<f64>,
    pub delta_c: Option<f64>,
    pub g: Option<f64>,
    pub gamma: Option<f64>,
    pub kappa: Option<f64>,
    pub n_max: Option<usize>,
    pub ramp_time_us: Option<f64>,
    pub initial_state: Option<String>,
    pub t_final_us: Option<f64>,
    pub rel_tol: Option<f64>,
    pub sample_interval_us: Option<f64>,
    pub format: Option<String>,
    pub sweep_axes: Option<Vec<SweepAxisConfig>>,
    pub sweep_cap: Option<usize>,
}

/// Parse and validate a JSON configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig = serde_json::from_str(text).map_err(|e| {
        SimError::Config(format!(
            "line {}, column {}: {}",
            e.line(),
            e.column(),
            e
        ))
    })?;
    config.validate()?;
    Ok(config)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if let Some(name) = &self.preset {
            ScenarioPreset::by_name(name)?;
        }
        if let Some(f) = &self.format {
            if f != "csv" && f != "json" {
                return Err(SimError::Config(format!(
                    "format: expected \"csv\" or \"json\", got \"{f}\""
                )));
            }
        }
        if let Some(axes) = &self.sweep_axes {
            for axis in axes {
                if SweepField::parse(&axis.field).is_none() {
                    return Err(SimError::Config(format!(
                        "sweep_axes.field: unknown field \"{}\"",
                        axis.field
                    )));
                }
            }
        }
        if let Some(r) = self.ramp_time_us {
            if r < 0.0 {
                return Err(SimError::Config("ramp_time_us must be >= 0".into()));
            }
        }
        Ok(())
    }

    /// Resolve the effective parameter set (preset + overrides).
    pub fn params(&self) -> Result<ParameterSet<f64>> {
        let base = match &self.preset {
            Some(name) => *ScenarioPreset::by_name(name)?,
            None => PRESETS[0],
        };
        let ramp = self.ramp_time_us.unwrap_or(DEFAULT_RAMP_US);
        let envelope = if ramp > 0.0 {
            PulseEnvelope::SinSquaredRamp { ramp_time: ramp }
        } else {
            PulseEnvelope::Constant
        };
        ParameterSet::new(
            self.omega.unwrap_or(base.omega),
            self.delta_l.unwrap_or(base.delta_l),
            self.delta_c.unwrap_or(base.delta_c),
            self.g.unwrap_or(base.g),
            self.gamma.unwrap_or(base.gamma),
            self.kappa.unwrap_or(base.kappa),
            self.n_max.unwrap_or(DEFAULT_N_MAX),
            envelope,
        )
    }

    pub fn format(&self) -> OutputFormat {
        match self.format.as_deref() {
            Some("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol.unwrap_or(1e-8)
    }

    pub fn sample_interval(&self) -> f64 {
        self.sample_interval_us.unwrap_or(0.05)
    }

    fn gate_options(&self) -> GateOptions<f64> {
        GateOptions {
            rel_tol: self.rel_tol(),
            sample_interval: self.sample_interval(),
        }
    }

    /// Initial state: '+'-separated basis labels, equal weights.
    pub fn initial_state(&self, params: &ParameterSet<f64>) -> Result<StateVector<f64>> {
        let labels = self.initial_state.as_deref().unwrap_or("a10+010");
        let one = num_complex::Complex::new(1.0, 0.0);
        let parts: Vec<(BasisState, num_complex::Complex<f64>)> = labels
            .split('+')
            .map(|label| BasisState::parse(label.trim()).map(|s| (s, one)))
            .collect::<Result<_>>()?;
        StateVector::superposition(params.dim(), &parts)
    }
}

/// 9 significant digits, locale-free.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.8e}")
}

/// Time-series output of cmd_simulate.
pub fn cmd_simulate(config: &RunConfig) -> Result<String> {
    let params = config.params()?;
    let t_final = match config.t_final_us {
        Some(t) => t,
        None => gate_duration(&params)?,
    };
    let sample = config.sample_interval();
    let initial = config.initial_state(&params)?;
    let traj = evolve_effective(&params, &initial, t_final, config.rel_tol(), sample)?;

    let rows = (t_final / sample).floor() as usize + 1;
    let tracked: Vec<BasisState> = TRACKED_STATES
        .iter()
        .map(|l| BasisState::parse(l))
        .collect::<Result<_>>()?;
    let pops: Vec<Vec<f64>> = tracked
        .iter()
        .map(|s| population(&traj, *s))
        .collect::<Result<_>>()?;
    let norms = norm_sq_series(&traj);
    let abs_phase = absolute_phase(&traj, tracked[0])?;
    let rel_phase = relative_phase(&traj, tracked[0], tracked[1])?;
    let times = traj.times();

    let mut out = String::new();
    let _ = writeln!(out, "# schema: {SCHEMA_VERSION}");
    let mut header = String::from("t_us");
    for label in TRACKED_STATES {
        let _ = write!(header, ",pop_{label}");
    }
    header.push_str(",norm2,abs_phase_a10_rad,rel_phase_rad,rel_phase_wrapped_rad");
    let _ = writeln!(out, "{header}");
    for k in 0..rows.min(times.len()) {
        let _ = write!(out, "{}", fmt_num(times[k]));
        for p in &pops {
            let _ = write!(out, ",{}", fmt_num(p[k]));
        }
        let _ = write!(out, ",{}", fmt_num(norms[k]));
        for series in [&abs_phase, &rel_phase] {
            match series.unwrapped_phase[k] {
                Some(p) => {
                    let _ = write!(out, ",{}", fmt_num(p));
                }
                None => out.push_str(",nan"),
            }
        }
        match rel_phase.unwrapped_phase[k] {
            Some(p) => {
                let _ = writeln!(out, ",{}", fmt_num(wrap_pi(p)));
            }
            None => out.push_str(",nan\n"),
        }
    }
    Ok(out)
}

fn wrap_pi(x: f64) -> f64 {
    let mut v = x % std::f64::consts::TAU;
    if v > std::f64::consts::PI {
        v -= std::f64::consts::TAU;
    } else if v <= -std::f64::consts::PI {
        v += std::f64::consts::TAU;
    }
    v
}

/// Flat key-value report of the reduced-model quantities.
pub fn cmd_reduce(config: &RunConfig) -> Result<String> {
    let params = config.params()?;
    let exact = effective_parameters(&params)?;
    let approx = approximate_parameters(&params)?;
    let diag = adiabaticity_diagnostics(&params);

    let mut pairs: Vec<(String, String)> = vec![
        ("schema".into(), SCHEMA_VERSION.into()),
        ("s_re".into(), fmt_num(exact.s.re)),
        ("s_im".into(), fmt_num(exact.s.im)),
        ("delta_exact_MHz".into(), fmt_num(exact.delta_mhz().re)),
        (
            "omega_eff_exact_MHz".into(),
            fmt_num(exact.omega_eff_mhz().re),
        ),
        (
            "delta_prime_exact_MHz".into(),
            fmt_num(exact.delta_prime_mhz().re),
        ),
        ("delta_approx_MHz".into(), fmt_num(approx.delta_mhz().re)),
        (
            "omega_eff_approx_MHz".into(),
            fmt_num(approx.omega_eff_mhz().re),
        ),
        (
            "delta_prime_approx_MHz".into(),
            fmt_num(approx.delta_prime_mhz().re),
        ),
        ("drive_ratio".into(), fmt_num(diag.drive_ratio)),
        ("cavity_ratio".into(), fmt_num(diag.cavity_ratio)),
        (
            "shifted_drive_ratio".into(),
            fmt_num(diag.shifted_drive_ratio),
        ),
    ];
    match gate_duration(&params) {
        Ok(t) => {
            pairs.push(("gate_time_us".into(), fmt_num(t)));
            pairs.push(("phase_mismatch_rad".into(), fmt_num(phase_mismatch(&params)?)));
        }
        Err(SimError::NoGate(reason)) => {
            pairs.push(("notice".into(), format!("no-gate: {reason}")));
        }
        Err(e) => return Err(e),
    }

    Ok(match config.format() {
        OutputFormat::Csv => {
            let mut out = String::from("key,value\n");
            for (k, v) in &pairs {
                let _ = writeln!(out, "{k},{v}");
            }
            out
        }
        OutputFormat::Json => {
            let map: serde_json::Map<String, serde_json::Value> = pairs
                .into_iter()
                .map(|(k, v)| (k, serde_json::Value::String(v)))
                .collect();
            let mut s = serde_json::to_string_pretty(&map).map_err(|e| {
                SimError::Config(format!("serialization: {e}"))
            })?;
            s.push('\n');
            s
        }
    })
}

fn gate_report_doc(report: &GateReport<f64>, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "# schema: {SCHEMA_VERSION}");
            let _ = writeln!(out, "input,success,conditional_phase_rad,leakage_n2");
            for (entry, label) in report.entries.iter().zip(LogicalState::<f64>::LABELS) {
                let _ = writeln!(
                    out,
                    "{label},{},{},{}",
                    fmt_num(entry.success),
                    fmt_num(entry.conditional_phase),
                    fmt_num(entry.leakage_n2),
                );
            }
            let _ = writeln!(out, "gate_time_us,{}", fmt_num(report.gate_time));
            let _ = writeln!(out, "mean_success,{}", fmt_num(report.mean_success));
            let _ = writeln!(
                out,
                "residual_conditional_phase_rad,{}",
                fmt_num(report.residual_conditional_phase)
            );
            let _ = writeln!(out, "compensation_a_rad,{}", fmt_num(report.compensation_a));
            let _ = writeln!(out, "compensation_b_rad,{}", fmt_num(report.compensation_b));
            let _ = writeln!(
                out,
                "state_fidelity_after_compensation,{}",
                fmt_num(report.state_fidelity_after_compensation)
            );
            let _ = writeln!(out, "gate_failure,{}", report.gate_failure);
            out
        }
        OutputFormat::Json => {
            let entries: Vec<serde_json::Value> = report
                .entries
                .iter()
                .zip(LogicalState::<f64>::LABELS)
                .map(|(entry, label)| {
                    serde_json::json!({
                        "input": label,
                        "success": fmt_num(entry.success),
                        "conditional_phase_rad": fmt_num(entry.conditional_phase),
                        "leakage_n2": fmt_num(entry.leakage_n2),
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "schema": SCHEMA_VERSION,
                "entries": entries,
                "gate_time_us": fmt_num(report.gate_time),
                "mean_success": fmt_num(report.mean_success),
                "residual_conditional_phase_rad": fmt_num(report.residual_conditional_phase),
                "compensation_a_rad": fmt_num(report.compensation_a),
                "compensation_b_rad": fmt_num(report.compensation_b),
                "state_fidelity_after_compensation":
                    fmt_num(report.state_fidelity_after_compensation),
                "gate_failure": report.gate_failure,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("static document");
            s.push('\n');
            s
        }
    }
}

pub fn cmd_gate(config: &RunConfig) -> Result<String> {
    let params = config.params()?;
    let report = run_full_gate(&params, &config.gate_options())?;
    Ok(gate_report_doc(&report, config.format()))
}

fn sweep_table(axes: &[SweepAxis<f64>], rows: &[SweepRow<f64>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# schema: {SCHEMA_VERSION}");
    let mut header = String::new();
    for axis in axes {
        let _ = write!(header, "{}_MHz,", axis.field.name());
    }
    header.push_str("gate_time_us,mean_success,residual_conditional_phase_rad,fidelity,error");
    let _ = writeln!(out, "{header}");
    for row in rows {
        for (_, value) in &row.coordinates {
            let _ = write!(out, "{},", fmt_num(*value));
        }
        match &row.outcome {
            Ok(s) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},",
                    fmt_num(s.gate_time),
                    fmt_num(s.mean_success),
                    fmt_num(s.residual_conditional_phase),
                    fmt_num(s.fidelity),
                );
            }
            Err(e) => {
                let _ = writeln!(out, ",,,,\"{}\"", e.replace('"', "'"));
            }
        }
    }
    out
}

pub fn cmd_sweep(config: &RunConfig) -> Result<String> {
    let params = config.params()?;
    let axes: Vec<SweepAxis<f64>> = config
        .sweep_axes
        .as_deref()
        .unwrap_or(&[])
        .iter()
        .map(|a| {
            SweepField::parse(&a.field)
                .map(|field| SweepAxis {
                    field,
                    values: a.values.clone(),
                })
                .ok_or_else(|| {
                    SimError::Config(format!("sweep_axes.field: unknown field \"{}\"", a.field))
                })
        })
        .collect::<Result<_>>()?;
    let cap = config.sweep_cap.unwrap_or(DEFAULT_SWEEP_CAP);
    let rows = sweep(&params, &axes, cap, &config.gate_options())?;
    Ok(sweep_table(&axes, &rows))
}

/// Process exit code for an error, per the documented contract.
pub fn exit_code(err: &SimError) -> i32 {
    match err {
        SimError::IntegrationFailure { .. }
        | SimError::NoGate(_)
        | SimError::ResonanceProximity { .. } => 3,
        SimError::Io(_) => 4,
        _ => 2,
    }
}
