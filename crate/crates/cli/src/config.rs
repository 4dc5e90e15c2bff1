//! Run configuration: a TOML document with a `[laser]` table and optional
//! `[sweep]`, `[simulation]` and `[output]` tables. All rates are in ps⁻¹.

use std::path::PathBuf;

use nanolase::master::MAX_EMITTERS;
use nanolase::LaserParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("could not read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed configuration: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{key}: {reason}")]
    Invalid { key: String, reason: String },
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        reason: reason.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Stochastic birth-death simulation.
    Sta,
    /// Master equation, at most three emitters.
    Me,
    /// Schawlow-Townes and cold-cavity reference widths.
    Analytic,
    /// Rate-equation steady state.
    Meanfield,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Sta => "sta",
            Method::Me => "me",
            Method::Analytic => "analytic",
            Method::Meanfield => "meanfield",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "sta" => Some(Method::Sta),
            "me" => Some(Method::Me),
            "analytic" => Some(Method::Analytic),
            "meanfield" => Some(Method::Meanfield),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    #[default]
    Pump,
    Emitters,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

/// Whether sweep pump values are per emitter (`P`) or device totals (`n0 P`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PumpConvention {
    #[default]
    PerEmitter,
    Total,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub axis: Axis,
    #[serde(default)]
    pub spacing: Spacing,
    #[serde(default)]
    pub convention: PumpConvention,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Explicit pump values, overriding `start`/`stop`/`points`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    /// Emitter counts for `axis = "emitters"`; the pump is `laser.pump`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emitters: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    /// End time of each trajectory in ps, burn-in included; derived from the
    /// lag span when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_lag: Option<usize>,
    #[serde(default = "default_n_traj")]
    pub n_traj: usize,
    #[serde(default = "default_seed")]
    pub base_seed: u64,
    /// `|g1|` levels bounding the linewidth fit.
    #[serde(default = "default_fit_upper")]
    pub fit_upper: f64,
    #[serde(default = "default_fit_lower")]
    pub fit_lower: f64,
    /// Refuse trajectories with more samples than this.
    #[serde(default = "default_max_samples")]
    pub max_samples: usize,
}

fn default_n_traj() -> usize {
    4
}
fn default_seed() -> u64 {
    1
}
fn default_fit_upper() -> f64 {
    0.8
}
fn default_fit_lower() -> f64 {
    0.2
}
fn default_max_samples() -> usize {
    20_000_000
}

impl Default for SimulationSpec {
    fn default() -> Self {
        Self {
            t_end: None,
            burn_in: None,
            sample_dt: None,
            max_lag: None,
            n_traj: default_n_traj(),
            base_seed: default_seed(),
            fit_upper: default_fit_upper(),
            fit_lower: default_fit_lower(),
            max_samples: default_max_samples(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Output directory; falls back to `$NANOLASE_OUT`, then `nanolase-out`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default = "default_true")]
    pub plots: bool,
}

fn default_true() -> bool {
    true
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: None,
            plots: true,
        }
    }
}

fn default_methods() -> Vec<Method> {
    vec![Method::Sta, Method::Analytic, Method::Meanfield]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    pub laser: LaserParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub simulation: SimulationSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

/// One grid point of a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub index: usize,
    pub params: LaserParams,
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &std::path::Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_owned(),
        source,
    })?;
    parse_config(&text)
}

impl RunConfig {
    /// Canonical TOML rendering; parsing it yields the same configuration.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let l = &self.laser;
        for (key, value) in [
            ("laser.g", l.g),
            ("laser.kappa", l.kappa),
            ("laser.gamma_a", l.gamma_a),
            ("laser.gamma_d", l.gamma_d),
            ("laser.pump", l.pump),
            ("laser.alpha", l.alpha),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(invalid(key, format!("must be a finite non-negative rate, got {value}")));
            }
        }
        if l.n0 == 0 {
            return Err(invalid("laser.n0", "at least one emitter is required"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for m in &self.methods {
            if !seen.insert(*m) {
                return Err(invalid("methods", format!("`{}` listed twice", m.label())));
            }
        }

        let emitter_counts = self.emitter_counts();
        if self.methods.contains(&Method::Me) && emitter_counts.iter().all(|&n| n > MAX_EMITTERS) {
            return Err(invalid(
                "methods",
                format!(
                    "`me` needs n0 <= {MAX_EMITTERS} (master equation size cap), got n0 = {}",
                    emitter_counts.iter().min().copied().unwrap_or(l.n0)
                ),
            ));
        }
        if let Some(s) = &self.sweep {
            match s.axis {
                Axis::Pump => {
                    if s.emitters.is_some() {
                        return Err(invalid("sweep.emitters", "only valid with axis = \"emitters\""));
                    }
                    if let Some(values) = &s.values {
                        if values.is_empty() {
                            return Err(invalid("sweep.values", "grid is empty"));
                        }
                        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                            return Err(invalid("sweep.values", format!("pumps must be positive, got {v}")));
                        }
                    } else {
                        let start = s.start.ok_or_else(|| invalid("sweep.start", "missing"))?;
                        let stop = s.stop.ok_or_else(|| invalid("sweep.stop", "missing"))?;
                        let points = s.points.ok_or_else(|| invalid("sweep.points", "missing"))?;
                        if points == 0 {
                            return Err(invalid("sweep.points", "grid is empty"));
                        }
                        if !(start.is_finite() && start > 0.0) {
                            return Err(invalid("sweep.start", format!("must be positive, got {start}")));
                        }
                        if !(stop.is_finite() && stop >= start) {
                            return Err(invalid("sweep.stop", format!("must be >= start, got {stop}")));
                        }
                    }
                }
                Axis::Emitters => {
                    let list = s
                        .emitters
                        .as_ref()
                        .ok_or_else(|| invalid("sweep.emitters", "missing for axis = \"emitters\""))?;
                    if list.is_empty() {
                        return Err(invalid("sweep.emitters", "grid is empty"));
                    }
                    if list.contains(&0) {
                        return Err(invalid("sweep.emitters", "emitter counts must be positive"));
                    }
                    if s.values.is_some() || s.start.is_some() {
                        return Err(invalid("sweep", "pump grid keys are not used with axis = \"emitters\""));
                    }
                }
            }
        }
        let sim = &self.simulation;
        if sim.n_traj == 0 {
            return Err(invalid("simulation.n_traj", "at least one trajectory is required"));
        }
        for (key, v) in [
            ("simulation.t_end", sim.t_end),
            ("simulation.sample_dt", sim.sample_dt),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(invalid(key, format!("must be positive, got {v}")));
                }
            }
        }
        if let Some(b) = sim.burn_in {
            if !(b.is_finite() && b >= 0.0) {
                return Err(invalid("simulation.burn_in", format!("must be non-negative, got {b}")));
            }
            if sim.t_end.is_some_and(|t| t <= b) {
                return Err(invalid("simulation.t_end", "must exceed burn_in"));
            }
        }
        if sim.max_lag == Some(0) {
            return Err(invalid("simulation.max_lag", "must be positive"));
        }
        if !(0.0 < sim.fit_lower && sim.fit_lower < sim.fit_upper && sim.fit_upper <= 1.0) {
            return Err(invalid(
                "simulation.fit_upper",
                "fit window needs 0 < fit_lower < fit_upper <= 1",
            ));
        }
        Ok(())
    }

    fn emitter_counts(&self) -> Vec<u32> {
        match &self.sweep {
            Some(SweepSpec {
                axis: Axis::Emitters,
                emitters: Some(list),
                ..
            }) => list.clone(),
            _ => vec![self.laser.n0],
        }
    }

    /// Parameter sets in sweep order. Without a sweep table this is the
    /// single point described by `[laser]`.
    pub fn points(&self) -> Vec<Point> {
        let base = self.laser;
        let params: Vec<LaserParams> = match &self.sweep {
            None => vec![base],
            Some(s) if s.axis == Axis::Emitters => s
                .emitters
                .iter()
                .flatten()
                .map(|&n| base.with_emitters(n))
                .collect(),
            Some(s) => {
                let grid = match &s.values {
                    Some(v) => v.clone(),
                    None => grid(s.spacing, s.start.unwrap(), s.stop.unwrap(), s.points.unwrap()),
                };
                grid.into_iter()
                    .map(|v| match s.convention {
                        PumpConvention::PerEmitter => base.with_pump(v),
                        PumpConvention::Total => base.with_pump(v / f64::from(base.n0)),
                    })
                    .collect()
            }
        };
        params
            .into_iter()
            .enumerate()
            .map(|(index, params)| Point { index, params })
            .collect()
    }
}

fn grid(spacing: Spacing, start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    (0..points)
        .map(|k| {
            let f = k as f64 / (points - 1) as f64;
            match spacing {
                Spacing::Linear => start + f * (stop - start),
                Spacing::Log => start * (stop / start).powf(f),
            }
        })
        .collect()
}

/// Named starting points reproducing the parameter sets of the reference
/// figures.
pub fn preset(name: &str) -> Option<RunConfig> {
    let mut cfg = RunConfig {
        methods: default_methods(),
        laser: LaserParams::photonic_crystal(0.6),
        sweep: None,
        simulation: SimulationSpec::default(),
        output: OutputSpec::default(),
    };
    match name {
        "fig2" => {
            cfg.sweep = Some(SweepSpec {
                convention: PumpConvention::Total,
                start: Some(0.005),
                stop: Some(50.0),
                points: Some(12),
                ..SweepSpec::default()
            });
        }
        "fig2_single_emitter" => {
            cfg.methods = vec![Method::Sta, Method::Me, Method::Analytic, Method::Meanfield];
            cfg.laser = LaserParams::photonic_crystal(0.6).with_emitters(1);
            cfg.sweep = Some(SweepSpec {
                start: Some(0.001),
                stop: Some(10.0),
                points: Some(12),
                ..SweepSpec::default()
            });
        }
        "fig3_text" | "fig3_caption" => {
            cfg.laser = if name == "fig3_text" {
                LaserParams::macroscopic_high_q(0.63, 5.0)
            } else {
                LaserParams::macroscopic_low_q(0.63, 5.0)
            };
            cfg.sweep = Some(SweepSpec {
                convention: PumpConvention::Total,
                start: Some(100.0),
                stop: Some(1000.0),
                points: Some(10),
                ..SweepSpec::default()
            });
            cfg.simulation.n_traj = 8;
        }
        "fig4" => {
            cfg.methods = vec![Method::Sta, Method::Me, Method::Analytic, Method::Meanfield];
            cfg.laser = LaserParams::photonic_crystal(0.63);
            cfg.sweep = Some(SweepSpec {
                axis: Axis::Emitters,
                emitters: Some(vec![1, 2, 3, 10, 30, 100, 300, 1000]),
                ..SweepSpec::default()
            });
            cfg.simulation.n_traj = 8;
            cfg.simulation.fit_upper = 0.98;
            cfg.simulation.fit_lower = 0.85;
        }
        _ => return None,
    }
    Some(cfg)
}

pub const PRESETS: [&str; 5] = ["fig2", "fig2_single_emitter", "fig3_text", "fig3_caption", "fig4"];
