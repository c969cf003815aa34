use std::path::{Path, PathBuf};

use catzeno::{PeakMode, ReservoirSpec, ThermalModel};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Shuttered,
    Measured,
}

impl ScenarioKind {
    pub fn tag(self) -> &'static str {
        match self {
            ScenarioKind::Shuttered => "shuttered",
            ScenarioKind::Measured => "measured",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThermalKind {
    BoseEinstein,
    ConstantN,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReservoirBlock {
    /// `ω_c/ω₀` values swept by every subcommand.
    pub r: Vec<f64>,
    pub omega_0: f64,
    pub g: f64,
    pub thermal: ThermalKind,
    pub theta: f64,
    pub n0: f64,
}

impl Default for ReservoirBlock {
    fn default() -> Self {
        ReservoirBlock {
            r: vec![10.0, 0.1],
            omega_0: 1.0,
            g: 0.1,
            thermal: ThermalKind::BoseEinstein,
            theta: 100.0,
            n0: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CatBlock {
    pub alpha: f64,
    /// 0 picks a truncation from the evolution kernels.
    pub n_max: usize,
}

impl Default for CatBlock {
    fn default() -> Self {
        CatBlock { alpha: 2.0, n_max: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleBlock {
    pub omega_c_tau: Vec<f64>,
    /// Time window of `wigner-peak`, in Markov peak-decay times.
    pub t_end_decay_times: f64,
    pub samples: usize,
    /// `pn-snapshots` times, in Markov peak-decay times.
    pub snapshot_decay_times: Vec<f64>,
    pub rates_min: f64,
    pub rates_max: f64,
    pub rates_points: usize,
}

impl Default for ScheduleBlock {
    fn default() -> Self {
        ScheduleBlock {
            omega_c_tau: vec![1.0, 0.1, 0.01],
            t_end_decay_times: 3.0,
            samples: 121,
            snapshot_decay_times: vec![0.0, 0.5, 1.0, 2.0],
            rates_min: 1e-3,
            rates_max: 1e2,
            rates_points: 21,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioBlock {
    pub kind: ScenarioKind,
    pub peak_mode: PeakMode,
}

impl Default for ScenarioBlock {
    fn default() -> Self {
        ScenarioBlock {
            kind: ScenarioKind::Shuttered,
            peak_mode: PeakMode::Exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridBlock {
    /// 0 uses `4 + α`.
    pub half_width: f64,
    pub points: usize,
    /// `wigner-field` times, in Markov peak-decay times.
    pub field_decay_times: Vec<f64>,
}

impl Default for GridBlock {
    fn default() -> Self {
        GridBlock {
            half_width: 0.0,
            points: 81,
            field_decay_times: vec![0.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub dir: PathBuf,
    pub svg: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            dir: PathBuf::from("out"),
            svg: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub reservoir: ReservoirBlock,
    pub cat: CatBlock,
    pub schedule: ScheduleBlock,
    pub scenario: ScenarioBlock,
    pub grid: GridBlock,
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub r: Vec<f64>,
    pub omega_c_tau: Vec<f64>,
    pub alpha: Option<f64>,
    pub n0: Option<f64>,
    pub g: Option<f64>,
    pub scenario: Option<ScenarioKind>,
    pub svg: bool,
}

fn positive(name: &str, value: f64) -> Result<(), CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {value}")))
    }
}

fn nonnegative_list(name: &str, values: &[f64]) -> Result<(), CliError> {
    match values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        Some(v) => Err(CliError::Config(format!("{name} entries must be nonnegative, got {v}"))),
        None => Ok(()),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.output.dir = out.clone();
        }
        if !o.r.is_empty() {
            self.reservoir.r = o.r.clone();
        }
        if !o.omega_c_tau.is_empty() {
            self.schedule.omega_c_tau = o.omega_c_tau.clone();
        }
        if let Some(alpha) = o.alpha {
            self.cat.alpha = alpha;
        }
        if let Some(n0) = o.n0 {
            self.reservoir.thermal = ThermalKind::ConstantN;
            self.reservoir.n0 = n0;
        }
        if let Some(g) = o.g {
            self.reservoir.g = g;
        }
        if let Some(kind) = o.scenario {
            self.scenario.kind = kind;
        }
        self.output.svg |= o.svg;
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let res = &self.reservoir;
        if res.r.is_empty() {
            return Err(CliError::Config("reservoir.r must list at least one value".into()));
        }
        for r in &res.r {
            positive("reservoir.r", *r)?;
        }
        positive("reservoir.omega_0", res.omega_0)?;
        positive("reservoir.g", res.g)?;
        positive("reservoir.theta", res.theta)?;
        positive("reservoir.n0", res.n0)?;
        positive("cat.alpha", self.cat.alpha)?;

        let s = &self.schedule;
        if s.omega_c_tau.is_empty() {
            return Err(CliError::Config("schedule.omega_c_tau must list at least one value".into()));
        }
        for x in &s.omega_c_tau {
            positive("schedule.omega_c_tau", *x)?;
        }
        positive("schedule.t_end_decay_times", s.t_end_decay_times)?;
        if s.samples < 2 {
            return Err(CliError::Config("schedule.samples must be at least 2".into()));
        }
        nonnegative_list("schedule.snapshot_decay_times", &s.snapshot_decay_times)?;
        positive("schedule.rates_min", s.rates_min)?;
        positive("schedule.rates_max", s.rates_max)?;
        if s.rates_points < 2 || s.rates_min >= s.rates_max {
            return Err(CliError::Config("schedule.rates_* must describe at least two increasing points".into()));
        }

        if !(self.grid.half_width.is_finite() && self.grid.half_width >= 0.0) {
            return Err(CliError::Config("grid.half_width must be nonnegative".into()));
        }
        if self.grid.points == 0 {
            return Err(CliError::Config("grid.points must be positive".into()));
        }
        nonnegative_list("grid.field_decay_times", &self.grid.field_decay_times)?;
        for r in &res.r {
            self.spec(*r)?;
        }
        Ok(())
    }

    pub fn thermal_model(&self) -> ThermalModel {
        match self.reservoir.thermal {
            ThermalKind::BoseEinstein => ThermalModel::BoseEinstein { theta: self.reservoir.theta },
            ThermalKind::ConstantN => ThermalModel::ConstantN { n0: self.reservoir.n0 },
        }
    }

    pub fn spec(&self, r: f64) -> Result<ReservoirSpec, CliError> {
        let res = &self.reservoir;
        ReservoirSpec::new(r * res.omega_0, res.omega_0, res.g, self.thermal_model()).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Log-spaced `ω_c τ` grid of the `rates` subcommand; explicit `omega_c_tau`
    /// flags replace it.
    pub fn rates_grid(&self, explicit: bool) -> Vec<f64> {
        if explicit {
            return self.schedule.omega_c_tau.clone();
        }
        let s = &self.schedule;
        let (lo, hi) = (s.rates_min.log10(), s.rates_max.log10());
        let k = s.rates_points - 1;
        (0..=k).map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / k as f64)).collect()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }
}
