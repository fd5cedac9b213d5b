//! TOML configuration.
//!
//! Rover parameters sit at the top level under their field names; scenario
//! layout, the single-run cell, the sweep grid, report options and output
//! settings live in `[scenario]`, `[run]`, `[sweep]`, `[report]` and
//! `[output]`. Every key is optional. Unknown keys are rejected by name.
//!
//! ```toml
//! suspension = "MHS"
//! gravity = 1.625
//! spring_rate = 2000.0
//!
//! [run]
//! kind = "rock"
//! parameter = 0.1     # m; degrees for slopes
//! speed = 1.0
//!
//! [sweep]
//! kinds = ["step", "slope"]
//! speeds = [0.05, 0.5, 1.0]
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, SimError};
use crate::params::RoverParameters;
use crate::scenario::{ScenarioKind, ScenarioSettings, ScenarioSpec, DEFAULT_SEED};
use crate::suspension::SuspensionMode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    /// Configuration used by `run`.
    pub suspension: SuspensionMode,
    /// Outcrop profile seed.
    pub seed: u64,
    /// Simulated time allowed beyond the nominal traverse, s.
    pub timeout: f64,
    #[serde(flatten)]
    pub rover: RoverParameters,
    pub scenario: ScenarioSettings,
    pub run: RunConfig,
    pub sweep: SweepConfig,
    pub report: ReportConfig,
    pub output: OutputConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            suspension: SuspensionMode::MechanicallyHybrid,
            seed: DEFAULT_SEED,
            timeout: 30.0,
            rover: RoverParameters::default(),
            scenario: ScenarioSettings::default(),
            run: RunConfig::default(),
            sweep: SweepConfig::default(),
            report: ReportConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

/// The cell simulated by `run`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub kind: ScenarioKind,
    /// Height or radius in m; angle in degrees for slopes.
    pub parameter: f64,
    pub speed: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            kind: ScenarioKind::Rock,
            parameter: 0.1,
            speed: 1.0,
        }
    }
}

/// Grid swept by `sweep`: every kind × its parameters × speeds × modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub kinds: Vec<ScenarioKind>,
    pub modes: Vec<SuspensionMode>,
    pub speeds: Vec<f64>,
    pub step_heights: Vec<f64>,
    pub rock_radii: Vec<f64>,
    pub outcrop_heights: Vec<f64>,
    pub slope_angles_deg: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            kinds: vec![
                ScenarioKind::Step,
                ScenarioKind::Rock,
                ScenarioKind::Outcrop,
                ScenarioKind::Slope,
            ],
            modes: SuspensionMode::ALL.to_vec(),
            speeds: vec![0.05, 0.1, 0.25, 0.5, 0.75, 1.0],
            step_heights: (1..=12).map(|cm| cm as f64 / 100.0).collect(),
            rock_radii: vec![0.1],
            outcrop_heights: vec![0.1],
            slope_angles_deg: (1..=6).map(|k| 5.0 * k as f64).collect(),
        }
    }
}

impl SweepConfig {
    /// Parameters of `kind` in spec units (m or rad).
    pub fn parameters(&self, kind: ScenarioKind) -> Vec<f64> {
        match kind {
            ScenarioKind::Step => self.step_heights.clone(),
            ScenarioKind::Rock => self.rock_radii.clone(),
            ScenarioKind::Outcrop => self.outcrop_heights.clone(),
            ScenarioKind::Slope => self.slope_angles_deg.iter().map(|d| d.to_radians()).collect(),
            ScenarioKind::FlatRun => vec![0.0],
        }
    }

    fn parameter_key(kind: ScenarioKind) -> &'static str {
        match kind {
            ScenarioKind::Step => "sweep.step_heights",
            ScenarioKind::Rock => "sweep.rock_radii",
            ScenarioKind::Outcrop => "sweep.outcrop_heights",
            ScenarioKind::Slope => "sweep.slope_angles_deg",
            ScenarioKind::FlatRun => "sweep.kinds",
        }
    }
}

/// What the maximum table and acceleration plots are drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportConfig {
    /// Speed of the cells compared in the table and plots, m/s.
    pub speed: f64,
    /// Scenario kinds forming the rows of the maximum table.
    pub table_kinds: Vec<ScenarioKind>,
    /// Slope angle used for the slope row, degrees.
    pub table_slope_deg: f64,
    /// Baseline and candidate configurations of the average-reduction line.
    pub baseline: SuspensionMode,
    pub candidate: SuspensionMode,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            speed: 1.0,
            table_kinds: vec![ScenarioKind::Rock, ScenarioKind::Outcrop, ScenarioKind::Slope],
            table_slope_deg: 20.0,
            baseline: SuspensionMode::DependentRigid,
            candidate: SuspensionMode::MechanicallyHybrid,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub write_traces: bool,
    /// Every n-th simulation step is written to trace files.
    pub trace_stride: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            write_traces: true,
            trace_stride: 10,
        }
    }
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
    Config::from_toml_str(&text)
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Config> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| SimError::Parse(e.to_string()))?;
        let known = toml::Table::try_from(Config::default()).expect("default config serializes");
        reject_unknown(&table, &known, "")?;
        let config: Config = table
            .try_into()
            .map_err(|e: toml::de::Error| SimError::Parse(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the resolved configuration, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.rover.validate()?;
        self.scenario.validate().map_err(|e| prefix_key(e, "scenario"))?;
        // TOML integers are signed
        if i64::try_from(self.seed).is_err() {
            return Err(SimError::validation(
                "seed",
                format!("must be at most {}, got {}", i64::MAX, self.seed),
            ));
        }
        if !(self.timeout.is_finite() && self.timeout > 0.0) {
            return Err(SimError::validation(
                "timeout",
                format!("must be > 0, got {}", self.timeout),
            ));
        }
        self.run_spec()
            .validate()
            .map_err(|e| SimError::validation("run", e.to_string()))?;

        let sweep = &self.sweep;
        for (key, empty) in [
            ("sweep.kinds", sweep.kinds.is_empty()),
            ("sweep.modes", sweep.modes.is_empty()),
            ("sweep.speeds", sweep.speeds.is_empty()),
        ] {
            if empty {
                return Err(SimError::validation(key, "must not be empty"));
            }
        }
        for &v in &sweep.speeds {
            let spec = self.spec(ScenarioKind::FlatRun, 0.0, v, sweep.modes[0]);
            spec.validate()
                .map_err(|e| SimError::validation("sweep.speeds", e.to_string()))?;
        }
        for &kind in &sweep.kinds {
            let params = sweep.parameters(kind);
            let key = SweepConfig::parameter_key(kind);
            if params.is_empty() {
                return Err(SimError::validation(key, format!("{kind} is swept but has no values")));
            }
            for &p in &params {
                let spec = self.spec(kind, p, sweep.speeds[0], sweep.modes[0]);
                spec.validate().map_err(|e| SimError::validation(key, e.to_string()))?;
            }
        }
        let keys: Vec<String> = self.sweep_specs().iter().map(ScenarioSpec::key).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(SimError::validation("sweep", format!("cell {} appears twice", w[0])));
        }

        if !(self.report.speed.is_finite() && self.report.speed > 0.0) {
            return Err(SimError::validation("report.speed", "must be > 0"));
        }
        if self.output.trace_stride == 0 {
            return Err(SimError::validation("output.trace_stride", "must be at least 1"));
        }
        Ok(())
    }

    /// Spec for one cell with this config's gravity, timeout and seed.
    pub fn spec(&self, kind: ScenarioKind, parameter: f64, speed: f64, mode: SuspensionMode) -> ScenarioSpec {
        ScenarioSpec {
            gravity: self.rover.gravity,
            timeout: self.timeout,
            seed: self.seed,
            ..ScenarioSpec::new(kind, parameter, speed, mode)
        }
    }

    /// The `[run]` cell.
    pub fn run_spec(&self) -> ScenarioSpec {
        let parameter = match self.run.kind {
            ScenarioKind::Slope => self.run.parameter.to_radians(),
            _ => self.run.parameter,
        };
        self.spec(self.run.kind, parameter, self.run.speed, self.suspension)
    }

    /// All sweep cells ordered by kind, parameter, speed, then mode.
    pub fn sweep_specs(&self) -> Vec<ScenarioSpec> {
        let s = &self.sweep;
        let mut specs = Vec::new();
        for &kind in &s.kinds {
            for p in s.parameters(kind) {
                for &v in &s.speeds {
                    for &mode in &s.modes {
                        specs.push(self.spec(kind, p, v, mode));
                    }
                }
            }
        }
        specs
    }
}

fn prefix_key(err: SimError, section: &str) -> SimError {
    match err {
        SimError::Validation { key, reason } => SimError::validation(format!("{section}.{key}"), reason),
        other => other,
    }
}

fn reject_unknown(table: &toml::Table, known: &toml::Table, path: &str) -> Result<()> {
    for (key, value) in table {
        let full = if path.is_empty() {
            key.clone()
        } else {
            format!("{path}.{key}")
        };
        match known.get(key) {
            None => return Err(SimError::validation(full, "unknown key")),
            Some(toml::Value::Table(inner)) => {
                if let toml::Value::Table(given) = value {
                    reject_unknown(given, inner, &full)?;
                }
            }
            Some(_) => {}
        }
    }
    Ok(())
}
