//! Evaluation metrics: peak rocker-end load, peak pivot torque, chassis
//! vertical acceleration statistics and worst-to-best reduction rates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::params::G_UNIT;
use crate::suspension::SuspensionMode;
use crate::trace::SimulationTrace;

/// Default window for the mean sliding standard deviation, s.
pub const SIGMA_WINDOW: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    /// Peak vertical load at a rocker end, N.
    pub f_max: f64,
    /// Peak absolute pitch torque at a rocker pivot, N·m.
    pub t_max: f64,
    /// Vertical acceleration extrema, g.
    pub acc_max: f64,
    pub acc_min: f64,
    pub acc_gap: f64,
    /// Mean over sliding windows of the acceleration standard deviation, g.
    pub acc_sigma_mean: f64,
}

/// Which summary quantity to compare across configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Force,
    Torque,
    Acceleration,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Force, Metric::Torque, Metric::Acceleration];

    pub fn of(self, s: &MetricsSummary) -> f64 {
        match self {
            Metric::Force => s.f_max,
            Metric::Torque => s.t_max,
            Metric::Acceleration => s.acc_max,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Metric::Force => "F",
            Metric::Torque => "T",
            Metric::Acceleration => "Acc",
        }
    }
}

/// Acceleration statistics of one series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelerationStats {
    pub max: f64,
    pub min: f64,
    pub sigma_mean: f64,
}

/// Extrema and mean windowed standard deviation of `series`.
///
/// Windows hold `window` samples and slide one sample at a time; a series
/// shorter than one window is treated as a single window.
pub fn acceleration_stats(series: &[f64], window: usize) -> Result<AccelerationStats> {
    if series.is_empty() {
        return Err(SimError::EmptyTrace);
    }
    let max = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = series.iter().copied().fold(f64::INFINITY, f64::min);
    let window = window.clamp(1, series.len());

    // shift by the first sample to limit cancellation in the running sums
    let shift = series[0];
    let n = window as f64;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for &x in &series[..window] {
        let d = x - shift;
        sum += d;
        sum_sq += d * d;
    }
    let std = |sum: f64, sum_sq: f64| {
        let mean = sum / n;
        (sum_sq / n - mean * mean).max(0.0).sqrt()
    };
    let mut total = std(sum, sum_sq);
    let count = series.len() - window + 1;
    for k in 1..count {
        let out = series[k - 1] - shift;
        let inn = series[k + window - 1] - shift;
        sum += inn - out;
        sum_sq += inn * inn - out * out;
        total += std(sum, sum_sq);
    }
    Ok(AccelerationStats {
        max,
        min,
        sigma_mean: total / count as f64,
    })
}

/// Summary with the default 1 s standard-deviation window.
pub fn summarize(trace: &SimulationTrace) -> Result<MetricsSummary> {
    summarize_with_window(trace, SIGMA_WINDOW)
}

pub fn summarize_with_window(trace: &SimulationTrace, window_s: f64) -> Result<MetricsSummary> {
    if trace.is_empty() {
        return Err(SimError::EmptyTrace);
    }
    let acc: Vec<f64> = trace.records.iter().map(|r| r.vertical_acceleration / G_UNIT).collect();
    let window = (window_s / trace.dt).round() as usize;
    let stats = acceleration_stats(&acc, window)?;
    let f_max = trace.records.iter().flat_map(|r| r.vertical_load).fold(0.0, f64::max);
    let t_max = trace
        .records
        .iter()
        .flat_map(|r| r.pivot_torque)
        .map(f64::abs)
        .fold(0.0, f64::max);
    Ok(MetricsSummary {
        f_max,
        t_max,
        acc_max: stats.max,
        acc_min: stats.min,
        acc_gap: stats.max - stats.min,
        acc_sigma_mean: stats.sigma_mean,
    })
}

/// Worst-to-best change across configurations, percent: `(min − max) / max · 100`.
pub fn reduction_rate(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(SimError::DegenerateInput(format!(
            "need at least two values, got {}",
            values.len()
        )));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(SimError::DegenerateInput(format!("non-finite value {v}")));
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        return Err(SimError::DegenerateInput("maximum is zero".into()));
    }
    Ok((min - max) / max * 100.0)
}

/// Rounds a percentage to the nearest integer for reporting.
pub fn percent(rate: f64) -> i64 {
    rate.round() as i64
}

/// Mean per-scenario change of each metric going from `from` to `to`, percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageReduction {
    pub force: f64,
    pub torque: f64,
    pub acceleration: f64,
}

impl AverageReduction {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Force => self.force,
            Metric::Torque => self.torque,
            Metric::Acceleration => self.acceleration,
        }
    }

    /// One-line summary, e.g. "MHS vs DR: -71% load, -37% torque, -33% acceleration".
    pub fn sentence(&self, from: SuspensionMode, to: SuspensionMode) -> String {
        format!(
            "{to} vs {from}: {}% maximum load, {}% maximum pitch torque, {}% maximum vertical acceleration",
            percent(self.force),
            percent(self.torque),
            percent(self.acceleration)
        )
    }
}

/// Summaries of one scenario across configurations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioGroup {
    pub label: String,
    pub summaries: BTreeMap<SuspensionMode, MetricsSummary>,
}

impl ScenarioGroup {
    pub fn new(label: impl Into<String>) -> Self {
        ScenarioGroup {
            label: label.into(),
            summaries: BTreeMap::new(),
        }
    }

    pub fn with(mut self, mode: SuspensionMode, summary: MetricsSummary) -> Self {
        self.summaries.insert(mode, summary);
        self
    }
}

/// Arithmetic mean, over scenarios, of the signed change `(to − from) / from`.
pub fn average_reduction(
    groups: &[ScenarioGroup],
    from: SuspensionMode,
    to: SuspensionMode,
) -> Result<AverageReduction> {
    if groups.is_empty() {
        return Err(SimError::IncompleteGrid("no scenarios".into()));
    }
    let mut sums = [0.0; 3];
    for group in groups {
        let scenario = &group.label;
        let (a, b) = match (group.summaries.get(&from), group.summaries.get(&to)) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(SimError::IncompleteGrid(format!(
                    "scenario {scenario} lacks {from} or {to}"
                )))
            }
        };
        for (k, metric) in Metric::ALL.iter().enumerate() {
            let (x, y) = (metric.of(a), metric.of(b));
            if x == 0.0 {
                return Err(SimError::DegenerateInput(format!(
                    "{} of {from} is zero in {scenario}",
                    metric.label()
                )));
            }
            sums[k] += (y - x) / x * 100.0;
        }
    }
    let n = groups.len() as f64;
    Ok(AverageReduction {
        force: sums[0] / n,
        torque: sums[1] / n,
        acceleration: sums[2] / n,
    })
}
