//! Table of per-scenario maxima with worst-to-best reduction rates.

use std::path::{Path, PathBuf};

use crate::error::{Result, SimError};
use crate::metrics::{percent, reduction_rate, Metric, ScenarioGroup};
use crate::suspension::SuspensionMode;

#[derive(Debug, Clone, PartialEq)]
pub struct MaxRow {
    pub scenario: String,
    /// `values[metric][mode]` following [`Metric::ALL`] and the table's modes.
    pub values: [Vec<f64>; 3],
    /// Reduction rate per metric, percent.
    pub rates: [f64; 3],
    /// Configuration holding the smallest value per metric.
    pub best: [SuspensionMode; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxTable {
    pub modes: Vec<SuspensionMode>,
    pub rows: Vec<MaxRow>,
}

impl MaxTable {
    /// Every group must hold a summary for each of `modes`.
    pub fn build(groups: &[ScenarioGroup], modes: &[SuspensionMode]) -> Result<Self> {
        if groups.is_empty() {
            return Err(SimError::IncompleteGrid("no scenarios for the table".into()));
        }
        let mut rows = Vec::with_capacity(groups.len());
        for g in groups {
            let summaries = modes
                .iter()
                .map(|m| {
                    g.summaries
                        .get(m)
                        .ok_or_else(|| SimError::IncompleteGrid(format!("{} lacks {m}", g.label)))
                })
                .collect::<Result<Vec<_>>>()?;
            let values = Metric::ALL.map(|metric| summaries.iter().map(|s| metric.of(s)).collect::<Vec<_>>());
            let mut rates = [0.0; 3];
            let mut best = [modes[0]; 3];
            for k in 0..3 {
                rates[k] = reduction_rate(&values[k])?;
                let i = (0..modes.len())
                    .min_by(|&a, &b| values[k][a].total_cmp(&values[k][b]))
                    .unwrap_or(0);
                best[k] = modes[i];
            }
            rows.push(MaxRow {
                scenario: g.label.clone(),
                values,
                rates,
                best,
            });
        }
        Ok(MaxTable {
            modes: modes.to_vec(),
            rows,
        })
    }

    /// One row per scenario; per metric one column per mode, then `Rate`
    /// (integer percent) and `best`.
    pub fn to_csv(&self) -> String {
        let mut header = vec!["scenario".to_string()];
        for metric in Metric::ALL {
            for m in &self.modes {
                header.push(format!("{}_{m}", metric.label()));
            }
            header.push(format!("{}_rate", metric.label()));
            header.push(format!("{}_best", metric.label()));
        }
        let mut out = header.join(",");
        out.push('\n');
        for row in &self.rows {
            let mut fields = vec![row.scenario.clone()];
            for (k, metric) in Metric::ALL.iter().enumerate() {
                let decimals = if *metric == Metric::Acceleration { 3 } else { 1 };
                fields.extend(row.values[k].iter().map(|v| format!("{v:.decimals$}")));
                fields.push(format!("{}%", percent(row.rates[k])));
                fields.push(row.best[k].to_string());
            }
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

/// Writes `max_table.csv` into `dir`.
pub fn emit_max_table(groups: &[ScenarioGroup], modes: &[SuspensionMode], dir: &Path) -> Result<PathBuf> {
    let table = MaxTable::build(groups, modes)?;
    let path = dir.join("max_table.csv");
    std::fs::write(&path, table.to_csv()).map_err(|e| SimError::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::MetricsSummary;
    use SuspensionMode::*;

    fn summary(f: f64, t: f64, a: f64) -> MetricsSummary {
        MetricsSummary {
            f_max: f,
            t_max: t,
            acc_max: a,
            acc_min: 0.0,
            acc_gap: a,
            acc_sigma_mean: 0.0,
        }
    }

    #[test]
    fn published_rock_row() {
        let g = [ScenarioGroup::new("rock")
            .with(DependentRigid, summary(8633.0, 88.3, 4.36))
            .with(IndependentElastic, summary(549.0, 63.4, 3.56))
            .with(MechanicallyHybrid, summary(341.1, 62.0, 2.02))];
        let t = MaxTable::build(&g, &SuspensionMode::ALL).unwrap();
        assert_eq!(t.rows[0].rates.map(percent), [-96, -30, -54]);
        assert_eq!(t.rows[0].best, [MechanicallyHybrid; 3]);
        let csv = t.to_csv();
        assert!(csv.starts_with("scenario,F_DR,F_IE,F_MHS,F_rate,F_best,T_DR"));
        assert!(csv.contains("rock,8633.0,549.0,341.1,-96%,MHS,88.3,63.4,62.0,-30%,MHS,4.360,3.560,2.020,-54%,MHS"));
    }

    #[test]
    fn identical_values_give_zero_rates() {
        let g = [ScenarioGroup::new("x")
            .with(DependentRigid, summary(1.0, 2.0, 3.0))
            .with(IndependentElastic, summary(1.0, 2.0, 3.0))
            .with(MechanicallyHybrid, summary(1.0, 2.0, 3.0))];
        let t = MaxTable::build(&g, &SuspensionMode::ALL).unwrap();
        assert_eq!(t.rows[0].rates, [0.0; 3]);
    }

    #[test]
    fn missing_mode_is_incomplete() {
        let g = [ScenarioGroup::new("x")
            .with(DependentRigid, summary(1.0, 2.0, 3.0))
            .with(MechanicallyHybrid, summary(1.0, 2.0, 3.0))];
        assert!(matches!(
            MaxTable::build(&g, &SuspensionMode::ALL),
            Err(SimError::IncompleteGrid(_))
        ));
    }
}
