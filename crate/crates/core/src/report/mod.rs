//! Figures and tables derived from a sweep: outcome heatmaps, the maximum
//! table, the average-reduction summary and acceleration plots.

pub mod heatmap;
pub mod plot;
pub mod svg;
pub mod table;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::ReportConfig;
use crate::error::{Result, SimError};
use crate::metrics::{average_reduction, percent, Metric};
use crate::scenario::ScenarioKind;
use crate::suspension::SuspensionMode;
use crate::sweep::{scenario_label, SweepResult};
use crate::trace::StoredTrace;

pub use heatmap::{emit_heatmap, VerdictGrid};
pub use plot::{accel_plot_svg, emit_accel_plot, Series};
pub use table::{emit_max_table, MaxTable};

/// Files written by [`generate_reports`] and artifacts that could not be
/// produced from the available cells.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct ReportSummary {
    pub written: Vec<PathBuf>,
    pub skipped: Vec<String>,
}

/// Writes every report derivable from `result` into `dir`. Trace paths in
/// `result` are resolved against `dir`.
pub fn generate_reports(result: &SweepResult, options: &ReportConfig, dir: &Path) -> Result<ReportSummary> {
    std::fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
    let mut summary = ReportSummary::default();
    for kind in ScenarioKind::ALL {
        if kind == ScenarioKind::FlatRun || result.parameters(kind).is_empty() {
            continue;
        }
        record(
            &mut summary,
            format!("{kind} heatmap"),
            emit_heatmap(result, kind, dir).map(|(a, b)| vec![a, b]),
        )?;
    }

    let slope = options.table_slope_deg.to_radians();
    let groups = result.groups(&options.table_kinds, options.speed, slope);
    let modes: Vec<SuspensionMode> = SuspensionMode::ALL
        .into_iter()
        .filter(|m| groups.iter().any(|g| g.summaries.contains_key(m)))
        .collect();
    record(
        &mut summary,
        "maximum table".into(),
        emit_max_table(&groups, &modes, dir).map(|p| vec![p]),
    )?;
    record(
        &mut summary,
        "reduction summary".into(),
        reduction_summary(result, options).and_then(|text| {
            let path = dir.join("summary.txt");
            std::fs::write(&path, text).map_err(|e| SimError::io(&path, e))?;
            Ok(vec![path])
        }),
    )?;

    for &kind in &options.table_kinds {
        for p in result.parameters(kind) {
            if kind == ScenarioKind::Slope && (p - slope).abs() > 1e-9 {
                continue;
            }
            let label = scenario_label(kind, p);
            let name = format!("accel_{}", label.replace([' ', '°'], ""));
            let plot = acceleration_series(result, kind, p, options.speed, dir).and_then(|series| {
                let title = format!("{label} at {} m/s", options.speed);
                emit_accel_plot(&title, &series, dir, &name).map(|path| vec![path])
            });
            record(&mut summary, format!("{label} acceleration plot"), plot)?;
        }
    }
    Ok(summary)
}

/// Adds produced files to `summary`; missing inputs skip the artifact.
fn record(summary: &mut ReportSummary, what: String, outcome: Result<Vec<PathBuf>>) -> Result<()> {
    match outcome {
        Ok(paths) => summary.written.extend(paths),
        Err(e @ (SimError::IncompleteGrid(_) | SimError::EmptyTrace | SimError::DegenerateInput(_))) => {
            summary.skipped.push(format!("{what}: {e}"))
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

/// Average change from the baseline to the candidate over the table
/// scenarios, followed by each scenario's reduction rates.
pub fn reduction_summary(result: &SweepResult, options: &ReportConfig) -> Result<String> {
    let groups = result.groups(
        &options.table_kinds,
        options.speed,
        options.table_slope_deg.to_radians(),
    );
    let avg = average_reduction(&groups, options.baseline, options.candidate)?;
    let mut out = format!(
        "{}\naveraged over {} scenarios at {} m/s\n\n",
        avg.sentence(options.baseline, options.candidate),
        groups.len(),
        options.speed
    );
    let modes: Vec<SuspensionMode> = SuspensionMode::ALL
        .into_iter()
        .filter(|m| groups.iter().all(|g| g.summaries.contains_key(m)))
        .collect();
    if let Ok(table) = MaxTable::build(&groups, &modes) {
        for row in &table.rows {
            let _ = write!(out, "{}:", row.scenario);
            for (k, metric) in Metric::ALL.iter().enumerate() {
                let _ = write!(
                    out,
                    " {} {}% (best {})",
                    metric.label(),
                    percent(row.rates[k]),
                    row.best[k]
                );
            }
            out.push('\n');
        }
    }
    Ok(out)
}

/// Stored acceleration traces of every mode for one scenario cell.
pub fn acceleration_series(
    result: &SweepResult,
    kind: ScenarioKind,
    parameter: f64,
    speed: f64,
    dir: &Path,
) -> Result<Vec<Series>> {
    let mut series = Vec::new();
    for mode in result.modes(kind) {
        let Some(cell) = result.find(kind, parameter, speed, mode) else {
            continue;
        };
        let Some(rel) = &cell.trace else { continue };
        let path = dir.join(rel);
        let stored = StoredTrace::read(&path)?;
        let points = stored.acceleration_series().ok_or_else(|| SimError::Format {
            path: path.clone(),
            reason: "no acceleration column".into(),
        })?;
        series.push(Series::new(mode.label(), points));
    }
    if series.is_empty() {
        return Err(SimError::EmptyTrace);
    }
    Ok(series)
}
