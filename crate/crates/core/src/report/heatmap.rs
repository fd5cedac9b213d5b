//! Outcome heatmaps: one panel per configuration, rows are obstacle sizes or
//! slope angles, columns are speeds.

use std::path::{Path, PathBuf};

use crate::error::{Result, SimError};
use crate::report::svg::Svg;
use crate::scenario::{ScenarioKind, Verdict};
use crate::suspension::SuspensionMode;
use crate::sweep::{trim, SweepResult};

pub const SUCCESS_COLOR: &str = "#3a9d4a";
pub const SEMI_COLOR: &str = "#f2c230";
pub const FAILURE_COLOR: &str = "#d2413a";

pub fn verdict_color(v: Verdict) -> &'static str {
    match v {
        Verdict::Success => SUCCESS_COLOR,
        Verdict::SemiSuccess => SEMI_COLOR,
        Verdict::Failure => FAILURE_COLOR,
    }
}

/// Verdicts of one scenario kind over parameter × speed for each mode.
#[derive(Debug, Clone, PartialEq)]
pub struct VerdictGrid {
    pub kind: ScenarioKind,
    /// Ascending, spec units.
    pub parameters: Vec<f64>,
    pub speeds: Vec<f64>,
    pub modes: Vec<SuspensionMode>,
    /// Indexed `[mode][parameter][speed]`.
    pub cells: Vec<Vec<Vec<Verdict>>>,
}

impl VerdictGrid {
    pub fn from_sweep(result: &SweepResult, kind: ScenarioKind) -> Result<Self> {
        let parameters = result.parameters(kind);
        let speeds = result.speeds(kind);
        let modes = result.modes(kind);
        if parameters.is_empty() {
            return Err(SimError::IncompleteGrid(format!("no {kind} cells")));
        }
        let mut cells = Vec::with_capacity(modes.len());
        for &mode in &modes {
            let mut panel = Vec::with_capacity(parameters.len());
            for &p in &parameters {
                let mut row = Vec::with_capacity(speeds.len());
                for &v in &speeds {
                    let cell = result.find(kind, p, v, mode).ok_or_else(|| {
                        SimError::IncompleteGrid(format!(
                            "{kind} {} at {v} m/s missing for {mode}",
                            display_parameter(kind, p)
                        ))
                    })?;
                    row.push(cell.outcome.verdict);
                }
                panel.push(row);
            }
            cells.push(panel);
        }
        Ok(VerdictGrid {
            kind,
            parameters,
            speeds,
            modes,
            cells,
        })
    }

    pub fn verdict(&self, mode: SuspensionMode, parameter_index: usize, speed_index: usize) -> Option<Verdict> {
        let m = self.modes.iter().position(|x| *x == mode)?;
        self.cells.get(m)?.get(parameter_index)?.get(speed_index).copied()
    }

    /// `mode,<parameter column>,<speed>...` with one row per mode and parameter.
    pub fn to_csv(&self) -> String {
        let mut out = format!("mode,{}", parameter_column(self.kind));
        for v in &self.speeds {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
        for (m, mode) in self.modes.iter().enumerate() {
            for (i, &p) in self.parameters.iter().enumerate() {
                out.push_str(&format!("{mode},{}", display_parameter(self.kind, p)));
                for v in &self.cells[m][i] {
                    out.push(',');
                    out.push_str(v.label());
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn to_svg(&self) -> String {
        let cell = 34.0;
        let (left, top, gap) = (70.0, 60.0, 30.0);
        let panel_w = cell * self.speeds.len() as f64;
        let panel_h = cell * self.parameters.len() as f64;
        let n = self.modes.len() as f64;
        let width = left + n * panel_w + (n - 1.0).max(0.0) * gap + 20.0;
        let height = top + panel_h + 70.0;
        let mut svg = Svg::new(width, height);
        svg.text(width / 2.0, 22.0, 15.0, "middle", &format!("{} outcomes", self.kind));
        svg.vertical_text(18.0, top + panel_h / 2.0, 12.0, axis_title(self.kind));
        let rows = self.parameters.len();
        for (m, mode) in self.modes.iter().enumerate() {
            let x0 = left + m as f64 * (panel_w + gap);
            svg.text(x0 + panel_w / 2.0, top - 10.0, 13.0, "middle", mode.label());
            for (i, row) in self.cells[m].iter().enumerate() {
                // largest parameter on top
                let y = top + (rows - 1 - i) as f64 * cell;
                for (j, v) in row.iter().enumerate() {
                    svg.rect(x0 + j as f64 * cell, y, cell, cell, verdict_color(*v));
                }
            }
            for (j, v) in self.speeds.iter().enumerate() {
                svg.text(
                    x0 + (j as f64 + 0.5) * cell,
                    top + panel_h + 14.0,
                    9.0,
                    "middle",
                    &trim(*v, 2),
                );
            }
            svg.text(x0 + panel_w / 2.0, top + panel_h + 32.0, 11.0, "middle", "speed (m/s)");
        }
        for (i, &p) in self.parameters.iter().enumerate() {
            let y = top + (rows - 1 - i) as f64 * cell + cell / 2.0 + 3.0;
            svg.text(left - 6.0, y, 10.0, "end", &display_parameter(self.kind, p));
        }
        let legend_y = height - 14.0;
        for (k, (label, color)) in [
            ("success", SUCCESS_COLOR),
            ("semi", SEMI_COLOR),
            ("failure", FAILURE_COLOR),
        ]
        .into_iter()
        .enumerate()
        {
            let x = left + k as f64 * 90.0;
            svg.rect(x, legend_y - 10.0, 12.0, 12.0, color);
            svg.text(x + 16.0, legend_y, 11.0, "start", label);
        }
        svg.finish()
    }
}

fn parameter_column(kind: ScenarioKind) -> &'static str {
    match kind {
        ScenarioKind::Slope => "angle_deg",
        ScenarioKind::Rock => "radius_cm",
        _ => "height_cm",
    }
}

fn axis_title(kind: ScenarioKind) -> &'static str {
    match kind {
        ScenarioKind::Slope => "slope angle (deg)",
        ScenarioKind::Rock => "rock radius (cm)",
        _ => "height (cm)",
    }
}

fn display_parameter(kind: ScenarioKind, p: f64) -> String {
    match kind {
        ScenarioKind::Slope => trim(p.to_degrees(), 2),
        _ => trim(p * 100.0, 2),
    }
}

/// Writes `heatmap_<kind>.svg` and `heatmap_<kind>.csv` into `dir`.
pub fn emit_heatmap(result: &SweepResult, kind: ScenarioKind, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let grid = VerdictGrid::from_sweep(result, kind)?;
    let svg = dir.join(format!("heatmap_{kind}.svg"));
    let csv = dir.join(format!("heatmap_{kind}.csv"));
    std::fs::write(&svg, grid.to_svg()).map_err(|e| SimError::io(&svg, e))?;
    std::fs::write(&csv, grid.to_csv()).map_err(|e| SimError::io(&csv, e))?;
    Ok((svg, csv))
}
