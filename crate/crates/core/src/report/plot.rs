//! Chassis vertical acceleration against time, one curve per configuration.

use std::path::{Path, PathBuf};

use crate::error::{Result, SimError};
use crate::report::svg::{nice_ticks, Svg};
use crate::sweep::trim;

const PALETTE: [&str; 6] = ["#1f5fa8", "#d2413a", "#3a9d4a", "#8a4fb0", "#e08a1e", "#444444"];

/// A labelled `(t, value)` series.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series {
            label: label.into(),
            points,
        }
    }
}

/// Line chart with auto-fitted axes; the y axis is in g.
pub fn accel_plot_svg(title: &str, series: &[Series]) -> Result<String> {
    let finite = |p: &&(f64, f64)| p.0.is_finite() && p.1.is_finite();
    let all: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().filter(finite).copied())
        .collect();
    if all.is_empty() {
        return Err(SimError::EmptyTrace);
    }
    let (mut t0, mut t1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(t, y) in &all {
        t0 = t0.min(t);
        t1 = t1.max(t);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if t1 - t0 < 1e-9 {
        t1 = t0 + 1.0;
    }
    let pad = ((y1 - y0) * 0.05).max(0.05);
    y0 -= pad;
    y1 += pad;

    let (width, height) = (720.0, 400.0);
    let (left, right, top, bottom) = (64.0, 130.0, 40.0, 50.0);
    let (pw, ph) = (width - left - right, height - top - bottom);
    let sx = |t: f64| left + (t - t0) / (t1 - t0) * pw;
    let sy = |y: f64| top + (y1 - y) / (y1 - y0) * ph;

    let mut svg = Svg::new(width, height);
    svg.text(left + pw / 2.0, 22.0, 14.0, "middle", title);
    for y in nice_ticks(y0, y1, 6) {
        svg.line(left, sy(y), left + pw, sy(y), "#e4e4e4", 1.0);
        svg.text(left - 6.0, sy(y) + 3.5, 10.0, "end", &trim(y, 3));
    }
    for t in nice_ticks(t0, t1, 8) {
        svg.line(sx(t), top + ph, sx(t), top + ph + 4.0, "#555555", 1.0);
        svg.text(sx(t), top + ph + 16.0, 10.0, "middle", &trim(t, 3));
    }
    if y0 < 0.0 && y1 > 0.0 {
        svg.line(left, sy(0.0), left + pw, sy(0.0), "#999999", 1.0);
    }
    svg.line(left, top, left, top + ph, "#555555", 1.0);
    svg.line(left, top + ph, left + pw, top + ph, "#555555", 1.0);
    svg.text(left + pw / 2.0, height - 10.0, 11.0, "middle", "time (s)");
    svg.vertical_text(16.0, top + ph / 2.0, 11.0, "vertical acceleration (g)");

    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<(f64, f64)> = s.points.iter().filter(finite).map(|&(t, y)| (sx(t), sy(y))).collect();
        svg.polyline(&pts, color, 1.2);
        let ly = top + 14.0 + 18.0 * k as f64;
        svg.line(left + pw + 12.0, ly - 4.0, left + pw + 32.0, ly - 4.0, color, 2.0);
        svg.text(left + pw + 38.0, ly, 11.0, "start", &s.label);
    }
    Ok(svg.finish())
}

/// Writes the chart to `dir/<name>.svg`.
pub fn emit_accel_plot(title: &str, series: &[Series], dir: &Path, name: &str) -> Result<PathBuf> {
    let svg = accel_plot_svg(title, series)?;
    let path = dir.join(format!("{name}.svg"));
    std::fs::write(&path, svg).map_err(|e| SimError::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(accel_plot_svg("x", &[]), Err(SimError::EmptyTrace)));
        assert!(matches!(
            accel_plot_svg("x", &[Series::new("a", vec![])]),
            Err(SimError::EmptyTrace)
        ));
    }

    #[test]
    fn flat_trace_is_horizontal() {
        let pts: Vec<(f64, f64)> = (0..100).map(|i| (i as f64 * 0.01, 0.0)).collect();
        let svg = accel_plot_svg("flat", &[Series::new("MHS", pts)]).unwrap();
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let ys: Vec<&str> = line
            .split('"')
            .nth(1)
            .unwrap()
            .split(' ')
            .map(|p| p.split(',').nth(1).unwrap())
            .collect();
        assert!(ys.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn one_labelled_curve_per_series() {
        let s: Vec<Series> = ["DR", "IE", "MHS"]
            .iter()
            .enumerate()
            .map(|(k, l)| {
                Series::new(
                    *l,
                    (0..50).map(|i| (i as f64, (i as f64 * 0.3 + k as f64).sin())).collect(),
                )
            })
            .collect();
        let svg = accel_plot_svg("rock", &s).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
        for l in ["DR", "IE", "MHS"] {
            assert!(svg.contains(&format!(">{l}</text>")));
        }
        assert_eq!(svg, accel_plot_svg("rock", &s).unwrap());
    }
}
