//! Fixed-rate simulation traces and their CSV persistence.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::contact::ContactPoint;
use crate::dynamics::StepReport;
use crate::error::{Result, SimError};
use crate::params::{Wheel, G_UNIT};
use crate::state::RoverState;

/// State at one sample time together with the loads acting on it.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub state: RoverState,
    pub contacts: [Option<ContactPoint>; 4],
    pub strut_force: [f64; 4],
    pub vertical_load: [f64; 4],
    pub pivot_torque: [f64; 2],
    /// Chassis vertical acceleration, m/s².
    pub vertical_acceleration: f64,
}

impl TraceRecord {
    pub fn new(state: RoverState, report: StepReport) -> Self {
        TraceRecord {
            state,
            contacts: report.contacts,
            strut_force: report.strut_force,
            vertical_load: report.vertical_load,
            pivot_torque: report.pivot_torque,
            vertical_acceleration: report.chassis_acceleration.z,
        }
    }

    pub fn normal_force(&self, wheel: Wheel) -> f64 {
        self.contacts[wheel.index()].map_or(0.0, |c| c.normal_force)
    }

    pub fn in_contact(&self, wheel: Wheel) -> bool {
        self.normal_force(wheel) > 0.0
    }

    /// Vertical acceleration in units of [`G_UNIT`].
    pub fn vertical_acceleration_g(&self) -> f64 {
        self.vertical_acceleration / G_UNIT
    }
}

/// Uniformly sampled run, one record per timestep.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimulationTrace {
    pub dt: f64,
    pub records: Vec<TraceRecord>,
}

impl SimulationTrace {
    pub fn new(dt: f64) -> Self {
        SimulationTrace {
            dt,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, record: TraceRecord) {
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.state.time)
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// `(time, vertical acceleration in g)` pairs.
    pub fn acceleration_series(&self) -> Vec<(f64, f64)> {
        self.records
            .iter()
            .map(|r| (r.state.time, r.vertical_acceleration_g()))
            .collect()
    }

    /// Writes every `stride`-th record as CSV with six decimals.
    pub fn write_csv(&self, path: &Path, stride: usize) -> Result<()> {
        let file = File::create(path).map_err(|e| SimError::io(path, e))?;
        let mut out = BufWriter::new(file);
        let io = |e| SimError::io(path, e);
        writeln!(out, "{}", TRACE_COLUMNS.join(",")).map_err(io)?;
        for r in self.records.iter().step_by(stride.max(1)) {
            let s = &r.state;
            let q = s.orientation.quaternion();
            let mut row: Vec<f64> = vec![
                s.time,
                s.position.x,
                s.position.y,
                s.position.z,
                q.w,
                q.i,
                q.j,
                q.k,
                s.rocker_angle,
            ];
            row.extend_from_slice(&s.strut_travel);
            row.extend(Wheel::ALL.map(|w| r.normal_force(w)));
            row.extend_from_slice(&r.strut_force);
            row.extend_from_slice(&r.pivot_torque);
            row.push(r.vertical_acceleration_g());
            row.extend_from_slice(&r.vertical_load);
            let line: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
            writeln!(out, "{}", line.join(",")).map_err(io)?;
        }
        out.flush().map_err(io)
    }
}

/// Column layout of persisted traces.
pub const TRACE_COLUMNS: [&str; 28] = [
    "t", "x", "y", "z", "qw", "qx", "qy", "qz", "phi", "s_FL", "s_FR", "s_RL", "s_RR", "fn_FL", "fn_FR", "fn_RL",
    "fn_RR", "strut_FL", "strut_FR", "strut_RL", "strut_RR", "torque_L", "torque_R", "acc_g", "load_FL", "load_FR",
    "load_RL", "load_RR",
];

/// Trace read back from CSV: named numeric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredTrace {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl StoredTrace {
    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| SimError::io(path, e))?;
        let mut lines = BufReader::new(file).lines();
        let fmt = |reason: String| SimError::Format {
            path: path.to_path_buf(),
            reason,
        };
        let header: Vec<String> = match lines.next() {
            Some(h) => h
                .map_err(|e| SimError::io(path, e))?
                .split(',')
                .map(str::to_owned)
                .collect(),
            None => return Err(fmt("missing header".into())),
        };
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            let line = line.map_err(|e| SimError::io(path, e))?;
            let row = line
                .split(',')
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| fmt(format!("row {}: {e}", n + 2)))?;
            if row.len() != header.len() {
                return Err(fmt(format!("row {} has {} fields", n + 2, row.len())));
            }
            rows.push(row);
        }
        Ok(StoredTrace { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// `(t, acc_g)` pairs, matching [`SimulationTrace::acceleration_series`]
    /// for the written records.
    pub fn acceleration_series(&self) -> Option<Vec<(f64, f64)>> {
        let t = self.column("t")?;
        let a = self.column("acc_g")?;
        Some(t.into_iter().zip(a).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{step_with_report, DriveCommand};
    use crate::params::RoverParameters;
    use crate::suspension::{static_equilibrium, SuspensionMode};
    use crate::terrain::TerrainScene;

    fn short_trace() -> SimulationTrace {
        let p = RoverParameters::default();
        let mode = SuspensionMode::MechanicallyHybrid;
        let mut state = static_equilibrium(&p, mode).unwrap().state_at(0.0);
        state.position.z += 0.01;
        let scene = TerrainScene::flat();
        let mut trace = SimulationTrace::new(p.timestep);
        for _ in 0..50 {
            let (next, report) = step_with_report(&state, &p, mode, &scene, DriveCommand::new(0.2)).unwrap();
            trace.push(TraceRecord::new(std::mem::replace(&mut state, next), report));
        }
        trace
    }

    #[test]
    fn csv_round_trips_acceleration_series() {
        let trace = short_trace();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        trace.write_csv(&path, 1).unwrap();
        let stored = StoredTrace::read(&path).unwrap();
        assert_eq!(stored.header.join(","), TRACE_COLUMNS.join(","));
        assert_eq!(stored.rows.len(), trace.len());
        let (read, exact) = (stored.acceleration_series().unwrap(), trace.acceleration_series());
        assert_eq!(read.len(), exact.len());
        // traces are written with six decimals
        for (a, b) in read.iter().zip(&exact) {
            assert!((a.0 - b.0).abs() <= 5e-7 && (a.1 - b.1).abs() <= 5e-7, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn stride_decimates_rows() {
        let trace = short_trace();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        trace.write_csv(&path, 10).unwrap();
        assert_eq!(StoredTrace::read(&path).unwrap().rows.len(), 5);
    }
}
