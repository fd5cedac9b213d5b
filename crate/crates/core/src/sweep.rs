//! Grid execution and the results CSV.
//!
//! Cells run in parallel on a dedicated pool; each cell owns its trace file
//! and results are merged in grid order, so the CSV does not depend on
//! scheduling.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use crate::config::Config;
use crate::error::{Result, SimError};
use crate::metrics::{summarize, MetricsSummary, ScenarioGroup};
use crate::scenario::{run_scenario_with, ScenarioKind, ScenarioOutcome, ScenarioSpec, Verdict};
use crate::suspension::SuspensionMode;

pub const RESULTS_FILE: &str = "results.csv";
pub const TRACE_DIR: &str = "traces";
/// Outcome reason of cells whose integration blew up.
pub const UNSTABLE: &str = "numerical instability";

const RESULT_COLUMNS: [&str; 16] = [
    "kind",
    "parameter",
    "speed",
    "mode",
    "verdict",
    "F_max",
    "T_max",
    "Acc_max",
    "Acc_min",
    "acc_gap",
    "acc_sigma_mean",
    "seed",
    "gravity",
    "termination_time",
    "reason",
    "trace",
];

/// One simulated grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub spec: ScenarioSpec,
    pub outcome: ScenarioOutcome,
    /// Missing when the cell could not be simulated at all.
    pub summary: Option<MetricsSummary>,
    /// Trace file relative to the output directory.
    pub trace: Option<PathBuf>,
}

impl CellResult {
    /// The cell errored or its integration became unstable.
    pub fn failed(&self) -> bool {
        self.summary.is_none() || self.outcome.reason == UNSTABLE
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub config_hash: String,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl Provenance {
    pub fn for_config(config: &Config) -> Self {
        Provenance {
            config_hash: config.hash(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Cells in grid order.
    pub cells: Vec<CellResult>,
    pub provenance: Provenance,
}

impl SweepResult {
    pub fn get(&self, key: &str) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.spec.key() == key)
    }

    pub fn failed_cells(&self) -> impl Iterator<Item = &CellResult> {
        self.cells.iter().filter(|c| c.failed())
    }

    /// The cell matching `kind`, `parameter`, `speed` and `mode`, compared
    /// with a relative tolerance.
    pub fn find(&self, kind: ScenarioKind, parameter: f64, speed: f64, mode: SuspensionMode) -> Option<&CellResult> {
        self.cells.iter().find(|c| {
            c.spec.kind == kind
                && c.spec.mode == mode
                && close(c.spec.parameter, parameter)
                && close(c.spec.speed, speed)
        })
    }

    /// Distinct parameters of `kind`, ascending.
    pub fn parameters(&self, kind: ScenarioKind) -> Vec<f64> {
        distinct(
            self.cells
                .iter()
                .filter(|c| c.spec.kind == kind)
                .map(|c| c.spec.parameter),
        )
    }

    /// Distinct speeds of `kind`, ascending.
    pub fn speeds(&self, kind: ScenarioKind) -> Vec<f64> {
        distinct(self.cells.iter().filter(|c| c.spec.kind == kind).map(|c| c.spec.speed))
    }

    /// Modes present for `kind`, in canonical order.
    pub fn modes(&self, kind: ScenarioKind) -> Vec<SuspensionMode> {
        SuspensionMode::ALL
            .into_iter()
            .filter(|m| self.cells.iter().any(|c| c.spec.kind == kind && c.spec.mode == *m))
            .collect()
    }

    /// Summaries per mode of every `kind` cell at `speed`, one group per
    /// parameter; only slopes at `slope_angle` are kept.
    pub fn groups(&self, kinds: &[ScenarioKind], speed: f64, slope_angle: f64) -> Vec<ScenarioGroup> {
        let mut groups = Vec::new();
        for &kind in kinds {
            for p in self.parameters(kind) {
                if kind == ScenarioKind::Slope && !close(p, slope_angle) {
                    continue;
                }
                let mut group = ScenarioGroup::new(scenario_label(kind, p));
                for mode in self.modes(kind) {
                    if let Some(s) = self.find(kind, p, speed, mode).and_then(|c| c.summary) {
                        group.summaries.insert(mode, s);
                    }
                }
                if !group.summaries.is_empty() {
                    groups.push(group);
                }
            }
        }
        groups
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| SimError::io(path, e))?;
        let mut out = BufWriter::new(file);
        let p = &self.provenance;
        writeln!(
            out,
            "# config_sha256 {}\n# version {}\n# timestamp {}",
            p.config_hash, p.version, p.timestamp
        )
        .map_err(|e| SimError::io(path, e))?;
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| SimError::Format {
            path: path.to_path_buf(),
            reason: e.to_string(),
        };
        w.write_record(RESULT_COLUMNS).map_err(csv_err)?;
        for c in &self.cells {
            let s = &c.spec;
            let mut row = vec![
                s.kind.to_string(),
                s.parameter.to_string(),
                s.speed.to_string(),
                s.mode.to_string(),
                c.outcome.verdict.to_string(),
            ];
            match &c.summary {
                Some(m) => row.extend(
                    [m.f_max, m.t_max, m.acc_max, m.acc_min, m.acc_gap, m.acc_sigma_mean].map(|v| v.to_string()),
                ),
                None => row.extend(std::iter::repeat_n(String::new(), 6)),
            }
            row.extend([
                s.seed.to_string(),
                s.gravity.to_string(),
                c.outcome.termination_time.to_string(),
                c.outcome.reason.clone(),
                c.trace.as_ref().map(|t| t.display().to_string()).unwrap_or_default(),
            ]);
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| SimError::io(path, e))
    }

    /// Reads a results CSV written by [`SweepResult::write_csv`].
    pub fn read_csv(path: &Path) -> Result<Self> {
        let fmt = |reason: String| SimError::Format {
            path: path.to_path_buf(),
            reason,
        };
        let file = File::open(path).map_err(|e| SimError::io(path, e))?;
        let mut provenance = Provenance {
            config_hash: String::new(),
            version: String::new(),
            timestamp: 0,
        };
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| SimError::io(path, e))?;
            let Some(rest) = line.strip_prefix("# ") else { break };
            match rest.split_once(' ') {
                Some(("config_sha256", v)) => provenance.config_hash = v.to_string(),
                Some(("version", v)) => provenance.version = v.to_string(),
                Some(("timestamp", v)) => {
                    provenance.timestamp = v.parse().map_err(|_| fmt(format!("bad timestamp {v}")))?
                }
                _ => {}
            }
        }

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| fmt(e.to_string()))?;
        let header = reader.headers().map_err(|e| fmt(e.to_string()))?.clone();
        if header.iter().ne(RESULT_COLUMNS) {
            return Err(fmt("unexpected header".into()));
        }
        let mut cells = Vec::new();
        for (n, record) in reader.records().enumerate() {
            let r = record.map_err(|e| fmt(e.to_string()))?;
            let row = n + 2;
            let num = |i: usize| -> Result<f64> {
                r[i].parse::<f64>()
                    .map_err(|_| fmt(format!("row {row}: {} = {:?}", RESULT_COLUMNS[i], &r[i])))
            };
            let kind: ScenarioKind = r[0].parse()?;
            let mode: SuspensionMode = r[3].parse()?;
            let mut spec = ScenarioSpec::new(kind, num(1)?, num(2)?, mode);
            spec.seed = r[11].parse().map_err(|_| fmt(format!("row {row}: seed")))?;
            spec.gravity = num(12)?;
            let summary = if r[5].is_empty() {
                None
            } else {
                Some(MetricsSummary {
                    f_max: num(5)?,
                    t_max: num(6)?,
                    acc_max: num(7)?,
                    acc_min: num(8)?,
                    acc_gap: num(9)?,
                    acc_sigma_mean: num(10)?,
                })
            };
            cells.push(CellResult {
                spec,
                outcome: ScenarioOutcome {
                    verdict: r[4].parse::<Verdict>()?,
                    reason: r[14].to_string(),
                    termination_time: num(13)?,
                },
                summary,
                trace: (!r[15].is_empty()).then(|| PathBuf::from(&r[15])),
            });
        }
        Ok(SweepResult { cells, provenance })
    }
}

/// Human label of one scenario, e.g. `rock 10 cm` or `slope 20°`.
pub fn scenario_label(kind: ScenarioKind, parameter: f64) -> String {
    match kind {
        ScenarioKind::Slope => format!("slope {}°", trim(parameter.to_degrees(), 1)),
        ScenarioKind::FlatRun => "flat".to_string(),
        _ => format!("{kind} {} cm", trim(parameter * 100.0, 1)),
    }
}

/// Fixed-precision formatting without trailing zeros.
pub(crate) fn trim(value: f64, decimals: usize) -> String {
    let s = format!("{value:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| close(*a, *b));
    v
}

/// Simulates one cell, writing its trace under `out_dir` when asked.
pub fn run_cell(config: &Config, spec: &ScenarioSpec, out_dir: &Path) -> CellResult {
    let errored = |why: String| CellResult {
        spec: spec.clone(),
        outcome: ScenarioOutcome {
            verdict: Verdict::Failure,
            reason: why,
            termination_time: 0.0,
        },
        summary: None,
        trace: None,
    };
    let (trace, outcome) = match run_scenario_with(spec, &config.rover, &config.scenario) {
        Ok(run) => run,
        Err(e) => return errored(e.to_string()),
    };
    let summary = match summarize(&trace) {
        Ok(s) => s,
        Err(e) => return errored(e.to_string()),
    };
    let mut trace_path = None;
    if config.output.write_traces {
        let relative = Path::new(TRACE_DIR).join(format!("{}.csv", spec.key()));
        if let Err(e) = trace.write_csv(&out_dir.join(&relative), config.output.trace_stride) {
            return errored(e.to_string());
        }
        trace_path = Some(relative);
    }
    CellResult {
        spec: spec.clone(),
        outcome,
        summary: Some(summary),
        trace: trace_path,
    }
}

/// Runs `specs` on up to `jobs` threads and writes the results CSV.
pub fn run_cells(config: &Config, specs: &[ScenarioSpec], out_dir: &Path, jobs: usize) -> Result<SweepResult> {
    let traces = out_dir.join(TRACE_DIR);
    std::fs::create_dir_all(&traces).map_err(|e| SimError::io(&traces, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| SimError::validation("jobs", e.to_string()))?;
    let cells = pool.install(|| specs.par_iter().map(|spec| run_cell(config, spec, out_dir)).collect());
    let result = SweepResult {
        cells,
        provenance: Provenance::for_config(config),
    };
    result.write_csv(&out_dir.join(RESULTS_FILE))?;
    Ok(result)
}

/// Runs every cell of the configured grid.
pub fn run_sweep(config: &Config, out_dir: &Path, jobs: usize) -> Result<SweepResult> {
    run_cells(config, &config.sweep_specs(), out_dir, jobs)
}
