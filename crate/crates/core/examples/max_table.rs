//! Rock, outcrop and 20° slope at 1 m/s in each configuration, tabulated as
//! per-scenario maxima with reduction rates and the average DR to MHS change.

use std::path::PathBuf;

use rover_sim::report::{reduction_summary, MaxTable};
use rover_sim::sweep::run_cells;
use rover_sim::{Config, ScenarioKind, SuspensionMode};

fn main() -> rover_sim::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map_or_else(|| PathBuf::from("out/max_table"), PathBuf::from);
    let config = Config {
        output: rover_sim::config::OutputConfig {
            write_traces: false,
            ..Default::default()
        },
        ..Config::default()
    };
    let cells = [
        (ScenarioKind::Rock, 0.10),
        (ScenarioKind::Outcrop, 0.10),
        (ScenarioKind::Slope, 20f64.to_radians()),
    ];
    let specs: Vec<_> = cells
        .iter()
        .flat_map(|&(kind, p)| SuspensionMode::ALL.map(|m| config.spec(kind, p, 1.0, m)))
        .collect();
    let result = run_cells(&config, &specs, &out, 1)?;

    let groups = result.groups(&config.report.table_kinds, 1.0, 20f64.to_radians());
    let table = MaxTable::build(&groups, &SuspensionMode::ALL)?;
    print!("{}", table.to_csv());
    println!();
    print!("{}", reduction_summary(&result, &config.report)?);
    Ok(())
}
