//! A config-driven sweep: a small step grid parsed from TOML, run on two
//! threads, written as results CSV plus heatmaps and read back.

use std::path::PathBuf;

use rover_sim::report::generate_reports;
use rover_sim::sweep::{run_sweep, SweepResult, RESULTS_FILE};
use rover_sim::Config;

const CONFIG: &str = r#"
seed = 1

[sweep]
kinds = ["step"]
speeds = [0.1, 0.5, 1.0]
step_heights = [0.02, 0.06, 0.10]

[output]
trace_stride = 20
"#;

fn main() -> rover_sim::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map_or_else(|| PathBuf::from("out/config_sweep"), PathBuf::from);
    let config = Config::from_toml_str(CONFIG)?;
    println!("config {}", &config.hash()[..12]);

    let result = run_sweep(&config, &out, 2)?;
    for cell in &result.cells {
        println!(
            "{:<24} {:<8} {}",
            cell.spec.key(),
            cell.outcome.verdict.label(),
            cell.outcome.reason
        );
    }
    let reports = generate_reports(&result, &config.report, &out)?;
    for path in reports.written {
        println!("wrote {}", path.display());
    }

    let back = SweepResult::read_csv(&out.join(RESULTS_FILE))?;
    assert_eq!(back.cells.len(), result.cells.len());
    assert_eq!(back.provenance.config_hash, config.hash());
    Ok(())
}
