//! The 10 cm rock at 1 m/s in all three configurations: verdicts, metric
//! maxima and an acceleration plot. Output goes to the first argument or
//! `out/rock_traverse`.

use std::path::PathBuf;

use rover_sim::report::{emit_accel_plot, Series};
use rover_sim::{run_scenario, summarize, RoverParameters, ScenarioKind, ScenarioSpec, SuspensionMode};

fn main() -> rover_sim::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map_or_else(|| PathBuf::from("out/rock_traverse"), PathBuf::from);
    std::fs::create_dir_all(&out).map_err(|e| rover_sim::SimError::Io {
        path: out.clone(),
        source: e,
    })?;
    let rover = RoverParameters::default();

    let mut series = Vec::new();
    for mode in SuspensionMode::ALL {
        let spec = ScenarioSpec::new(ScenarioKind::Rock, 0.10, 1.0, mode);
        let (trace, outcome) = run_scenario(&spec, &rover)?;
        let m = summarize(&trace)?;
        println!(
            "{mode:>3}: {} ({}), F {:.1} N, T {:.1} N·m, Acc {:+.2}/{:+.2} g",
            outcome.verdict.label(),
            outcome.reason,
            m.f_max,
            m.t_max,
            m.acc_max,
            m.acc_min
        );
        series.push(Series::new(mode.label(), trace.acceleration_series()));
    }
    let path = emit_accel_plot("10 cm rock at 1 m/s", &series, &out, "accel_rock")?;
    println!("wrote {}", path.display());
    Ok(())
}
