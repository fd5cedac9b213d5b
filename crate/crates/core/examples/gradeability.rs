//! Slope climbing at crawl speed: which angles each configuration clears
//! on 0.4-friction soil.

use rover_sim::{run_scenario, RoverParameters, ScenarioKind, ScenarioSpec, SuspensionMode};

fn main() -> rover_sim::Result<()> {
    let rover = RoverParameters::default();
    let angles = [5.0, 10.0, 15.0, 20.0, 25.0, 30.0];
    print!("{:>5}", "deg");
    for mode in SuspensionMode::ALL {
        print!(" {:>8}", mode.label());
    }
    println!();
    for deg in angles {
        print!("{deg:>5}");
        for mode in SuspensionMode::ALL {
            let spec = ScenarioSpec::new(ScenarioKind::Slope, f64::to_radians(deg), 0.05, mode);
            let (_, outcome) = run_scenario(&spec, &rover)?;
            print!(" {:>8}", outcome.verdict.label());
        }
        println!();
    }
    Ok(())
}
