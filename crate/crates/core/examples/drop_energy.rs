//! Undamped, frictionless drop: total energy should stay put while the
//! wheels bounce on the spring-loaded contacts.

use rover_sim::checks::drop_test;
use rover_sim::{RoverParameters, SuspensionMode};

fn main() -> rover_sim::Result<()> {
    let params = RoverParameters::default();
    for dt in [1e-3, 5e-4] {
        for mode in SuspensionMode::ALL {
            let d = drop_test(&params, mode, 0.05, 2.0, dt)?;
            println!(
                "dt {:.1} ms {mode:>3}: E0 {:.4} J, drift {:.4}% (staggered {:.3}%)",
                dt * 1e3,
                d.initial_energy,
                d.max_drift * 100.0,
                d.max_staggered_drift * 100.0
            );
        }
    }
    Ok(())
}
