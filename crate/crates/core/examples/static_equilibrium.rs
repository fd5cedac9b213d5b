//! Resting pose of each configuration, then a few seconds of settling on
//! flat ground to compare simulated wheel loads with the configured shares.

use rover_sim::checks::resting_loads;
use rover_sim::{static_equilibrium, static_tipover_angles, RoverParameters, SuspensionMode, Wheel};

fn main() -> rover_sim::Result<()> {
    let params = RoverParameters::default();
    let (pitch_limit, roll_limit) = static_tipover_angles(&params);
    println!(
        "tip-over: {:.1} deg longitudinal, {:.1} deg lateral",
        pitch_limit.to_degrees(),
        roll_limit.to_degrees()
    );

    for mode in SuspensionMode::ALL {
        let eq = static_equilibrium(&params, mode)?;
        let rest = resting_loads(&params, mode, 3.0)?;
        println!("{mode}: chassis CoM at {:.1} mm", eq.chassis_height * 1e3);
        for wheel in Wheel::ALL {
            let i = wheel.index();
            println!(
                "  {wheel:?}: strut {:.2} mm, expected {:.3} N, settled {:.3} N",
                eq.strut_travel[i] * 1e3,
                params.static_load(wheel) * params.gravity,
                rest.normal[i]
            );
        }
        println!("  total {:.3} N", rest.total());
    }
    Ok(())
}
