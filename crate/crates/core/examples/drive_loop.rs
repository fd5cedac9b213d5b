//! Driving the stepper by hand: a rock under the left track lifts one
//! rocker, and the loop prints wheel loads and the rocker angle.

use rover_sim::dynamics::{DriveCommand, Simulation};
use rover_sim::terrain::SOIL_FRICTION;
use rover_sim::{static_equilibrium, Feature, RoverParameters, SuspensionMode, TerrainScene};

fn main() -> rover_sim::Result<()> {
    let params = RoverParameters::default();
    let mode = SuspensionMode::MechanicallyHybrid;
    let scene = TerrainScene::new(
        SOIL_FRICTION,
        vec![Feature::hemisphere([0.6, 0.5 * params.wheel_track], 0.05)],
    )?;
    let mut state = static_equilibrium(&params, mode)?.state_at(0.0);
    let command = DriveCommand::new(0.3);
    state.linear_velocity.x = command.speed;

    let mut sim = Simulation::new(params, mode, scene, state)?;
    let dt = sim.params.timestep;
    let steps = (5.0 / dt) as usize;
    for n in 0..steps {
        let report = sim.step(command)?;
        if n % (0.25 / dt) as usize == 0 {
            let loads: Vec<String> = report
                .contacts
                .iter()
                .map(|c| format!("{:6.2}", c.map_or(0.0, |c| c.normal_force)))
                .collect();
            println!(
                "t {:5.2}  x {:5.3}  rocker {:+6.2} deg  Fn [{}]",
                sim.state.time,
                sim.state.position.x,
                sim.state.rocker_angle.to_degrees(),
                loads.join(" ")
            );
        }
    }
    Ok(())
}
