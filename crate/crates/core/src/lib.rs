//! Rover suspension dynamics.
//!
//! A four-wheel rover with differential rockers and per-wheel coil-over
//! struts, simulated in three passive configurations: dependent-rigid (DR),
//! independent-elastic (IE) and mechanically-hybrid (MHS). The crate covers
//! the reduced-coordinate dynamics, analytic terrain with penalty contact,
//! obstacle and slope scenarios with outcome classification, the evaluation
//! metrics, integrator self-checks and a sweep harness writing CSV results
//! and SVG figures.

pub mod checks;
pub mod config;
pub mod contact;
pub mod dynamics;
pub mod error;
pub mod kinematics;
pub mod metrics;
pub mod params;
pub mod quarter_car;
pub mod report;
pub mod scenario;
pub mod state;
pub mod suspension;
pub mod sweep;
pub mod terrain;
pub mod trace;

pub use checks::{run_checks, CheckResult};
pub use config::{load_config, Config};
pub use contact::{resolve_contact, ContactPoint};
pub use dynamics::{step, step_with_report, suspension_force, DriveCommand, Simulation, StepReport};
pub use error::{Result, SimError};
pub use kinematics::attachment_points;
pub use metrics::{average_reduction, reduction_rate, summarize, MetricsSummary, ScenarioGroup};
pub use params::{RoverParameters, Wheel, G_UNIT, LUNAR_GRAVITY};
pub use scenario::{run_scenario, run_scenario_with, ScenarioKind, ScenarioOutcome, ScenarioSpec, Verdict};
pub use state::RoverState;
pub use suspension::{differential_pitch, static_equilibrium, static_tipover_angles, SuspensionMode};
pub use sweep::{run_sweep, SweepResult};
pub use terrain::{outcrop_profile, terrain_height, Feature, TerrainScene};
pub use trace::SimulationTrace;
