//! Obstacle and slope scenarios: construction, execution and outcome
//! classification.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{step_with_report, wheel_centers, DriveCommand};
use crate::error::{Result, SimError};
use crate::params::{RoverParameters, Wheel};
use crate::state::RoverState;
use crate::suspension::{static_equilibrium, SuspensionMode};
use crate::terrain::{Feature, TerrainScene, OBSTACLE_FRICTION, SOIL_FRICTION};
use crate::trace::{SimulationTrace, TraceRecord};

/// Speed range of the evaluation grids, m/s.
pub const MIN_SPEED: f64 = 0.05;
pub const MAX_SPEED: f64 = 1.0;
/// Outcrop profile seed used when none is given.
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    /// Full-width step; parameter is its height, m.
    Step,
    /// Hemispherical rock under the left wheels; parameter is its radius, m.
    Rock,
    /// Bumpy strip under the left wheels; parameter is its peak height, m.
    Outcrop,
    /// Full-width incline; parameter is its angle, rad.
    Slope,
    /// Featureless plane; parameter unused.
    #[serde(rename = "flat")]
    FlatRun,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::Step,
        ScenarioKind::Rock,
        ScenarioKind::Outcrop,
        ScenarioKind::Slope,
        ScenarioKind::FlatRun,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ScenarioKind::Step => "step",
            ScenarioKind::Rock => "rock",
            ScenarioKind::Outcrop => "outcrop",
            ScenarioKind::Slope => "slope",
            ScenarioKind::FlatRun => "flat",
        }
    }

    /// Accepted geometry range for the scenario parameter.
    fn parameter_range(self) -> (f64, f64) {
        match self {
            ScenarioKind::Step => (0.0, 0.3),
            ScenarioKind::Rock => (0.0, 0.3),
            ScenarioKind::Outcrop => (0.0, 0.3),
            ScenarioKind::Slope => (0.0, 45f64.to_radians()),
            ScenarioKind::FlatRun => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ScenarioKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                SimError::validation(
                    "kind",
                    format!("expected step, rock, outcrop, slope or flat, got {s:?}"),
                )
            })
    }
}

/// One simulation cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    /// Step height, rock radius or outcrop peak height in m; slope angle in rad.
    pub parameter: f64,
    /// Commanded forward speed, m/s.
    pub speed: f64,
    pub mode: SuspensionMode,
    pub gravity: f64,
    /// Simulated time allowed beyond the nominal traverse time, s.
    pub timeout: f64,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind, parameter: f64, speed: f64, mode: SuspensionMode) -> Self {
        ScenarioSpec {
            kind,
            parameter,
            speed,
            mode,
            gravity: crate::params::LUNAR_GRAVITY,
            timeout: 30.0,
            seed: DEFAULT_SEED,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(SimError::InvalidSpec(what));
        if !(MIN_SPEED..=MAX_SPEED).contains(&self.speed) {
            return bad(format!("speed {} outside [{MIN_SPEED}, {MAX_SPEED}] m/s", self.speed));
        }
        if !(self.timeout > 0.0 && self.timeout.is_finite()) {
            return bad(format!("timeout must be positive, got {}", self.timeout));
        }
        if !(self.gravity >= 0.0 && self.gravity.is_finite()) {
            return bad(format!("gravity must be non-negative, got {}", self.gravity));
        }
        let (lo, hi) = self.kind.parameter_range();
        if self.kind != ScenarioKind::FlatRun && !(self.parameter > lo && self.parameter <= hi) {
            return bad(format!(
                "{} parameter {} outside ({lo}, {hi:.4}]",
                self.kind, self.parameter
            ));
        }
        Ok(())
    }

    /// Stable identifier, used for file names and result ordering.
    pub fn key(&self) -> String {
        let parameter = match self.kind {
            ScenarioKind::Slope => format!("{:.1}deg", self.parameter.to_degrees()),
            ScenarioKind::FlatRun => "0".to_string(),
            _ => format!("{:.0}mm", self.parameter * 1000.0),
        };
        format!("{}_{}_v{:.2}_{}", self.kind, parameter, self.speed, self.mode)
    }
}

/// Course layout and termination thresholds shared by all cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioSettings {
    /// x of the feature's leading edge, m.
    pub feature_x: f64,
    /// Initial distance from the front hubs to the feature, m.
    pub approach: f64,
    pub soil_friction: f64,
    pub obstacle_friction: f64,
    pub outcrop_length: f64,
    pub outcrop_width: f64,
    pub slope_length: f64,
    /// Minimum in-contact fraction counted as full contact during a climb.
    pub contact_fraction: f64,
    pub stall_speed: f64,
    pub stall_duration: f64,
    /// Roll or pitch beyond which the rover counts as tipped over, rad.
    pub tip_angle: f64,
}

impl Default for ScenarioSettings {
    fn default() -> Self {
        ScenarioSettings {
            feature_x: 2.0,
            approach: 1.0,
            soil_friction: SOIL_FRICTION,
            obstacle_friction: OBSTACLE_FRICTION,
            outcrop_length: 1.5,
            outcrop_width: 0.3,
            slope_length: 1.5,
            contact_fraction: 0.95,
            stall_speed: 0.01,
            stall_duration: 2.0,
            tip_angle: 60f64.to_radians(),
        }
    }
}

impl ScenarioSettings {
    /// Checks ranges; errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("approach", self.approach),
            ("outcrop_length", self.outcrop_length),
            ("outcrop_width", self.outcrop_width),
            ("slope_length", self.slope_length),
            ("stall_speed", self.stall_speed),
            ("stall_duration", self.stall_duration),
            ("tip_angle", self.tip_angle),
        ];
        for (key, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(SimError::validation(
                    key,
                    format!("must be finite and > 0, got {value}"),
                ));
            }
        }
        for (key, value) in [
            ("soil_friction", self.soil_friction),
            ("obstacle_friction", self.obstacle_friction),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(SimError::validation(
                    key,
                    format!("must be finite and >= 0, got {value}"),
                ));
            }
        }
        if !self.feature_x.is_finite() {
            return Err(SimError::validation("feature_x", "must be finite"));
        }
        if !(self.contact_fraction > 0.0 && self.contact_fraction <= 1.0) {
            return Err(SimError::validation("contact_fraction", "must lie in (0, 1]"));
        }
        if self.tip_angle > std::f64::consts::FRAC_PI_2 {
            return Err(SimError::validation("tip_angle", "must not exceed 90°"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Success,
    #[serde(rename = "semi")]
    SemiSuccess,
    Failure,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Success => "success",
            Verdict::SemiSuccess => "semi",
            Verdict::Failure => "failure",
        }
    }

    /// At least semi-success.
    pub fn passed(self) -> bool {
        self != Verdict::Failure
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Verdict {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "success" => Ok(Verdict::Success),
            "semi" => Ok(Verdict::SemiSuccess),
            "failure" => Ok(Verdict::Failure),
            other => Err(SimError::validation("verdict", format!("unknown verdict {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub verdict: Verdict,
    pub reason: String,
    /// Simulated time at which the run ended, s.
    pub termination_time: f64,
}

impl ScenarioOutcome {
    fn new(verdict: Verdict, reason: &str, time: f64) -> Self {
        ScenarioOutcome {
            verdict,
            reason: reason.to_string(),
            termination_time: time,
        }
    }
}

/// Where the course starts and where the rover counts as through.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Course {
    pub kind: ScenarioKind,
    /// Leading edge of the feature.
    pub start_x: f64,
    /// A wheel hub beyond this x has cleared the feature (or the crest).
    pub pass_x: f64,
}

impl Course {
    pub fn for_feature(
        kind: ScenarioKind,
        feature: Option<&Feature>,
        settings: &ScenarioSettings,
        params: &RoverParameters,
    ) -> Self {
        let (start_x, end_x) = match feature {
            Some(f) => (f.leading_x(), f.trailing_x()),
            None => (settings.feature_x, settings.feature_x),
        };
        Course {
            kind,
            start_x,
            pass_x: end_x + params.wheel_radius,
        }
    }
}

/// A scenario ready to run.
#[derive(Debug, Clone)]
pub struct BuiltScenario {
    pub spec: ScenarioSpec,
    pub params: RoverParameters,
    pub scene: TerrainScene,
    pub initial: RoverState,
    pub course: Course,
}

impl BuiltScenario {
    /// Nominal traverse time plus the spec's timeout.
    pub fn time_limit(&self) -> f64 {
        let rear = wheel_centers(&self.initial, &self.params)[Wheel::RearLeft.index()].x;
        let distance = (self.course.pass_x - rear).max(0.0);
        distance / self.spec.speed + self.spec.timeout
    }
}

/// Builds the terrain and initial state of `spec` with default settings.
pub fn build_scenario(spec: &ScenarioSpec, rover: &RoverParameters) -> Result<BuiltScenario> {
    build_scenario_with(spec, rover, &ScenarioSettings::default())
}

/// Places the rover at static equilibrium with its front hubs `approach`
/// upstream of the feature, already moving at the commanded speed.
pub fn build_scenario_with(
    spec: &ScenarioSpec,
    rover: &RoverParameters,
    settings: &ScenarioSettings,
) -> Result<BuiltScenario> {
    spec.validate()?;
    let params = RoverParameters {
        gravity: spec.gravity,
        ..rover.clone()
    };
    params.validate()?;

    let x_f = settings.feature_x;
    let left_track = 0.5 * params.wheel_track;
    let feature = match spec.kind {
        ScenarioKind::Step => Some(Feature::step(x_f, spec.parameter)),
        ScenarioKind::Rock => Some(Feature::hemisphere([x_f + spec.parameter, left_track], spec.parameter)),
        ScenarioKind::Outcrop => Some(Feature::outcrop(
            x_f,
            left_track,
            settings.outcrop_width,
            settings.outcrop_length,
            spec.parameter,
            spec.seed,
        )),
        ScenarioKind::Slope => Some(Feature::slope(x_f, settings.slope_length, spec.parameter)),
        ScenarioKind::FlatRun => None,
    };
    let feature = feature.map(|f| match spec.kind {
        ScenarioKind::Slope => f.with_friction(settings.soil_friction),
        _ => f.with_friction(settings.obstacle_friction),
    });
    let course = Course::for_feature(spec.kind, feature.as_ref(), settings, &params);
    let scene = TerrainScene::new(settings.soil_friction, feature.into_iter().collect())?;

    let eq = static_equilibrium(&params, spec.mode)?;
    let front = wheel_centers(&eq.state_at(0.0), &params)[Wheel::FrontLeft.index()].x;
    let mut initial = eq.state_at(x_f - settings.approach - front);
    initial.linear_velocity.x = spec.speed;

    Ok(BuiltScenario {
        spec: spec.clone(),
        params,
        scene,
        initial,
        course,
    })
}

/// Incremental classifier fed one record at a time; the same rules decide
/// both live runs and stored traces.
#[derive(Debug, Clone)]
struct Monitor<'a> {
    course: Course,
    params: &'a RoverParameters,
    settings: &'a ScenarioSettings,
    dt: f64,
    slow_time: f64,
    fronts_passed: bool,
    climb_samples: usize,
    climb_contact: [usize; 4],
}

impl<'a> Monitor<'a> {
    fn new(course: Course, params: &'a RoverParameters, settings: &'a ScenarioSettings, dt: f64) -> Self {
        Monitor {
            course,
            params,
            settings,
            dt,
            slow_time: 0.0,
            fronts_passed: false,
            climb_samples: 0,
            climb_contact: [0; 4],
        }
    }

    fn observe(&mut self, record: &TraceRecord) -> Option<ScenarioOutcome> {
        let s = &record.state;
        let t = s.time;
        let (roll, pitch, _) = s.euler_angles();
        if roll.abs() > self.settings.tip_angle || pitch.abs() > self.settings.tip_angle {
            return Some(ScenarioOutcome::new(Verdict::Failure, "tip-over", t));
        }

        let hubs = wheel_centers(s, self.params);
        let past = |w: Wheel| hubs[w.index()].x > self.course.pass_x;
        self.fronts_passed |= past(Wheel::FrontLeft) && past(Wheel::FrontRight);
        let all_passed = Wheel::ALL.iter().all(|&w| past(w));

        if self.course.kind == ScenarioKind::Slope {
            let front_x = hubs[Wheel::FrontLeft.index()].x.max(hubs[Wheel::FrontRight.index()].x);
            if front_x >= self.course.start_x {
                self.climb_samples += 1;
                for w in Wheel::ALL {
                    if record.in_contact(w) {
                        self.climb_contact[w.index()] += 1;
                    }
                }
            }
            if all_passed {
                return Some(self.slope_verdict(t));
            }
        } else if all_passed {
            return Some(ScenarioOutcome::new(Verdict::Success, "all wheels cleared", t));
        }

        if s.linear_velocity.x < self.settings.stall_speed {
            self.slow_time += self.dt;
        } else {
            self.slow_time = 0.0;
        }
        if self.slow_time >= self.settings.stall_duration - 0.5 * self.dt {
            return Some(self.unfinished("stalled", t));
        }
        None
    }

    fn slope_verdict(&self, t: f64) -> ScenarioOutcome {
        let fraction = |w: Wheel| {
            if self.climb_samples == 0 {
                1.0
            } else {
                self.climb_contact[w.index()] as f64 / self.climb_samples as f64
            }
        };
        let full = |w: Wheel| fraction(w) >= self.settings.contact_fraction;
        let rears = full(Wheel::RearLeft) && full(Wheel::RearRight);
        let fronts = full(Wheel::FrontLeft) && full(Wheel::FrontRight);
        match (fronts, rears) {
            (true, true) => ScenarioOutcome::new(Verdict::Success, "crest reached", t),
            (false, true) => ScenarioOutcome::new(Verdict::SemiSuccess, "crest reached, front wheels lost contact", t),
            _ => ScenarioOutcome::new(Verdict::Failure, "crest reached, rear wheels lost contact", t),
        }
    }

    /// Outcome of a run that ended without clearing the course.
    fn unfinished(&self, why: &str, t: f64) -> ScenarioOutcome {
        if self.course.kind != ScenarioKind::Slope && self.fronts_passed {
            ScenarioOutcome::new(Verdict::SemiSuccess, &format!("only front wheels cleared ({why})"), t)
        } else {
            ScenarioOutcome::new(Verdict::Failure, why, t)
        }
    }
}

fn classify_with(
    trace: &SimulationTrace,
    course: Course,
    params: &RoverParameters,
    settings: &ScenarioSettings,
) -> ScenarioOutcome {
    let mut monitor = Monitor::new(course, params, settings, trace.dt);
    for record in &trace.records {
        if let Some(outcome) = monitor.observe(record) {
            return outcome;
        }
    }
    monitor.unfinished("timeout", trace.duration())
}

/// Classifies an obstacle run (step, rock, outcrop or flat): success when all
/// four hubs clear the course, semi-success when only the fronts do.
pub fn classify_step_outcome(
    trace: &SimulationTrace,
    course: Course,
    params: &RoverParameters,
    settings: &ScenarioSettings,
) -> ScenarioOutcome {
    classify_with(trace, course, params, settings)
}

/// Classifies a slope run by crest arrival and per-wheel contact during the climb.
pub fn classify_slope_outcome(
    trace: &SimulationTrace,
    course: Course,
    params: &RoverParameters,
    settings: &ScenarioSettings,
) -> ScenarioOutcome {
    classify_with(trace, course, params, settings)
}

/// Re-derives the outcome of a finished run from its trace.
pub fn classify(built: &BuiltScenario, trace: &SimulationTrace, settings: &ScenarioSettings) -> ScenarioOutcome {
    match built.course.kind {
        ScenarioKind::Slope => classify_slope_outcome(trace, built.course, &built.params, settings),
        _ => classify_step_outcome(trace, built.course, &built.params, settings),
    }
}

/// Runs `spec` with default settings.
pub fn run_scenario(spec: &ScenarioSpec, rover: &RoverParameters) -> Result<(SimulationTrace, ScenarioOutcome)> {
    run_scenario_with(spec, rover, &ScenarioSettings::default())
}

pub fn run_scenario_with(
    spec: &ScenarioSpec,
    rover: &RoverParameters,
    settings: &ScenarioSettings,
) -> Result<(SimulationTrace, ScenarioOutcome)> {
    let built = build_scenario_with(spec, rover, settings)?;
    Ok(run_built(&built, settings))
}

/// Steps a built scenario until its outcome is decided or time runs out.
pub fn run_built(built: &BuiltScenario, settings: &ScenarioSettings) -> (SimulationTrace, ScenarioOutcome) {
    let params = &built.params;
    let dt = params.timestep;
    let command = DriveCommand::new(built.spec.speed);
    let steps = (built.time_limit() / dt).ceil() as usize;
    let mut trace = SimulationTrace::new(dt);
    trace.records.reserve(steps.min(200_000));
    let mut monitor = Monitor::new(built.course, params, settings, dt);
    let mut state = built.initial.clone();
    for _ in 0..steps {
        match step_with_report(&state, params, built.spec.mode, &built.scene, command) {
            Ok((next, report)) => {
                let record = TraceRecord::new(std::mem::replace(&mut state, next), report);
                let decided = monitor.observe(&record);
                trace.push(record);
                if let Some(outcome) = decided {
                    return (trace, outcome);
                }
            }
            // any step error means the state left the valid region
            Err(_) => {
                return (
                    trace,
                    ScenarioOutcome::new(Verdict::Failure, "numerical instability", state.time),
                );
            }
        }
    }
    let outcome = monitor.unfinished("timeout", trace.duration());
    (trace, outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::ContactPoint;
    use nalgebra::{UnitQuaternion, Vector3};

    fn record(params: &RoverParameters, x: f64, vx: f64, t: f64, touching: [bool; 4]) -> TraceRecord {
        let mut state = static_equilibrium(params, SuspensionMode::MechanicallyHybrid)
            .unwrap()
            .state_at(x);
        state.linear_velocity.x = vx;
        state.time = t;
        let contact = |w: Wheel| ContactPoint {
            wheel: w,
            position: Vector3::zeros(),
            normal: Vector3::z(),
            penetration: 1e-4,
            penetration_rate: 0.0,
            normal_force: 8.0,
            friction_force: Vector3::zeros(),
            friction_coefficient: SOIL_FRICTION,
            slip_velocity: Vector3::zeros(),
        };
        TraceRecord {
            state,
            contacts: Wheel::ALL.map(|w| touching[w.index()].then(|| contact(w))),
            strut_force: [0.0; 4],
            vertical_load: [0.0; 4],
            pivot_torque: [0.0; 2],
            vertical_acceleration: 0.0,
        }
    }

    fn trace(records: Vec<TraceRecord>) -> SimulationTrace {
        let mut t = SimulationTrace::new(0.1);
        for r in records {
            t.push(r);
        }
        t
    }

    fn course(kind: ScenarioKind) -> Course {
        Course {
            kind,
            start_x: 1.0,
            pass_x: 2.0,
        }
    }

    /// CoM x that puts the rear hubs just past (or the front hubs just past
    /// only) the pass line.
    fn com_for(params: &RoverParameters, all: bool) -> f64 {
        let hubs = wheel_centers(
            &static_equilibrium(params, SuspensionMode::MechanicallyHybrid)
                .unwrap()
                .state_at(0.0),
            params,
        );
        let wheel = if all { Wheel::RearLeft } else { Wheel::FrontLeft };
        2.0 - hubs[wheel.index()].x + 0.01
    }

    #[test]
    fn clearing_all_hubs_is_success() {
        let p = RoverParameters::default();
        let s = ScenarioSettings::default();
        let t = trace(vec![
            record(&p, 0.0, 1.0, 0.0, [true; 4]),
            record(&p, com_for(&p, true), 1.0, 0.1, [true; 4]),
        ]);
        let out = classify_step_outcome(&t, course(ScenarioKind::Step), &p, &s);
        assert_eq!(out.verdict, Verdict::Success);
        assert_eq!(out.termination_time, 0.1);
    }

    #[test]
    fn tip_over_fails_immediately() {
        let p = RoverParameters::default();
        let s = ScenarioSettings::default();
        let mut r = record(&p, com_for(&p, true), 1.0, 0.0, [true; 4]);
        r.state.orientation = UnitQuaternion::from_euler_angles(70f64.to_radians(), 0.0, 0.0);
        let out = classify_step_outcome(&trace(vec![r]), course(ScenarioKind::Rock), &p, &s);
        assert_eq!((out.verdict, out.reason.as_str()), (Verdict::Failure, "tip-over"));
    }

    #[test]
    fn stall_after_fronts_cleared_is_semi() {
        let p = RoverParameters::default();
        let s = ScenarioSettings::default();
        let fronts = com_for(&p, false);
        let mut records = vec![record(&p, fronts, 0.5, 0.0, [true; 4])];
        records.extend((1..=25).map(|k| record(&p, fronts, 0.0, 0.1 * k as f64, [true; 4])));
        let out = classify_step_outcome(&trace(records), course(ScenarioKind::Step), &p, &s);
        assert_eq!(out.verdict, Verdict::SemiSuccess);
        assert!(out.reason.contains("stalled"));
        assert!((out.termination_time - 2.0).abs() < 1e-9);
    }

    #[test]
    fn stall_before_the_obstacle_fails() {
        let p = RoverParameters::default();
        let s = ScenarioSettings::default();
        let records = (0..=25)
            .map(|k| record(&p, 0.0, 0.0, 0.1 * k as f64, [true; 4]))
            .collect();
        let out = classify_step_outcome(&trace(records), course(ScenarioKind::Step), &p, &s);
        assert_eq!((out.verdict, out.reason.as_str()), (Verdict::Failure, "stalled"));
    }

    #[test]
    fn short_trace_times_out() {
        let p = RoverParameters::default();
        let s = ScenarioSettings::default();
        let out = classify_step_outcome(
            &trace(vec![record(&p, 0.0, 1.0, 0.0, [true; 4])]),
            course(ScenarioKind::Outcrop),
            &p,
            &s,
        );
        assert_eq!((out.verdict, out.reason.as_str()), (Verdict::Failure, "timeout"));
    }

    fn climb(front_contact: bool, rear_contact: bool) -> ScenarioOutcome {
        let p = RoverParameters::default();
        let s = ScenarioSettings::default();
        let touching = [front_contact, front_contact, rear_contact, rear_contact];
        let on_ramp = com_for(&p, false) - 0.5;
        let mut records: Vec<TraceRecord> = (0..10)
            .map(|k| record(&p, on_ramp, 1.0, 0.1 * k as f64, touching))
            .collect();
        records.push(record(&p, com_for(&p, true), 1.0, 1.0, touching));
        classify_slope_outcome(&trace(records), course(ScenarioKind::Slope), &p, &s)
    }

    #[test]
    fn slope_verdict_follows_contact_during_climb() {
        assert_eq!(climb(true, true).verdict, Verdict::Success);
        assert_eq!(climb(false, true).verdict, Verdict::SemiSuccess);
        assert_eq!(climb(true, false).verdict, Verdict::Failure);
        assert_eq!(climb(false, false).verdict, Verdict::Failure);
    }

    #[test]
    fn stalled_slope_is_failure_even_past_the_fronts() {
        let p = RoverParameters::default();
        let s = ScenarioSettings::default();
        let fronts = com_for(&p, false);
        let records = (0..=25)
            .map(|k| record(&p, fronts, 0.0, 0.1 * k as f64, [true; 4]))
            .collect();
        let out = classify_slope_outcome(&trace(records), course(ScenarioKind::Slope), &p, &s);
        assert_eq!(out.verdict, Verdict::Failure);
    }

    #[test]
    fn spec_validation() {
        use SuspensionMode::*;
        assert!(ScenarioSpec::new(ScenarioKind::Step, 0.05, 0.5, DependentRigid)
            .validate()
            .is_ok());
        assert!(ScenarioSpec::new(ScenarioKind::Step, 0.05, 1.5, DependentRigid)
            .validate()
            .is_err());
        assert!(ScenarioSpec::new(ScenarioKind::Step, 0.05, 0.01, DependentRigid)
            .validate()
            .is_err());
        assert!(ScenarioSpec::new(ScenarioKind::Step, 0.0, 0.5, DependentRigid)
            .validate()
            .is_err());
        assert!(
            ScenarioSpec::new(ScenarioKind::Slope, 50f64.to_radians(), 0.5, DependentRigid)
                .validate()
                .is_err()
        );
        let spec = ScenarioSpec {
            gravity: -1.0,
            ..ScenarioSpec::new(ScenarioKind::Rock, 0.1, 0.5, DependentRigid)
        };
        assert!(matches!(spec.validate(), Err(SimError::InvalidSpec(_))));
    }

    #[test]
    fn keys_are_unique_and_readable() {
        let k = |kind, p, v, m| ScenarioSpec::new(kind, p, v, m).key();
        assert_eq!(
            k(ScenarioKind::Rock, 0.1, 1.0, SuspensionMode::MechanicallyHybrid),
            "rock_100mm_v1.00_MHS"
        );
        assert_eq!(
            k(
                ScenarioKind::Slope,
                20f64.to_radians(),
                0.05,
                SuspensionMode::DependentRigid
            ),
            "slope_20.0deg_v0.05_DR"
        );
        assert_ne!(
            k(ScenarioKind::Step, 0.01, 0.5, SuspensionMode::IndependentElastic),
            k(ScenarioKind::Step, 0.02, 0.5, SuspensionMode::IndependentElastic)
        );
    }

    #[test]
    fn built_scenario_starts_one_approach_upstream_at_speed() {
        let spec = ScenarioSpec::new(ScenarioKind::Step, 0.05, 0.5, SuspensionMode::MechanicallyHybrid);
        let s = ScenarioSettings::default();
        let built = build_scenario(&spec, &RoverParameters::default()).unwrap();
        let front = wheel_centers(&built.initial, &built.params)[Wheel::FrontLeft.index()].x;
        assert!((s.feature_x - front - s.approach).abs() < 1e-12);
        assert_eq!(built.initial.linear_velocity.x, 0.5);
        assert!(built.time_limit() > spec.timeout);
        assert_eq!(built.course.start_x, s.feature_x);
        assert_eq!(built.course.pass_x, s.feature_x + built.params.wheel_radius);
    }

    #[test]
    fn gravity_comes_from_the_spec() {
        let spec = ScenarioSpec {
            gravity: 9.81,
            ..ScenarioSpec::new(ScenarioKind::FlatRun, 0.0, 0.5, SuspensionMode::DependentRigid)
        };
        assert_eq!(
            build_scenario(&spec, &RoverParameters::default())
                .unwrap()
                .params
                .gravity,
            9.81
        );
    }

    #[test]
    fn settings_errors_name_the_key() {
        let bad = ScenarioSettings {
            contact_fraction: 1.5,
            ..ScenarioSettings::default()
        };
        assert!(matches!(bad.validate(), Err(SimError::Validation { key, .. }) if key == "contact_fraction"));
        let bad = ScenarioSettings {
            stall_duration: 0.0,
            ..ScenarioSettings::default()
        };
        assert!(matches!(bad.validate(), Err(SimError::Validation { key, .. }) if key == "stall_duration"));
    }

    #[test]
    fn verdict_labels_round_trip() {
        for v in [Verdict::Success, Verdict::SemiSuccess, Verdict::Failure] {
            assert_eq!(v.label().parse::<Verdict>().unwrap(), v);
        }
        assert!(Verdict::SemiSuccess.passed() && !Verdict::Failure.passed());
    }
}
