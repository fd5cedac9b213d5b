//! Self-checks of the integrator and the resting state: the isolated-strut
//! oracle, the energy ledger of an undamped drop and static wheel loads.

use std::fmt;

use crate::dynamics::{energy, step_with_report, DriveCommand};
use crate::error::Result;
use crate::params::{RoverParameters, Wheel};
use crate::quarter_car::quarter_car_error;
use crate::state::RoverState;
use crate::suspension::{static_equilibrium, SuspensionMode};
use crate::terrain::TerrainScene;

/// Timestep the strut oracle and the energy ledger run at, s.
pub const CHECK_TIMESTEP: f64 = 0.001;

/// One named check against an upper limit.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl CheckResult {
    fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        CheckResult {
            name: name.into(),
            value,
            limit,
            passed: value.is_finite() && value < limit,
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {:.5} (limit {})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.limit
        )
    }
}

/// Largest strut-oracle error over 5 s, as a fraction of the initial
/// displacement, for a single wheel's sprung share and for the whole rover
/// on one strut.
pub fn strut_oracle_error(params: &RoverParameters) -> f64 {
    let masses = [params.front_static_load - params.unsprung_mass, params.total_mass];
    masses
        .into_iter()
        .map(|m| quarter_car_error(params, m, 0.01, 5.0, CHECK_TIMESTEP))
        .fold(0.0, f64::max)
}

/// Energy drift of an undamped, frictionless drop.
///
/// The semi-implicit update carries velocities half a step ahead of
/// positions, so energy is evaluated at each position with the mean of the
/// velocities on either side. The raw figure pairs positions with the
/// staggered velocities as stored and oscillates by O(dt) while a wheel is
/// compressed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropTest {
    pub initial_energy: f64,
    /// Largest `|E(t) − E(0)| / E(0)` with synchronized velocities.
    pub max_drift: f64,
    /// Same with the stored, staggered velocities.
    pub max_staggered_drift: f64,
    pub bounced: bool,
}

/// Drops the rover from `height` above its resting pose with strut damping,
/// contact damping and friction removed, and tracks total energy.
pub fn drop_test(
    params: &RoverParameters,
    mode: SuspensionMode,
    height: f64,
    duration: f64,
    dt: f64,
) -> Result<DropTest> {
    let params = RoverParameters {
        damping: 0.0,
        contact_damping: 0.0,
        timestep: dt,
        ..params.clone()
    };
    let scene = TerrainScene::new(0.0, Vec::new())?;
    let mut state = static_equilibrium(&params, mode)?.state_at(0.0);
    state.position.z += height;
    let e0 = energy(&state, &params, &scene).total();
    let drift = |s: &RoverState| (energy(s, &params, &scene).total() - e0).abs() / e0.abs();
    let (mut max_drift, mut max_staggered_drift): (f64, f64) = (0.0, 0.0);
    let mut bounced = false;
    let steps = (duration / dt).round() as usize;
    for _ in 0..steps {
        let (next, report) = step_with_report(&state, &params, mode, &scene, DriveCommand::default())?;
        bounced |= report.contacts.iter().any(Option::is_some);
        max_drift = max_drift.max(drift(&synchronized(&state, &next)));
        state = next;
        max_staggered_drift = max_staggered_drift.max(drift(&state));
    }
    Ok(DropTest {
        initial_energy: e0,
        max_drift,
        max_staggered_drift,
        bounced,
    })
}

/// `before`'s positions with velocities averaged across the step to `after`.
fn synchronized(before: &RoverState, after: &RoverState) -> RoverState {
    let mut s = before.clone();
    s.linear_velocity = 0.5 * (before.linear_velocity + after.linear_velocity);
    s.angular_velocity = 0.5 * (before.angular_velocity + after.angular_velocity);
    s.rocker_rate = 0.5 * (before.rocker_rate + after.rocker_rate);
    for i in 0..4 {
        s.strut_rate[i] = 0.5 * (before.strut_rate[i] + after.strut_rate[i]);
    }
    s
}

/// Wheel loads of a rover settled on flat ground.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestingLoads {
    /// Ground normal force per wheel, N.
    pub normal: [f64; 4],
}

impl RestingLoads {
    pub fn total(&self) -> f64 {
        self.normal.iter().sum()
    }

    /// Largest relative deviation of any wheel from its configured share.
    pub fn share_error(&self, params: &RoverParameters) -> f64 {
        Wheel::ALL
            .iter()
            .map(|&w| {
                let expected = params.static_load(w) * params.gravity;
                (self.normal[w.index()] - expected).abs() / expected
            })
            .fold(0.0, f64::max)
    }
}

/// Lets the rover rest for `duration` from its static pose and averages the
/// wheel loads over the final second.
pub fn resting_loads(params: &RoverParameters, mode: SuspensionMode, duration: f64) -> Result<RestingLoads> {
    let scene = TerrainScene::flat();
    let mut state = static_equilibrium(params, mode)?.state_at(0.0);
    let dt = params.timestep;
    let steps = (duration / dt).round() as usize;
    let window = ((1.0 / dt).round() as usize).clamp(1, steps.max(1));
    let mut sum = [0.0; 4];
    for n in 0..steps {
        let (next, report) = step_with_report(&state, params, mode, &scene, DriveCommand::default())?;
        if n + window >= steps {
            for (acc, c) in sum.iter_mut().zip(&report.contacts) {
                *acc += c.map_or(0.0, |c| c.normal_force);
            }
        }
        state = next;
    }
    Ok(RestingLoads {
        normal: sum.map(|s| s / window as f64),
    })
}

/// The full suite.
pub fn run_checks(params: &RoverParameters) -> Result<Vec<CheckResult>> {
    let mut out = vec![CheckResult::below(
        "strut oracle max error / x0",
        strut_oracle_error(params),
        0.02,
    )];
    for mode in SuspensionMode::ALL {
        let drop = drop_test(params, mode, 0.05, 2.0, CHECK_TIMESTEP)?;
        out.push(CheckResult::below(
            format!("{mode} drop energy drift"),
            drop.max_drift,
            0.01,
        ));
    }
    for mode in SuspensionMode::ALL {
        let rest = resting_loads(params, mode, 3.0)?;
        let weight = params.total_mass * params.gravity;
        out.push(CheckResult::below(
            format!("{mode} resting load sum error"),
            (rest.total() - weight).abs() / weight,
            0.01,
        ));
        out.push(CheckResult::below(
            format!("{mode} resting wheel share error"),
            rest.share_error(params),
            0.05,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_rover_passes_every_check() {
        let results = run_checks(&RoverParameters::default()).unwrap();
        assert_eq!(results.len(), 1 + 3 + 6);
        for r in &results {
            assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn drop_actually_lands_and_synchronized_energy_is_tighter() {
        let d = drop_test(
            &RoverParameters::default(),
            SuspensionMode::DependentRigid,
            0.05,
            1.0,
            1e-3,
        )
        .unwrap();
        assert!(d.bounced);
        assert!(d.initial_energy > 0.0);
        assert!(d.max_drift < d.max_staggered_drift);
    }

    #[test]
    fn energy_error_converges_with_timestep() {
        let p = RoverParameters::default();
        let mode = SuspensionMode::MechanicallyHybrid;
        let coarse = drop_test(&p, mode, 0.05, 1.0, 1e-3).unwrap().max_drift;
        let fine = drop_test(&p, mode, 0.05, 1.0, 5e-4).unwrap().max_drift;
        assert!(fine < coarse / 2.0, "{coarse} -> {fine}");
    }

    #[test]
    fn display_marks_failures() {
        assert!(CheckResult::below("x", 2.0, 1.0).to_string().starts_with("FAIL x"));
        assert!(!CheckResult::below("x", f64::NAN, 1.0).passed);
        assert!(CheckResult::below("x", 0.5, 1.0).to_string().starts_with("PASS"));
    }
}
