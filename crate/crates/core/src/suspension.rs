//! The three suspension configurations and static analysis helpers.

use std::fmt;
use std::str::FromStr;

use nalgebra::{UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::params::{RoverParameters, Wheel};
use crate::state::RoverState;

/// Passive suspension configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "String")]
pub enum SuspensionMode {
    /// Free differential rockers, struts replaced by rigid links.
    #[serde(rename = "DR")]
    DependentRigid,
    /// Rockers locked horizontal, elastic strut per wheel.
    #[serde(rename = "IE")]
    IndependentElastic,
    /// Free differential rockers combined with elastic struts.
    #[default]
    #[serde(rename = "MHS")]
    MechanicallyHybrid,
}

impl SuspensionMode {
    pub const ALL: [SuspensionMode; 3] = [
        SuspensionMode::DependentRigid,
        SuspensionMode::IndependentElastic,
        SuspensionMode::MechanicallyHybrid,
    ];

    pub fn rocker_locked(self) -> bool {
        self == SuspensionMode::IndependentElastic
    }

    pub fn strut_locked(self) -> bool {
        self == SuspensionMode::DependentRigid
    }

    pub fn label(self) -> &'static str {
        match self {
            SuspensionMode::DependentRigid => "DR",
            SuspensionMode::IndependentElastic => "IE",
            SuspensionMode::MechanicallyHybrid => "MHS",
        }
    }
}

impl fmt::Display for SuspensionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SuspensionMode {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "DR" => Ok(SuspensionMode::DependentRigid),
            "IE" => Ok(SuspensionMode::IndependentElastic),
            "MHS" => Ok(SuspensionMode::MechanicallyHybrid),
            other => Err(SimError::validation(
                "suspension",
                format!("expected DR, IE or MHS, got {other:?}"),
            )),
        }
    }
}

impl TryFrom<String> for SuspensionMode {
    type Error = SimError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Resting configuration on flat ground.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticEquilibrium {
    pub strut_travel: [f64; 4],
    pub rocker_angle: f64,
    /// Height of the sprung centre of mass above the ground.
    pub chassis_height: f64,
    pub chassis_pitch: f64,
    pub penetration: [f64; 4],
    pub normal_force: [f64; 4],
}

impl StaticEquilibrium {
    /// Rover at rest in this configuration with its CoM at `x`.
    pub fn state_at(&self, x: f64) -> RoverState {
        let mut s = RoverState::at_rest(Vector3::new(x, 0.0, self.chassis_height), self.strut_travel);
        s.orientation = UnitQuaternion::from_euler_angles(0.0, self.chassis_pitch, 0.0);
        s.rocker_angle = self.rocker_angle;
        s
    }
}

/// Solves the static force balance on flat ground without integrating.
///
/// Each wheel carries its configured static load; the strut supports that
/// load minus the unsprung weight. Rigid struts (DR) are locked at the same
/// travel so every configuration shares the ride height.
pub fn static_equilibrium(params: &RoverParameters, _mode: SuspensionMode) -> Result<StaticEquilibrium> {
    let g = params.gravity;
    let s_max = params.strut_travel_max();
    let mut strut_travel = [0.0; 4];
    let mut penetration = [0.0; 4];
    let mut normal_force = [0.0; 4];
    for w in Wheel::ALL {
        let i = w.index();
        let load = params.static_load(w) * g;
        let strut_load = (params.static_load(w) - params.unsprung_mass) * g;
        let s = params.spring_free_length - strut_load / params.spring_rate;
        if !(0.0..=s_max).contains(&s) {
            return Err(SimError::NoEquilibrium(format!(
                "{} strut settles at {s:.4} m, outside [0, {s_max:.4}] m",
                w.label()
            )));
        }
        strut_travel[i] = s;
        normal_force[i] = load;
        penetration[i] = load / params.contact_stiffness;
    }

    // chassis pitch and height putting every hub at wheel_radius - penetration
    let hub = |w: Wheel| params.pivot_body(w) + params.arm_vector(w) - strut_travel[w.index()] * Vector3::z();
    let (front, rear) = (hub(Wheel::FrontLeft), hub(Wheel::RearLeft));
    let target = |w: Wheel| params.wheel_radius - penetration[w.index()];
    // -sinθ·bx + cosθ·bz + z = target for both front and rear
    let a = -(front.x - rear.x);
    let b = front.z - rear.z;
    let c = target(Wheel::FrontLeft) - target(Wheel::RearLeft);
    let r = a.hypot(b);
    let psi = b.atan2(a);
    let wrap = |t: f64| (t + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI;
    let base = (c / r).clamp(-1.0, 1.0).asin();
    let candidates = [wrap(base - psi), wrap(std::f64::consts::PI - base - psi)];
    let pitch = if candidates[0].abs() <= candidates[1].abs() {
        candidates[0]
    } else {
        candidates[1]
    };
    let (sp, cp) = pitch.sin_cos();
    let chassis_height = target(Wheel::FrontLeft) - (-sp * front.x + cp * front.z);

    Ok(StaticEquilibrium {
        strut_travel,
        rocker_angle: 0.0,
        chassis_height,
        chassis_pitch: pitch,
        penetration,
        normal_force,
    })
}

/// Chassis pitch produced by the differential: the mean absolute rotation of
/// the two rockers.
pub fn differential_pitch(left_abs: f64, right_abs: f64) -> f64 {
    0.5 * (left_abs + right_abs)
}

/// Rigid-body static tip-over angles (longitudinal, lateral), independent of
/// gravity.
pub fn static_tipover_angles(params: &RoverParameters) -> (f64, f64) {
    (
        (0.5 * params.wheelbase).atan2(params.com_height),
        (0.5 * params.wheel_track).atan2(params.com_height),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lock_flags() {
        use SuspensionMode::*;
        assert!(DependentRigid.strut_locked() && !DependentRigid.rocker_locked());
        assert!(IndependentElastic.rocker_locked() && !IndependentElastic.strut_locked());
        assert!(!MechanicallyHybrid.rocker_locked() && !MechanicallyHybrid.strut_locked());
    }

    #[test]
    fn mode_parses_and_prints() {
        for m in SuspensionMode::ALL {
            assert_eq!(m.to_string().parse::<SuspensionMode>().unwrap(), m);
        }
        assert!("XX".parse::<SuspensionMode>().is_err());
    }

    #[test]
    fn zero_gravity_leaves_springs_free() {
        let p = RoverParameters {
            gravity: 0.0,
            ..Default::default()
        };
        let eq = static_equilibrium(&p, SuspensionMode::MechanicallyHybrid).unwrap();
        assert_eq!(eq.strut_travel, [p.spring_free_length; 4]);
        assert_eq!(eq.rocker_angle, 0.0);
        assert!(eq.chassis_pitch.abs() < 1e-15);
        assert!((eq.chassis_height - p.com_height).abs() < 1e-12);
    }

    #[test]
    fn soft_spring_has_no_equilibrium() {
        let p = RoverParameters {
            spring_rate: 50.0,
            ..Default::default()
        };
        assert!(matches!(
            static_equilibrium(&p, SuspensionMode::MechanicallyHybrid),
            Err(SimError::NoEquilibrium(_))
        ));
    }

    #[test]
    fn all_modes_share_ride_height() {
        let p = RoverParameters::default();
        let eqs: Vec<_> = SuspensionMode::ALL
            .iter()
            .map(|m| static_equilibrium(&p, *m).unwrap())
            .collect();
        assert_eq!(eqs[0], eqs[1]);
        assert_eq!(eqs[1], eqs[2]);
    }

    #[test]
    fn differential_pitch_examples() {
        let d = |a: f64, b: f64| differential_pitch(a.to_radians(), b.to_radians()).to_degrees();
        assert!(d(10.0, -10.0).abs() < 1e-12);
        assert!((d(10.0, 10.0) - 10.0).abs() < 1e-12);
        assert!((d(5.0, 15.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn tipover_limit_for_vanishing_com() {
        let p = RoverParameters {
            com_height: 1e-12,
            ..RoverParameters::default()
        };
        let (lon, lat) = static_tipover_angles(&p);
        assert!((lon - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
        assert!((lat - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }
}
