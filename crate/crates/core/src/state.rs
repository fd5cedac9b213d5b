use nalgebra::{UnitQuaternion, Vector3};

use crate::params::Wheel;

/// Number of generalized velocities: chassis linear (3) and angular (3),
/// the differential rocker rate and four strut rates.
pub const NDOF: usize = 11;

pub(crate) const DOF_ROCKER: usize = 6;

pub(crate) const fn dof_strut(wheel: usize) -> usize {
    7 + wheel
}

/// Generalized coordinates and velocities of the rover.
///
/// The chassis pose refers to the sprung centre of mass. Angular velocity is
/// expressed in the world frame. The left rocker sits at `+rocker_angle`
/// relative to the chassis and the right rocker at `-rocker_angle`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoverState {
    pub position: Vector3<f64>,
    pub orientation: UnitQuaternion<f64>,
    pub linear_velocity: Vector3<f64>,
    pub angular_velocity: Vector3<f64>,
    pub rocker_angle: f64,
    pub rocker_rate: f64,
    pub strut_travel: [f64; 4],
    pub strut_rate: [f64; 4],
    pub wheel_spin: [f64; 4],
    pub time: f64,
}

impl RoverState {
    /// Level chassis at `position`, at rest, struts at `strut_travel`.
    pub fn at_rest(position: Vector3<f64>, strut_travel: [f64; 4]) -> Self {
        RoverState {
            position,
            orientation: UnitQuaternion::identity(),
            linear_velocity: Vector3::zeros(),
            angular_velocity: Vector3::zeros(),
            rocker_angle: 0.0,
            rocker_rate: 0.0,
            strut_travel,
            strut_rate: [0.0; 4],
            wheel_spin: [0.0; 4],
            time: 0.0,
        }
    }

    pub fn strut(&self, wheel: Wheel) -> f64 {
        self.strut_travel[wheel.index()]
    }

    /// Roll, pitch, yaw (intrinsic x-y-z convention of nalgebra).
    pub fn euler_angles(&self) -> (f64, f64, f64) {
        self.orientation.euler_angles()
    }

    /// Generalized velocity vector in the solver ordering.
    pub fn velocities(&self) -> [f64; NDOF] {
        let mut u = [0.0; NDOF];
        u[0..3].copy_from_slice(self.linear_velocity.as_slice());
        u[3..6].copy_from_slice(self.angular_velocity.as_slice());
        u[DOF_ROCKER] = self.rocker_rate;
        for i in 0..4 {
            u[dof_strut(i)] = self.strut_rate[i];
        }
        u
    }

    pub fn is_finite(&self) -> bool {
        self.position.iter().all(|v| v.is_finite())
            && self.orientation.coords.iter().all(|v| v.is_finite())
            && self.linear_velocity.iter().all(|v| v.is_finite())
            && self.angular_velocity.iter().all(|v| v.is_finite())
            && self.rocker_angle.is_finite()
            && self.rocker_rate.is_finite()
            && self.strut_travel.iter().all(|v| v.is_finite())
            && self.strut_rate.iter().all(|v| v.is_finite())
            && self.wheel_spin.iter().all(|v| v.is_finite())
    }
}
