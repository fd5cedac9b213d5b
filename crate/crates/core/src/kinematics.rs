//! Forward kinematics of the chassis → rocker → strut → wheel chain.
//!
//! Wheel hub i sits at
//! `p + R·(pivot_i + Ry(σ_i φ)·(arm_i − s_i·ẑ))`, with σ = +1 on the left and
//! −1 on the right. The struts stay fixed to their rocker, so the strut axis
//! is the rocker-frame vertical.

use nalgebra::{Matrix3, SMatrix, Vector3};

use crate::params::{RoverParameters, Wheel};
use crate::state::{dof_strut, RoverState, DOF_ROCKER, NDOF};

pub type WheelJacobian = SMatrix<f64, 3, NDOF>;

/// Kinematic quantities of one wheel hub, all in the world frame.
#[derive(Debug, Clone)]
pub struct WheelKinematics {
    pub wheel: Wheel,
    pub center: Vector3<f64>,
    pub velocity: Vector3<f64>,
    /// Rocker pivot of this wheel's side.
    pub pivot: Vector3<f64>,
    /// Unit strut axis pointing from wheel hub towards the rocker end.
    pub strut_axis: Vector3<f64>,
    /// Rocker rotation axis (chassis lateral axis).
    pub lateral_axis: Vector3<f64>,
    /// Angular velocity of the rocker/knuckle carrying the wheel.
    pub carrier_angular_velocity: Vector3<f64>,
    /// Maps generalized velocities to the hub velocity.
    pub jacobian: WheelJacobian,
    /// Hub acceleration at zero generalized acceleration (J̇·u).
    pub bias_acceleration: Vector3<f64>,
}

/// Wheel hub position and velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttachmentPoint {
    pub wheel: Wheel,
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
}

fn rot_y(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Full kinematics of the four wheels.
pub fn wheel_kinematics(state: &RoverState, params: &RoverParameters) -> [WheelKinematics; 4] {
    let rot = state.orientation.to_rotation_matrix().into_inner();
    let omega = state.angular_velocity;
    let phi_rate = state.rocker_rate;
    let y_body = Vector3::y();
    let lateral_axis = rot * y_body;

    Wheel::ALL.map(|wheel| {
        let i = wheel.index();
        let sigma = wheel.side();
        let s = state.strut_travel[i];
        let s_rate = state.strut_rate[i];

        let rocker = rot_y(sigma * state.rocker_angle);
        let pivot_body = params.pivot_body(wheel);
        let lever = rocker * (params.arm_vector(wheel) - s * Vector3::z());
        let axis_body = rocker * Vector3::z();
        let hub_body = pivot_body + lever;

        // body-frame rates of the hub relative to the chassis
        let lever_rate = sigma * phi_rate * y_body.cross(&lever) - s_rate * axis_body;
        let axis_rate = sigma * phi_rate * y_body.cross(&axis_body);

        let r = rot * hub_body;
        let rel_vel = rot * lever_rate;
        let velocity = state.linear_velocity + omega.cross(&r) + rel_vel;

        let lever_acc_bias = sigma * phi_rate * y_body.cross(&lever_rate) - s_rate * axis_rate;
        let bias_acceleration = omega.cross(&omega.cross(&r)) + 2.0 * omega.cross(&rel_vel) + rot * lever_acc_bias;

        let mut jacobian = WheelJacobian::zeros();
        jacobian.fixed_view_mut::<3, 3>(0, 0).copy_from(&Matrix3::identity());
        jacobian.fixed_view_mut::<3, 3>(0, 3).copy_from(&(-r.cross_matrix()));
        jacobian
            .fixed_view_mut::<3, 1>(0, DOF_ROCKER)
            .copy_from(&(rot * (sigma * y_body.cross(&lever))));
        let strut_axis = rot * axis_body;
        jacobian
            .fixed_view_mut::<3, 1>(0, dof_strut(i))
            .copy_from(&(-strut_axis));

        WheelKinematics {
            wheel,
            center: state.position + r,
            velocity,
            pivot: state.position + rot * pivot_body,
            strut_axis,
            lateral_axis,
            carrier_angular_velocity: omega + sigma * phi_rate * lateral_axis,
            jacobian,
            bias_acceleration,
        }
    })
}

/// World-frame positions and velocities of the four wheel-strut attachments.
pub fn attachment_points(state: &RoverState, params: &RoverParameters) -> [AttachmentPoint; 4] {
    wheel_kinematics(state, params).map(|k| AttachmentPoint {
        wheel: k.wheel,
        position: k.center,
        velocity: k.velocity,
    })
}
