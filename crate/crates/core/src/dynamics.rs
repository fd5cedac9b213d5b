//! Reduced-coordinate equations of motion and the fixed-step integrator.
//!
//! Generalized velocities are the chassis linear and angular velocity (world
//! frame), the differential rocker rate and the four strut rates. Rockers and
//! knuckles are massless; each wheel is a point mass at its hub. The mass
//! matrix is assembled as `M = diag(m_s·I, I_world) + Σ m_w·Jᵢᵀ·Jᵢ` and the
//! velocity-product terms as `Σ m_w·Jᵢᵀ·(J̇ᵢ·u) + ω × I·ω`. Locked degrees of
//! freedom are removed by replacing their rows and columns with the identity.

use std::ops::AddAssign;

use nalgebra::{Cholesky, Matrix3, SMatrix, SVector, UnitQuaternion, Vector3};

use crate::contact::{resolve_contact, ContactPoint};
use crate::error::{Result, SimError};
use crate::kinematics::{wheel_kinematics, WheelJacobian, WheelKinematics};
use crate::params::{RoverParameters, Wheel, END_STOP_FACTOR};
use crate::state::{dof_strut, RoverState, DOF_ROCKER, NDOF};
use crate::suspension::SuspensionMode;
use crate::terrain::TerrainScene;

type MassMatrix = SMatrix<f64, NDOF, NDOF>;
type GenVector = SVector<f64, NDOF>;

/// Open-loop drive command: every wheel spins at `speed / wheel_radius`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DriveCommand {
    pub speed: f64,
}

impl DriveCommand {
    pub fn new(speed: f64) -> Self {
        DriveCommand { speed }
    }

    pub fn wheel_rate(&self, params: &RoverParameters) -> f64 {
        self.speed / params.wheel_radius
    }
}

/// Coil-over force along the strut, positive when pushing the wheel away
/// from the chassis. Outside `[0, s_max]` a one-sided end-stop is added.
pub fn suspension_force(travel: f64, rate: f64, params: &RoverParameters) -> f64 {
    spring_force(travel, params) - params.damping * rate
}

/// Elastic part of [`suspension_force`], end-stops included.
fn spring_force(travel: f64, params: &RoverParameters) -> f64 {
    let mut force = params.spring_rate * (params.spring_free_length - travel);
    let stop = END_STOP_FACTOR * params.spring_rate;
    if travel < 0.0 {
        force += stop * -travel;
    } else if travel > params.strut_travel_max() {
        force -= stop * (travel - params.strut_travel_max());
    }
    force
}

fn rocker_stop_torque(angle: f64, params: &RoverParameters) -> f64 {
    let excess = angle.abs() - params.rocker_limit;
    if excess > 0.0 {
        -angle.signum() * params.rocker_stop_stiffness() * excess
    } else {
        0.0
    }
}

/// Forces and loads evaluated during one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub contacts: [Option<ContactPoint>; 4],
    /// Force along each strut, positive pushing the wheel away (the
    /// constraint force when struts are locked).
    pub strut_force: [f64; 4],
    /// Vertical load carried at each rocker end: ground reaction minus the
    /// inertial force of the unsprung mass.
    pub vertical_load: [f64; 4],
    /// Pitch torque at the left and right rocker pivots, N·m.
    pub pivot_torque: [f64; 2],
    /// Chassis CoM acceleration, m/s².
    pub chassis_acceleration: Vector3<f64>,
}

fn chassis_block(state: &RoverState, params: &RoverParameters) -> (MassMatrix, GenVector) {
    let rot = state.orientation.to_rotation_matrix().into_inner();
    let inertia = rot * params.chassis_inertia() * rot.transpose();
    let mut mass = MassMatrix::zeros();
    let m = params.sprung_mass();
    for k in 0..3 {
        mass[(k, k)] = m;
    }
    mass.fixed_view_mut::<3, 3>(3, 3).copy_from(&inertia);
    let omega = state.angular_velocity;
    let mut bias = GenVector::zeros();
    bias.fixed_rows_mut::<3>(3).copy_from(&omega.cross(&(inertia * omega)));
    (mass, bias)
}

/// Generalized mass matrix (all eleven DOFs, no locking applied).
pub fn mass_matrix(state: &RoverState, params: &RoverParameters) -> SMatrix<f64, NDOF, NDOF> {
    let kin = wheel_kinematics(state, params);
    let (mut mass, _) = chassis_block(state, params);
    for k in &kin {
        mass += params.unsprung_mass * k.jacobian.transpose() * k.jacobian;
    }
    mass
}

fn locked_dofs(mode: SuspensionMode) -> impl Iterator<Item = usize> {
    let rocker = mode.rocker_locked().then_some(DOF_ROCKER);
    let struts = (0..4).filter(move |_| mode.strut_locked()).map(dof_strut);
    rocker.into_iter().chain(struts)
}

fn wheel_angular_velocity(k: &WheelKinematics, spin_rate: f64) -> Vector3<f64> {
    k.carrier_angular_velocity + k.lateral_axis * spin_rate
}

/// Weight of the end-of-step velocity in contact normal damping (trapezoidal).
const NORMAL_DAMPING_WEIGHT: f64 = 0.5;

/// Per-contact treatment inside one step's velocity solve.
#[derive(Debug, Clone, Copy)]
enum ContactLaw {
    /// Penalty damping and friction evaluated at the end-of-step velocity;
    /// `drag` is the secant friction coefficient, N·s/m.
    Implicit { drag: f64 },
    /// Constant force for this step.
    Fixed { normal: f64, friction: Vector3<f64> },
}

/// Geometry of an active contact and the map from generalized velocities to
/// the slip of the wheel's surface point.
struct ContactSlot {
    probe: ContactPoint,
    /// Surface-point velocity = `slip_map · u + slip_offset`.
    slip_map: WheelJacobian,
    slip_offset: Vector3<f64>,
    law: ContactLaw,
}

impl ContactSlot {
    fn new(k: &WheelKinematics, probe: ContactPoint, spin_rate: f64, params: &RoverParameters) -> Self {
        let lever = probe.position - k.center;
        // carrier angular velocity = ω + σ·φ̇·lateral
        let mut carrier = WheelJacobian::zeros();
        carrier.fixed_view_mut::<3, 3>(0, 3).copy_from(&Matrix3::identity());
        carrier.set_column(DOF_ROCKER, &(k.wheel.side() * k.lateral_axis));
        let slip_map = k.jacobian - lever.cross_matrix() * carrier;
        let slip_offset = (k.lateral_axis * spin_rate).cross(&lever);
        let law = if probe.normal_force > 0.0 {
            let speed = probe.slip_velocity.norm();
            let limit = probe.friction_coefficient * probe.normal_force;
            let drag = if speed > 1e-9 * params.friction_regularization {
                limit * (speed / params.friction_regularization).tanh() / speed
            } else {
                limit / params.friction_regularization
            };
            ContactLaw::Implicit { drag }
        } else {
            ContactLaw::Fixed {
                normal: 0.0,
                friction: Vector3::zeros(),
            }
        };
        ContactSlot {
            probe,
            slip_map,
            slip_offset,
            law,
        }
    }

    fn tangent_projector(&self) -> Matrix3<f64> {
        Matrix3::identity() - self.probe.normal * self.probe.normal.transpose()
    }

    /// Adds this contact to `(M + dt·D)·a = rhs` at current velocities `u`.
    fn assemble(
        &self,
        k: &WheelKinematics,
        u: &GenVector,
        dt: f64,
        params: &RoverParameters,
        mass: &mut MassMatrix,
        rhs: &mut GenVector,
    ) {
        let n = self.probe.normal;
        match self.law {
            ContactLaw::Implicit { drag } => {
                let jn = k.jacobian.transpose() * n;
                let c = params.contact_damping;
                let closing = n.dot(&(k.jacobian * u));
                *rhs += jn * (params.contact_stiffness * self.probe.penetration - c * closing);
                *mass += jn * jn.transpose() * (NORMAL_DAMPING_WEIGHT * dt * c);

                let p = self.tangent_projector();
                let gt = self.slip_map.transpose() * p;
                *rhs -= gt * (self.slip_map * u + self.slip_offset) * drag;
                *mass += gt * self.slip_map * (dt * drag);
            }
            ContactLaw::Fixed { normal, friction } => {
                *rhs += self.slip_map.transpose() * (n * normal + friction);
            }
        }
    }

    /// Freezes an implicit contact whose end-of-step force would pull or
    /// leave the friction cone; returns whether it did.
    fn admit(&mut self, k: &WheelKinematics, u: &GenVector, u_next: &GenVector, params: &RoverParameters) -> bool {
        let ContactLaw::Implicit { drag } = self.law else {
            return false;
        };
        let rate = -self
            .probe
            .normal
            .dot(&(k.jacobian * u_next.lerp(u, 1.0 - NORMAL_DAMPING_WEIGHT)));
        let normal = params.contact_stiffness * self.probe.penetration + params.contact_damping * rate;
        let slip = self.tangent_projector() * (self.slip_map * u_next + self.slip_offset);
        let friction = -slip * drag;
        let limit = self.probe.friction_coefficient * normal;
        if normal < 0.0 {
            self.law = ContactLaw::Fixed {
                normal: 0.0,
                friction: Vector3::zeros(),
            };
        } else if friction.norm() > limit {
            self.law = ContactLaw::Fixed {
                normal,
                friction: friction * (limit / friction.norm()),
            };
        } else {
            return false;
        }
        true
    }
}

/// Advances the rover by one timestep; also returns the loads acting at the
/// start of the step.
///
/// Semi-implicit Euler: generalized velocities are updated from the forces at
/// the current configuration, positions from the updated velocities. Strut
/// dampers, contact damping and friction are evaluated at the end-of-step
/// velocity. A contact whose implicit force would pull, or leave the friction
/// cone, is frozen to a constant admissible force and the solve repeated.
///
/// The report holds instantaneous values at `state`: contact forces from the
/// contact law and accelerations from `M·a = F(state)`.
pub fn step_with_report(
    state: &RoverState,
    params: &RoverParameters,
    mode: SuspensionMode,
    scene: &TerrainScene,
    command: DriveCommand,
) -> Result<(RoverState, StepReport)> {
    let dt = params.timestep;
    let spin_rate = command.wheel_rate(params);
    let kin = wheel_kinematics(state, params);
    let gravity = params.gravity_vector();
    let m_w = params.unsprung_mass;
    let u = GenVector::from(state.velocities());

    let (mut mass, bias) = chassis_block(state, params);
    let mut rhs = -bias;
    rhs.fixed_rows_mut::<3>(0).add_assign(&(gravity * params.sprung_mass()));
    let mut slots: [Option<ContactSlot>; 4] = [None, None, None, None];
    for k in &kin {
        let i = k.wheel.index();
        let jt = k.jacobian.transpose();
        mass += m_w * jt * k.jacobian;
        rhs += jt * (gravity * m_w - k.bias_acceleration * m_w);
        if !mode.strut_locked() {
            rhs[dof_strut(i)] += suspension_force(state.strut_travel[i], state.strut_rate[i], params);
        }
        slots[i] = resolve_contact(
            k.wheel,
            &k.center,
            &k.velocity,
            &wheel_angular_velocity(k, spin_rate),
            scene,
            params,
        )
        .map(|probe| ContactSlot::new(k, probe, spin_rate, params));
    }
    if !mode.rocker_locked() {
        rhs[DOF_ROCKER] += rocker_stop_torque(state.rocker_angle, params);
    }

    // instantaneous accelerations for the report
    let mut explicit_rhs = rhs;
    for slot in slots.iter().flatten() {
        explicit_rhs += slot.slip_map.transpose() * slot.probe.force();
    }
    let instantaneous = solve_locked(mass, explicit_rhs, mode, state.time)?;

    // strut dampers act on the end-of-step rate
    if !mode.strut_locked() {
        for i in 0..4 {
            mass[(dof_strut(i), dof_strut(i))] += dt * params.damping;
        }
    }
    let accel = loop {
        let mut m = mass;
        let mut r = rhs;
        for (k, slot) in kin.iter().zip(&slots) {
            if let Some(slot) = slot {
                slot.assemble(k, &u, dt, params, &mut m, &mut r);
            }
        }
        let accel = solve_locked(m, r, mode, state.time)?;
        let u_next = u + accel * dt;
        let mut frozen = false;
        for (k, slot) in kin.iter().zip(slots.iter_mut()) {
            if let Some(slot) = slot {
                frozen |= slot.admit(k, &u, &u_next, params);
            }
        }
        if !frozen {
            break accel;
        }
    };

    let u_next = u + accel * dt;
    let mut next = state.clone();
    next.linear_velocity = u_next.fixed_rows::<3>(0).into_owned();
    next.angular_velocity = u_next.fixed_rows::<3>(3).into_owned();
    next.position += next.linear_velocity * dt;
    let rotated = UnitQuaternion::from_scaled_axis(next.angular_velocity * dt) * state.orientation;
    next.orientation = UnitQuaternion::new_normalize(rotated.into_inner());
    if !mode.rocker_locked() {
        next.rocker_rate = u_next[DOF_ROCKER];
        next.rocker_angle += next.rocker_rate * dt;
    }
    if !mode.strut_locked() {
        for i in 0..4 {
            next.strut_rate[i] = u_next[dof_strut(i)];
            next.strut_travel[i] += next.strut_rate[i] * dt;
        }
    }
    for spin in next.wheel_spin.iter_mut() {
        *spin += spin_rate * dt;
    }
    next.time = state.time + dt;

    if !next.is_finite() || !accel.iter().all(|a| a.is_finite()) {
        return Err(SimError::NonFiniteState {
            time: next.time,
            what: "coordinate diverged".into(),
        });
    }

    let contacts = slots.map(|s| s.map(|s| s.probe).filter(|c| c.normal_force > 0.0));
    Ok((next, loads_report(&kin, contacts, &instantaneous, params)))
}

fn solve_locked(mut mass: MassMatrix, mut rhs: GenVector, mode: SuspensionMode, time: f64) -> Result<GenVector> {
    for d in locked_dofs(mode) {
        mass.row_mut(d).fill(0.0);
        mass.column_mut(d).fill(0.0);
        mass[(d, d)] = 1.0;
        rhs[d] = 0.0;
    }
    Cholesky::new(mass)
        .map(|c| c.solve(&rhs))
        .ok_or_else(|| SimError::NonFiniteState {
            time,
            what: "mass matrix not positive definite".into(),
        })
}

/// Loads transmitted into the rockers for given contacts and accelerations.
fn loads_report(
    kin: &[WheelKinematics; 4],
    contacts: [Option<ContactPoint>; 4],
    accel: &GenVector,
    params: &RoverParameters,
) -> StepReport {
    let gravity = params.gravity_vector();
    let m_w = params.unsprung_mass;
    let mut strut_force = [0.0; 4];
    let mut vertical_load = [0.0; 4];
    let mut pivot_torque = [0.0; 2];
    for k in kin {
        let i = k.wheel.index();
        let wheel_acc = k.jacobian * accel + k.bias_acceleration;
        let (ground, drive) = match &contacts[i] {
            Some(c) => (c.force(), (c.position - k.center).cross(&c.force())),
            None => (Vector3::zeros(), Vector3::zeros()),
        };
        let transmitted = ground + gravity * m_w - wheel_acc * m_w;
        strut_force[i] = transmitted.dot(&k.strut_axis);
        vertical_load[i] = ground.z - m_w * wheel_acc.z;
        let side = if k.wheel.is_left() { 0 } else { 1 };
        // the spin drive holds the wheel, so the contact torque about the hub
        // reacts on the rocker as well
        let moment = (k.center - k.pivot).cross(&transmitted) + drive;
        pivot_torque[side] += moment.dot(&k.lateral_axis);
    }
    StepReport {
        contacts,
        strut_force,
        vertical_load,
        pivot_torque,
        chassis_acceleration: accel.fixed_rows::<3>(0).into_owned(),
    }
}

/// Advances the rover by one timestep.
pub fn step(
    state: &RoverState,
    params: &RoverParameters,
    mode: SuspensionMode,
    scene: &TerrainScene,
    command: DriveCommand,
) -> Result<RoverState> {
    step_with_report(state, params, mode, scene, command).map(|(s, _)| s)
}

/// Mechanical energy split, J.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energy {
    pub kinetic: f64,
    pub gravitational: f64,
    pub suspension: f64,
    pub contact: f64,
}

impl Energy {
    pub fn total(&self) -> f64 {
        self.kinetic + self.gravitational + self.suspension + self.contact
    }
}

/// Energy of the rover, with the gravitational datum at z = 0.
///
/// The suspension term covers strut springs and both kinds of end-stop;
/// the contact term is the penalty-spring energy.
pub fn energy(state: &RoverState, params: &RoverParameters, scene: &TerrainScene) -> Energy {
    let u = GenVector::from(state.velocities());
    let kinetic = 0.5 * (u.transpose() * mass_matrix(state, params) * u)[(0, 0)];
    let kin = wheel_kinematics(state, params);
    let g = params.gravity;
    let mut gravitational = params.sprung_mass() * g * state.position.z;
    let mut suspension = 0.0;
    let mut contact = 0.0;
    let stop = END_STOP_FACTOR * params.spring_rate;
    for k in &kin {
        gravitational += params.unsprung_mass * g * k.center.z;
        let s = state.strut_travel[k.wheel.index()];
        let stretch = s - params.spring_free_length;
        suspension += 0.5 * params.spring_rate * stretch * stretch;
        let over = if s < 0.0 {
            -s
        } else {
            (s - params.strut_travel_max()).max(0.0)
        };
        suspension += 0.5 * stop * over * over;
        let depth = scene.closest_surface(&k.center, params.wheel_radius).depth;
        if depth > 0.0 {
            contact += 0.5 * params.contact_stiffness * depth * depth;
        }
    }
    let rocker_excess = (state.rocker_angle.abs() - params.rocker_limit).max(0.0);
    suspension += 0.5 * params.rocker_stop_stiffness() * rocker_excess * rocker_excess;
    Energy {
        kinetic,
        gravitational,
        suspension,
        contact,
    }
}

/// A single rover simulation: parameters, configuration, terrain and state.
///
/// Owns everything it touches, so independent simulations can run on
/// separate threads.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub params: RoverParameters,
    pub mode: SuspensionMode,
    pub scene: TerrainScene,
    pub state: RoverState,
}

impl Simulation {
    pub fn new(params: RoverParameters, mode: SuspensionMode, scene: TerrainScene, state: RoverState) -> Result<Self> {
        params.validate()?;
        Ok(Simulation {
            params,
            mode,
            scene,
            state,
        })
    }

    pub fn step(&mut self, command: DriveCommand) -> Result<StepReport> {
        let (next, report) = step_with_report(&self.state, &self.params, self.mode, &self.scene, command)?;
        self.state = next;
        Ok(report)
    }

    pub fn energy(&self) -> Energy {
        energy(&self.state, &self.params, &self.scene)
    }
}

/// Positions of the four wheel hubs.
pub fn wheel_centers(state: &RoverState, params: &RoverParameters) -> [Vector3<f64>; 4] {
    wheel_kinematics(state, params).map(|k| k.center)
}

/// Wheel hub of one wheel.
pub fn wheel_center(state: &RoverState, params: &RoverParameters, wheel: Wheel) -> Vector3<f64> {
    wheel_centers(state, params)[wheel.index()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suspension_force_examples() {
        let p = RoverParameters::default();
        let s0 = p.spring_free_length;
        assert_eq!(suspension_force(s0, 0.0, &p), 0.0);
        assert!((suspension_force(s0 - 0.01, 0.0, &p) - 20.0).abs() < 1e-9);
        assert!((suspension_force(s0, 0.1, &p) + 35.0).abs() < 1e-9);
    }

    #[test]
    fn end_stops_are_one_sided() {
        let p = RoverParameters::default();
        let k = p.spring_rate;
        let linear = |s: f64| k * (p.spring_free_length - s);
        assert!((suspension_force(-0.001, 0.0, &p) - (linear(-0.001) + 50.0 * k * 0.001)).abs() < 1e-9);
        let over = p.strut_travel_max() + 0.002;
        assert!((suspension_force(over, 0.0, &p) - (linear(over) - 50.0 * k * 0.002)).abs() < 1e-9);
        assert_eq!(suspension_force(0.01, 0.0, &p), linear(0.01));
    }

    #[test]
    fn rocker_stop_only_beyond_limit() {
        let p = RoverParameters::default();
        assert_eq!(rocker_stop_torque(0.5, &p), 0.0);
        assert!(rocker_stop_torque(p.rocker_limit + 0.01, &p) < 0.0);
        assert!(rocker_stop_torque(-p.rocker_limit - 0.01, &p) > 0.0);
    }

    #[test]
    fn mass_matrix_is_symmetric_positive_definite() {
        let p = RoverParameters::default();
        let mut s = RoverState::at_rest(Vector3::new(0.0, 0.0, 0.25), [0.03; 4]);
        s.orientation = UnitQuaternion::from_euler_angles(0.1, -0.2, 0.4);
        s.rocker_angle = 0.3;
        let m = mass_matrix(&s, &p);
        assert!((m - m.transpose()).norm() < 1e-12);
        assert!(Cholesky::new(m).is_some());
        // total translational mass
        assert!((m[(0, 0)] - p.total_mass).abs() < 1e-12);
    }
}
