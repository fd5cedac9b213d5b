//! Rover model parameters.
//!
//! Defaults reproduce the four-wheel rover used throughout the comparative
//! study (0.1 m wheels, 0.6 m wheelbase, 2 kN/m coil-overs, 19.6 kg) in a
//! lunar gravity field. Simulation-only constants (unsprung mass, end-stop
//! limits, contact penalty) are documented next to their fields.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Lunar surface gravity, m/s².
pub const LUNAR_GRAVITY: f64 = 1.625;

/// Acceleration unit used when reporting chassis accelerations, m/s².
pub const G_UNIT: f64 = 9.81;

/// End-stop stiffness as a multiple of the suspension spring rate.
pub const END_STOP_FACTOR: f64 = 50.0;

/// Wheel position on the chassis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Wheel {
    FrontLeft,
    FrontRight,
    RearLeft,
    RearRight,
}

impl Wheel {
    pub const ALL: [Wheel; 4] = [Wheel::FrontLeft, Wheel::FrontRight, Wheel::RearLeft, Wheel::RearRight];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Wheel {
        Wheel::ALL[i]
    }

    /// +1 for left wheels, -1 for right wheels.
    pub fn side(self) -> f64 {
        match self {
            Wheel::FrontLeft | Wheel::RearLeft => 1.0,
            Wheel::FrontRight | Wheel::RearRight => -1.0,
        }
    }

    /// +1 for front wheels, -1 for rear wheels.
    pub fn fore_aft(self) -> f64 {
        match self {
            Wheel::FrontLeft | Wheel::FrontRight => 1.0,
            Wheel::RearLeft | Wheel::RearRight => -1.0,
        }
    }

    pub fn is_front(self) -> bool {
        self.fore_aft() > 0.0
    }

    pub fn is_left(self) -> bool {
        self.side() > 0.0
    }

    pub fn label(self) -> &'static str {
        match self {
            Wheel::FrontLeft => "FL",
            Wheel::FrontRight => "FR",
            Wheel::RearLeft => "RL",
            Wheel::RearRight => "RR",
        }
    }
}

/// Full parameter set of the rover model.
///
/// Field names double as configuration keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RoverParameters {
    pub wheel_radius: f64,
    pub wheelbase: f64,
    /// Rocker lever from pivot to wheel attachment.
    pub arm_length: f64,
    pub wheel_track: f64,
    pub com_height: f64,
    /// Coil-over spring rate, N/m.
    pub spring_rate: f64,
    /// Coil-over damping coefficient, N·s/m.
    pub damping: f64,
    pub spring_free_length: f64,
    pub total_mass: f64,
    /// Static ground load carried by each front wheel, kg.
    pub front_static_load: f64,
    /// Static ground load carried by each rear wheel, kg.
    pub rear_static_load: f64,
    /// Lumped wheel + knuckle mass below each strut, kg.
    pub unsprung_mass: f64,
    /// Rocker travel limit, rad.
    pub rocker_limit: f64,
    pub gravity: f64,
    /// Contact penalty stiffness per wheel, N/m.
    pub contact_stiffness: f64,
    /// Contact penalty damping per wheel, N·s/m.
    pub contact_damping: f64,
    /// Slip speed scale of the tanh-regularized Coulomb law, m/s.
    pub friction_regularization: f64,
    pub timestep: f64,
}

impl Default for RoverParameters {
    fn default() -> Self {
        RoverParameters {
            wheel_radius: 0.1,
            wheelbase: 0.6,
            arm_length: 0.3,
            wheel_track: 0.47,
            com_height: 0.25,
            spring_rate: 2000.0,
            damping: 350.0,
            spring_free_length: 0.035,
            total_mass: 19.6,
            front_static_load: 4.8,
            rear_static_load: 5.0,
            unsprung_mass: 1.5,
            rocker_limit: 45f64.to_radians(),
            gravity: LUNAR_GRAVITY,
            contact_stiffness: 100_000.0,
            contact_damping: 1_000.0,
            friction_regularization: 0.01,
            timestep: 0.0005,
        }
    }
}

impl RoverParameters {
    /// Checks every invariant; the error names the offending key.
    pub fn validate(&self) -> Result<()> {
        let strictly_positive = [
            ("wheel_radius", self.wheel_radius),
            ("wheelbase", self.wheelbase),
            ("arm_length", self.arm_length),
            ("wheel_track", self.wheel_track),
            ("com_height", self.com_height),
            ("spring_rate", self.spring_rate),
            ("spring_free_length", self.spring_free_length),
            ("total_mass", self.total_mass),
            ("front_static_load", self.front_static_load),
            ("rear_static_load", self.rear_static_load),
            ("unsprung_mass", self.unsprung_mass),
            ("rocker_limit", self.rocker_limit),
            ("contact_stiffness", self.contact_stiffness),
            ("friction_regularization", self.friction_regularization),
            ("timestep", self.timestep),
        ];
        for (key, value) in strictly_positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(SimError::validation(
                    key,
                    format!("must be finite and > 0, got {value}"),
                ));
            }
        }
        for (key, value) in [
            ("damping", self.damping),
            ("contact_damping", self.contact_damping),
            ("gravity", self.gravity),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(SimError::validation(
                    key,
                    format!("must be finite and >= 0, got {value}"),
                ));
            }
        }
        if 4.0 * self.unsprung_mass >= self.total_mass {
            return Err(SimError::validation(
                "unsprung_mass",
                "four unsprung masses must weigh less than total_mass",
            ));
        }
        let split = 2.0 * (self.front_static_load + self.rear_static_load);
        if (split - self.total_mass).abs() > 1e-6 * self.total_mass.max(1.0) {
            return Err(SimError::validation(
                "front_static_load",
                format!(
                    "2·(front + rear) = {split} kg does not match total_mass = {} kg",
                    self.total_mass
                ),
            ));
        }
        if self.front_static_load <= self.unsprung_mass || self.rear_static_load <= self.unsprung_mass {
            return Err(SimError::validation(
                "unsprung_mass",
                "each static wheel load must exceed the unsprung mass",
            ));
        }
        if (2.0 * self.arm_length - self.wheelbase).abs() > 1e-9 {
            return Err(SimError::validation(
                "arm_length",
                "rocker pivot sits at mid-wheelbase: arm_length must equal wheelbase / 2",
            ));
        }
        if self.com_height <= self.wheel_radius {
            return Err(SimError::validation(
                "com_height",
                "centre of mass must sit above the wheel axles",
            ));
        }
        if self.rocker_limit >= std::f64::consts::FRAC_PI_2 {
            return Err(SimError::validation("rocker_limit", "must be below 90°"));
        }
        Ok(())
    }

    pub fn sprung_mass(&self) -> f64 {
        self.total_mass - 4.0 * self.unsprung_mass
    }

    /// Upper strut travel limit, symmetric about the free length.
    pub fn strut_travel_max(&self) -> f64 {
        2.0 * self.spring_free_length
    }

    /// Static ground load of one wheel, kg.
    pub fn static_load(&self, wheel: Wheel) -> f64 {
        if wheel.is_front() {
            self.front_static_load
        } else {
            self.rear_static_load
        }
    }

    /// Longitudinal offset of the sprung centre of mass from the rocker pivots.
    ///
    /// Chosen so that the sprung mass, resting on the four struts, produces
    /// the configured front/rear static wheel loads.
    pub fn com_offset_x(&self) -> f64 {
        let front = self.front_static_load - self.unsprung_mass;
        let rear = self.rear_static_load - self.unsprung_mass;
        self.arm_length * (front - rear) / (front + rear)
    }

    /// Rocker pivot of one side in the chassis frame (origin at the sprung CoM).
    ///
    /// At free strut length the wheel centres sit `com_height - wheel_radius`
    /// below the CoM.
    pub fn pivot_body(&self, wheel: Wheel) -> Vector3<f64> {
        Vector3::new(
            -self.com_offset_x(),
            wheel.side() * 0.5 * self.wheel_track,
            -(self.com_height - self.wheel_radius) + self.spring_free_length,
        )
    }

    /// Rocker lever from pivot to strut top, in the rocker frame.
    pub fn arm_vector(&self, wheel: Wheel) -> Vector3<f64> {
        Vector3::new(wheel.fore_aft() * self.arm_length, 0.0, 0.0)
    }

    /// Solid-cuboid inertia of the sprung mass about its CoM.
    pub fn chassis_inertia(&self) -> Matrix3<f64> {
        let m = self.sprung_mass();
        let (l, w, h) = (self.wheelbase, self.wheel_track, 2.0 * self.com_height);
        Matrix3::from_diagonal(&Vector3::new(
            m / 12.0 * (w * w + h * h),
            m / 12.0 * (l * l + h * h),
            m / 12.0 * (l * l + w * w),
        ))
    }

    /// Torsional stiffness of the rocker end-stops, N·m/rad.
    pub fn rocker_stop_stiffness(&self) -> f64 {
        END_STOP_FACTOR * self.spring_rate * self.arm_length * self.arm_length
    }

    pub fn gravity_vector(&self) -> Vector3<f64> {
        Vector3::new(0.0, 0.0, -self.gravity)
    }
}
