//! Penalty wheel–terrain contact with regularized Coulomb friction.

use nalgebra::Vector3;

use crate::params::{RoverParameters, Wheel};
use crate::terrain::TerrainScene;

/// One wheel–terrain contact, resolved for a single step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactPoint {
    pub wheel: Wheel,
    pub position: Vector3<f64>,
    /// Unit normal pointing out of the terrain.
    pub normal: Vector3<f64>,
    pub penetration: f64,
    pub penetration_rate: f64,
    pub normal_force: f64,
    pub friction_force: Vector3<f64>,
    pub friction_coefficient: f64,
    /// Tangential slip velocity of the wheel surface at the contact.
    pub slip_velocity: Vector3<f64>,
}

impl ContactPoint {
    /// Total force exerted by the terrain on the wheel.
    pub fn force(&self) -> Vector3<f64> {
        self.normal * self.normal_force + self.friction_force
    }
}

/// Resolves the contact of a spherical wheel.
///
/// `wheel_angular_velocity` is the total angular velocity of the wheel body
/// (carrier rotation plus commanded spin); together with the hub velocity it
/// gives the velocity of the wheel surface at the contact point.
pub fn resolve_contact(
    wheel: Wheel,
    wheel_center: &Vector3<f64>,
    wheel_center_velocity: &Vector3<f64>,
    wheel_angular_velocity: &Vector3<f64>,
    scene: &TerrainScene,
    params: &RoverParameters,
) -> Option<ContactPoint> {
    let hit = scene.closest_surface(wheel_center, params.wheel_radius);
    // NaN depth counts as no contact
    if hit.depth.is_nan() || hit.depth <= 0.0 {
        return None;
    }
    let n = hit.normal;
    let contact = wheel_center - n * params.wheel_radius;
    let surface_velocity = wheel_center_velocity + wheel_angular_velocity.cross(&(contact - wheel_center));
    let penetration_rate = -wheel_center_velocity.dot(&n);
    let normal_force = (params.contact_stiffness * hit.depth + params.contact_damping * penetration_rate).max(0.0);
    let slip = surface_velocity - n * surface_velocity.dot(&n);
    let slip_speed = slip.norm();
    let friction_force = if slip_speed > 0.0 && normal_force > 0.0 {
        let magnitude = hit.friction * normal_force * (slip_speed / params.friction_regularization).tanh();
        -slip * (magnitude / slip_speed)
    } else {
        Vector3::zeros()
    };
    Some(ContactPoint {
        wheel,
        position: contact,
        normal: n,
        penetration: hit.depth,
        penetration_rate,
        normal_force,
        friction_force,
        friction_coefficient: hit.friction,
        slip_velocity: slip,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat() -> TerrainScene {
        TerrainScene::flat()
    }

    #[test]
    fn touching_is_not_contact() {
        let p = RoverParameters::default();
        let c = resolve_contact(
            Wheel::FrontLeft,
            &Vector3::new(0.0, 0.0, p.wheel_radius),
            &Vector3::zeros(),
            &Vector3::zeros(),
            &flat(),
            &p,
        );
        assert!(c.is_none());
    }

    #[test]
    fn penalty_force_one_millimetre() {
        let p = RoverParameters::default();
        let c = resolve_contact(
            Wheel::FrontLeft,
            &Vector3::new(0.0, 0.0, p.wheel_radius - 0.001),
            &Vector3::zeros(),
            &Vector3::zeros(),
            &flat(),
            &p,
        )
        .unwrap();
        assert!((c.normal_force - 100.0).abs() < 1e-9);
        assert_eq!(c.friction_force, Vector3::zeros());
    }

    #[test]
    fn friction_saturates_at_coulomb_limit() {
        let p = RoverParameters::default();
        // 0.1 mm penetration -> 10 N normal load, sliding at 1 m/s
        let c = resolve_contact(
            Wheel::RearRight,
            &Vector3::new(0.0, 0.0, p.wheel_radius - 1e-4),
            &Vector3::new(1.0, 0.0, 0.0),
            &Vector3::zeros(),
            &flat(),
            &p,
        )
        .unwrap();
        assert!((c.normal_force - 10.0).abs() < 1e-9);
        assert!((c.friction_force.norm() - 4.0).abs() < 1e-9);
        assert!(c.friction_force.x < 0.0);
    }

    #[test]
    fn rolling_wheel_has_no_slip() {
        let p = RoverParameters::default();
        let v = 0.5;
        let c = resolve_contact(
            Wheel::FrontRight,
            &Vector3::new(0.0, 0.0, p.wheel_radius - 1e-4),
            &Vector3::new(v, 0.0, 0.0),
            &Vector3::new(0.0, v / p.wheel_radius, 0.0),
            &flat(),
            &p,
        )
        .unwrap();
        assert!(c.slip_velocity.norm() < 1e-12);
        assert!(c.friction_force.norm() < 1e-9);
    }

    #[test]
    fn separating_contact_never_pulls() {
        let p = RoverParameters::default();
        let c = resolve_contact(
            Wheel::FrontLeft,
            &Vector3::new(0.0, 0.0, p.wheel_radius - 1e-4),
            &Vector3::new(0.0, 0.0, 5.0),
            &Vector3::zeros(),
            &flat(),
            &p,
        )
        .unwrap();
        assert_eq!(c.normal_force, 0.0);
    }
}
