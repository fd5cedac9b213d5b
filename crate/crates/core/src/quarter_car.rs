//! Single isolated strut: a mass on the coil-over, integrated with the same
//! semi-implicit Euler update as the full rover.

use crate::dynamics::suspension_force;
use crate::params::RoverParameters;

/// Mass `mass` hanging on one strut, no gravity, no contact.
#[derive(Debug, Clone)]
pub struct QuarterCar {
    pub params: RoverParameters,
    pub mass: f64,
    /// Strut travel, m.
    pub travel: f64,
    pub rate: f64,
    pub time: f64,
}

impl QuarterCar {
    pub fn new(params: RoverParameters, mass: f64, initial_displacement: f64) -> Self {
        QuarterCar {
            travel: params.spring_free_length + initial_displacement,
            params,
            mass,
            rate: 0.0,
            time: 0.0,
        }
    }

    /// Displacement from the free length.
    pub fn displacement(&self) -> f64 {
        self.travel - self.params.spring_free_length
    }

    pub fn step(&mut self, dt: f64) {
        // damper evaluated at the end-of-step rate, as in the rover solve
        let elastic = suspension_force(self.travel, 0.0, &self.params);
        let c = self.params.damping;
        self.rate = (self.mass * self.rate + dt * elastic) / (self.mass + dt * c);
        self.travel += self.rate * dt;
        self.time += dt;
    }

    pub fn natural_frequency(&self) -> f64 {
        (self.params.spring_rate / self.mass).sqrt()
    }

    pub fn damping_ratio(&self) -> f64 {
        self.params.damping / (2.0 * (self.params.spring_rate * self.mass).sqrt())
    }
}

/// Closed-form free response of a linear damped oscillator released from
/// `x0` at rest. Covers under-, critically and over-damped cases.
pub fn damped_oscillator(x0: f64, omega_n: f64, zeta: f64, t: f64) -> f64 {
    if zeta < 1.0 {
        let wd = omega_n * (1.0 - zeta * zeta).sqrt();
        x0 * (-zeta * omega_n * t).exp() * ((wd * t).cos() + zeta * omega_n / wd * (wd * t).sin())
    } else if zeta == 1.0 {
        x0 * (-omega_n * t).exp() * (1.0 + omega_n * t)
    } else {
        let root = (zeta * zeta - 1.0).sqrt();
        let r1 = -omega_n * (zeta - root);
        let r2 = -omega_n * (zeta + root);
        x0 * (r2 * (r1 * t).exp() - r1 * (r2 * t).exp()) / (r2 - r1)
    }
}

/// Largest deviation of the integrated strut from the closed form over
/// `duration`, as a fraction of the initial displacement.
pub fn quarter_car_error(params: &RoverParameters, mass: f64, x0: f64, duration: f64, dt: f64) -> f64 {
    let mut qc = QuarterCar::new(params.clone(), mass, x0);
    let (wn, zeta) = (qc.natural_frequency(), qc.damping_ratio());
    let steps = (duration / dt).round() as usize;
    let mut worst: f64 = 0.0;
    for n in 1..=steps {
        qc.step(dt);
        let exact = damped_oscillator(x0, wn, zeta, n as f64 * dt);
        worst = worst.max((qc.displacement() - exact).abs());
    }
    worst / x0.abs()
}
