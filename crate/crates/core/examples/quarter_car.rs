//! One strut carrying a wheel's sprung share, integrated with the rover's
//! update and compared against the closed-form damped oscillator.

use rover_sim::quarter_car::{damped_oscillator, quarter_car_error, QuarterCar};
use rover_sim::RoverParameters;

fn main() {
    let params = RoverParameters::default();
    let mass = params.front_static_load - params.unsprung_mass;
    let x0 = 0.01;
    let dt = 1e-3;

    let mut strut = QuarterCar::new(params.clone(), mass, x0);
    let (wn, zeta) = (strut.natural_frequency(), strut.damping_ratio());
    println!("mass {mass:.2} kg, wn {wn:.2} rad/s, zeta {zeta:.3}");
    println!("{:>6} {:>12} {:>12}", "t", "simulated", "exact");
    for n in 1..=500 {
        strut.step(dt);
        if n % 50 == 0 {
            let t = n as f64 * dt;
            println!(
                "{t:6.3} {:12.6} {:12.6}",
                strut.displacement(),
                damped_oscillator(x0, wn, zeta, t)
            );
        }
    }

    for dt in [2e-3, 1e-3, 5e-4] {
        let err = quarter_car_error(&params, mass, x0, 5.0, dt);
        println!("dt {:.1} ms: max error {:.3}% of x0", dt * 1e3, err * 100.0);
    }
}
