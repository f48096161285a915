//! Moments and moment generating function of the last zero.

use zerocross::lastzero::{last_zero_mgf, last_zero_moment, DriftClock};
use zerocross::specfun::kummer_half_one;

fn main() -> zerocross::Result<()> {
    let t = 2.0;
    println!("{:>4} {:>3} {:>14}", "mu", "m", "E[T^m]");
    for mu in [0.0, 0.5, 1.0, 2.0] {
        let clock = DriftClock::new(mu, t)?;
        for m in 1..=3 {
            println!("{mu:>4} {m:>3} {:>14.10}", last_zero_moment(clock, m)?);
        }
    }

    println!("\n{:>6} {:>14} {:>14}", "gamma", "mgf mu=0", "1F1(gt;1/2,1)");
    for gamma in [-2.0, -0.5, 0.25, 1.0] {
        let mgf = last_zero_mgf(DriftClock::new(0.0, t)?, gamma)?;
        println!("{gamma:>6} {mgf:>14.10} {:>14.10}", kummer_half_one(gamma * t)?);
    }

    let clock = DriftClock::new(1.0, t)?;
    let series: f64 = (1..=25u32)
        .map(|m| 0.4f64.powi(m as i32) * last_zero_moment(clock, m).unwrap() / (1..=m).map(f64::from).product::<f64>())
        .sum::<f64>()
        + 1.0;
    println!("\nmu = 1, gamma = 0.4: mgf {:.12}, moment series {series:.12}", last_zero_mgf(clock, 0.4)?);
    Ok(())
}
