//! Last zero of drifted Brownian motion before a horizon, against the arcsine law.

use zerocross::lastzero::{
    arcsine_cdf, last_zero_cdf, last_zero_cdf_infinite_horizon, last_zero_pdf, last_zero_small_mu, mixture_weight,
    DriftClock,
};

fn main() -> zerocross::Result<()> {
    let t = 1.0;
    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "a", "arcsine", "mu=0.5", "mu=1", "mu=2");
    for i in 1..=9 {
        let a = 0.1 * i as f64;
        let mut row = format!("{a:>5.2} {:>10.6}", arcsine_cdf(t, a));
        for mu in [0.5, 1.0, 2.0] {
            row.push_str(&format!(" {:>10.6}", last_zero_cdf(DriftClock::new(mu, t)?, a)?));
        }
        println!("{row}");
    }

    let clock = DriftClock::new(1.0, t)?;
    let w = mixture_weight(clock, 0.5)?;
    println!("\nmixing weight at w = 0.5: density {:.6}, atom at t {:.6}", w.density, w.atom_at_t);
    println!("density at a = 0.3: {:.8}", last_zero_pdf(clock, 0.3)?);

    let small = last_zero_small_mu(DriftClock::new(0.1, t)?, 0.3)?;
    let exact = last_zero_cdf(DriftClock::new(0.1, t)?, 0.3)?;
    println!("mu = 0.1, a = 0.3: small-drift cdf {:.8}, exact {exact:.8}", small.cdf);

    let long = last_zero_cdf(DriftClock::new(1.0, 1e4)?, 2.0)?;
    println!("t = 1e4, a = 2: {long:.8}, limit {:.8}", last_zero_cdf_infinite_horizon(1.0, 2.0)?);
    Ok(())
}
