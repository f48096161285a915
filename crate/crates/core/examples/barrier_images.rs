//! Image series for two barriers and the running maximum of |B|.

use zerocross::lastzero::DriftClock;
use zerocross::reflmax::{
    bridge_max_abs_cdf, bridge_max_abs_cdf_ratio, max_abs_cdf, max_abs_cdf_with, max_onesided_cdf,
    two_barrier_density, BarrierBox, ImageWeights, SeriesBudget,
};

fn main() -> zerocross::Result<()> {
    let sb = SeriesBudget::default();
    let clock = DriftClock::new(0.6, 1.0)?;
    let bx = BarrierBox::new(-0.7, 1.2)?;
    println!("density of paths kept in (-0.7, 1.2), mu = 0.6, t = 1:");
    for y in [-0.5, 0.0, 0.5, 1.0] {
        println!("  y = {y:>4}: {:.8}", two_barrier_density(clock, bx, y, sb, ImageWeights::Girsanov)?);
    }

    println!("\n{:>5} {:>12} {:>12} {:>12}", "beta", "max|B| mu=0", "max|B| mu=1", "max B mu=1");
    for beta in [0.5, 1.0, 1.5, 2.0] {
        println!(
            "{beta:>5} {:>12.8} {:>12.8} {:>12.8}",
            max_abs_cdf(DriftClock::new(0.0, 1.0)?, beta, sb)?,
            max_abs_cdf(DriftClock::new(1.0, 1.0)?, beta, sb)?,
            max_onesided_cdf(DriftClock::new(1.0, 1.0)?, beta, 0.0)?,
        );
    }

    let one = DriftClock::new(1.0, 1.0)?;
    println!(
        "\nmu = 1, beta = 1: Girsanov weights {:.8}, per-image tilt {:.8}",
        max_abs_cdf_with(one, 1.0, sb, ImageWeights::Girsanov)?,
        max_abs_cdf_with(one, 1.0, sb, ImageWeights::PerImageTilt)?,
    );

    println!("\nbridge max |B| < 1: {:.10}", bridge_max_abs_cdf(1.0, 1.0, sb)?);
    for mu in [0.0, 0.7, 1.5] {
        let r = bridge_max_abs_cdf_ratio(DriftClock::new(mu, 1.0)?, 1.0, sb, ImageWeights::Girsanov)?;
        println!("  density ratio with mu = {mu}: {r:.10}");
    }
    Ok(())
}
