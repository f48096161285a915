//! Exact path sampling checked against the analytic laws.

use zerocross::iterated::{nfold_moment, NestedSpec};
use zerocross::lastzero::{last_zero_cdf, DriftClock};
use zerocross::mcoracle::{
    censored_fraction, estimate, sample_first_return_after, sample_last_zero, sample_max_abs, sample_nested,
    Functional, McConfig,
};
use zerocross::reflmax::{max_abs_cdf, SeriesBudget};
use zerocross::specfun::erf;

fn main() -> zerocross::Result<()> {
    let cfg = McConfig::new(50_000, 1e-4);
    let clock = DriftClock::new(1.0, 1.0)?;

    let s = sample_last_zero(1.0, 1.0, &cfg)?;
    println!("{:>5} {:>10} {:>10} {:>8} {:>6}", "a", "analytic", "mc", "se", "z");
    for a in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let g = last_zero_cdf(clock, a)?;
        let e = estimate(&s, Functional::CdfAt(a))?;
        println!("{a:>5} {g:>10.6} {:>10.6} {:>8.5} {:>6.2}", e.value, e.std_error, e.z_score(g));
    }

    let s = sample_max_abs(1.0, 1.0, &cfg)?;
    let g = max_abs_cdf(clock, 1.0, SeriesBudget::default())?;
    let e = estimate(&s, Functional::CdfAt(1.0))?;
    println!("\nP(max |B| < 1): analytic {g:.6}, mc {:.6} (z = {:.2})", e.value, e.z_score(g));

    let s = sample_first_return_after(1.0, 2.0, 50.0, &cfg)?;
    let e = censored_fraction(&s)?;
    println!("no return after t = 2: erf(1) = {:.6}, mc {:.6} (z = {:.2})", erf(1.0), e.value, e.z_score(erf(1.0)));

    for n in 1..=3 {
        let s = sample_nested(&NestedSpec::driftless(n, 1.0)?, &cfg)?;
        let e = estimate(&s, Functional::Mean)?;
        let g = nfold_moment(n, 1, 1.0)?;
        println!("depth {n} mean: {g:.6}, mc {:.6} (z = {:.2})", e.value, e.z_score(g));
    }

    // same seed, same samples; a new seed gives a new draw
    let again = sample_last_zero(1.0, 1.0, &cfg)?;
    let other = sample_last_zero(1.0, 1.0, &cfg.with_seed(7))?;
    println!("\nrepeatable: {}, reseeded differs: {}", again == sample_last_zero(1.0, 1.0, &cfg)?, again != other);
    Ok(())
}
