//! Last zero before t together with the first zero after it.

use zerocross::jointlaw::{
    cond_last_given_return_pdf, joint_pdf, joint_survival, p_never_return, return_time_pdf, straddle_length_pdf,
    ReturnTime,
};
use zerocross::lastzero::DriftClock;

fn main() -> zerocross::Result<()> {
    let clock = DriftClock::new(1.0, 2.0)?;
    println!("P(no zero after t = 2) = {:.10}", p_never_return(clock));

    println!("\n{:>5} {:>12} {:>12} {:>12}", "a", "b = 3", "b = 6", "never");
    for a in [0.5, 1.0, 1.5] {
        println!(
            "{a:>5} {:>12.8} {:>12.8} {:>12.8}",
            joint_survival(clock, a, ReturnTime::Finite(3.0))?,
            joint_survival(clock, a, ReturnTime::Finite(6.0))?,
            joint_survival(clock, a, ReturnTime::Never)?,
        );
    }

    println!("\njoint density at (1, 3): {:.8}", joint_pdf(clock, 1.0, 3.0)?);
    println!("return density at b = 3: {:.8}", return_time_pdf(clock, 3.0)?);
    println!("straddle length density at w = 1: {:.8}", straddle_length_pdf(clock, 1.0)?);

    // the conditional density of the last zero given a return at b is smallest at b/4
    let (t, b) = (1.0, 3.0);
    println!("\nconditional density of the last zero given a return at b = 3:");
    for a in [0.25, 0.5, 0.75, 0.9] {
        println!("  a = {a:>4}: {:.8}", cond_last_given_return_pdf(t, a, b)?);
    }
    Ok(())
}
