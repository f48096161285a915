//! Joint law of the last zero `a` before `t` and the first return `b` after `t`.
//!
//! Under drift the return time is defective: with probability
//! [`p_never_return`] the path never comes back to zero. That outcome is
//! carried as [`ReturnTime::Never`], never as a sentinel number.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lastzero::{last_zero_cdf, DriftClock};
use crate::quad::{integrate_adaptive, QuadratureBudget};
use crate::specfun::{erf, erfcx, int_exp_over_sqrt};

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// First return to zero after `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReturnTime {
    Finite(f64),
    Never,
}

/// Outcome pair (last zero before t, first zero after t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroCrossingPair {
    pub a: f64,
    pub b: ReturnTime,
}

fn check_wedge(op: &'static str, clock: &DriftClock, a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && a < clock.t && b > clock.t) || !b.is_finite() {
        return Err(Error::domain(
            op,
            format!("need 0 < a < t < b, got a = {a}, t = {}, b = {b}", clock.t),
        ));
    }
    Ok(())
}

/// P(last zero < a, first return > b).
///
/// The event is "no zero in `[a, b]`", so this is the last-zero CDF on the
/// horizon `b`; `b = Never` gives the mass of paths that never return.
pub fn joint_survival(clock: DriftClock, a: f64, b: ReturnTime) -> Result<f64> {
    const OP: &str = "jointlaw::joint_survival";
    match b {
        ReturnTime::Finite(b) => {
            if !(a > 0.0 && a <= clock.t && b >= clock.t) {
                return Err(Error::domain(
                    OP,
                    format!("need 0 < a <= t <= b, got a = {a}, t = {}, b = {b}", clock.t),
                ));
            }
            last_zero_cdf(clock.with_t(b), a)
        }
        ReturnTime::Never => {
            if !(a > 0.0 && a <= clock.t) {
                return Err(Error::domain(OP, format!("need 0 < a <= t, got a = {a}")));
            }
            Ok(erf(clock.mu.abs() * (a / 2.0).sqrt()))
        }
    }
}

/// Joint density e^{−μ²b/2} / (2π √(a (b−a)³)) on `0 < a < t < b`.
pub fn joint_pdf(clock: DriftClock, a: f64, b: f64) -> Result<f64> {
    check_wedge("jointlaw::joint_pdf", &clock, a, b)?;
    let d = b - a;
    Ok((-clock.k() * b).exp() / (2.0 * PI * (a * d * d * d).sqrt()))
}

/// ∫_{b0}^∞ joint_pdf(a, b) db for `b0 > a`, in closed form.
pub fn joint_b_tail(clock: DriftClock, a: f64, b0: f64) -> Result<f64> {
    if !(a > 0.0 && b0 > a) {
        return Err(Error::domain(
            "jointlaw::joint_b_tail",
            format!("need 0 < a < b0, got a = {a}, b0 = {b0}"),
        ));
    }
    let m = clock.mu.abs();
    let d = b0 - a;
    let z = m * (d / 2.0).sqrt();
    let bracket = 1.0 / (PI * d.sqrt()) - m * erfcx(z) / SQRT_2PI;
    Ok((-clock.k() * b0).exp() / a.sqrt() * bracket)
}

/// Marginal density of the first return after `t`, on `b > t`.
pub fn return_time_pdf(clock: DriftClock, b: f64) -> Result<f64> {
    if !(b > clock.t) || !b.is_finite() {
        return Err(Error::domain(
            "jointlaw::return_time_pdf",
            format!("need b > t = {}, got b = {b}", clock.t),
        ));
    }
    let t = clock.t;
    Ok((-clock.k() * b).exp() * (t / (b - t)).sqrt() / (PI * b))
}

/// P(the path never returns to zero after `t`) = erf(|μ| √(t/2)).
pub fn p_never_return(clock: DriftClock) -> f64 {
    erf(clock.mu.abs() * (clock.t / 2.0).sqrt())
}

/// Density of the last zero given the return time `b`; free of μ.
pub fn cond_last_given_return_pdf(t: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && a < t && b > t) || !b.is_finite() {
        return Err(Error::domain(
            "jointlaw::cond_last_given_return_pdf",
            format!("need 0 < a < t < b, got a = {a}, t = {t}, b = {b}"),
        ));
    }
    let d = b - a;
    Ok(b / (2.0 * (a * t).sqrt()) * ((b - t) / (d * d * d)).sqrt())
}

/// e^{−μ²(t−a)/2} + μ² √(a(t−a)) ∫₀^Y e^{−μ²a y²/2} dy, Y = √((t−a)/a):
/// the normalizer shared by both conditionals given the last zero.
fn scaled_denominator(clock: &DriftClock, a: f64) -> Result<f64> {
    let t = clock.t;
    let k = clock.k();
    if k == 0.0 {
        return Ok(1.0);
    }
    let y_max = ((t - a) / a).sqrt();
    let c = k * a;
    let i = integrate_adaptive(|y| (-c * y * y).exp(), 0.0, y_max, QuadratureBudget::precise())?;
    Ok((-k * (t - a)).exp() + 2.0 * k * (a * (t - a)).sqrt() * i)
}

/// Density of the return time `b > t` given the last zero `a < t`.
pub fn cond_return_given_last_pdf(clock: DriftClock, a: f64, b: f64) -> Result<f64> {
    check_wedge("jointlaw::cond_return_given_last_pdf", &clock, a, b)?;
    let t = clock.t;
    let d = b - a;
    let num = 0.5 * ((t - a) / (d * d * d)).sqrt() * (-clock.k() * d).exp();
    Ok(num / scaled_denominator(&clock, a)?)
}

/// P(no return after `t` | last zero = a).
pub fn p_never_return_given_last(clock: DriftClock, a: f64) -> Result<f64> {
    if !(a > 0.0 && a < clock.t) {
        return Err(Error::domain(
            "jointlaw::p_never_return_given_last",
            format!("need 0 < a < t = {}, got a = {a}", clock.t),
        ));
    }
    let num = (PI / 2.0).sqrt() * clock.mu.abs() * (clock.t - a).sqrt();
    Ok(num / scaled_denominator(&clock, a)?)
}

/// Density of the last zero on the event that the path never returns.
pub fn last_zero_no_return_density(mu: f64, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::domain(
            "jointlaw::last_zero_no_return_density",
            format!("a = {a} must be positive"),
        ));
    }
    let m = mu.abs();
    Ok(m * (-0.5 * mu * mu * a).exp() / (2.0 * PI * a).sqrt())
}

/// Density of b − a, the length of the zero-free interval straddling `t`.
pub fn straddle_length_pdf(clock: DriftClock, w: f64) -> Result<f64> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::domain(
            "jointlaw::straddle_length_pdf",
            format!("w = {w} must be positive"),
        ));
    }
    let k = clock.k();
    let t = clock.t;
    let inner = int_exp_over_sqrt(k, (t - w).max(0.0), t);
    Ok((-k * w).exp() / (2.0 * PI * w * w.sqrt()) * inner)
}
