//! Law of the last zero before `t` of B^μ(s) = μs + B(s).
//!
//! The law is an arcsine law on `[0, W]` with `W` drawn from an
//! exponentially weighted mixture on `(0, t]` (see [`mixture_weight`]).
//! Everything here depends on μ only through μ², so ±μ give bitwise
//! identical results.

use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::{Error, Result};
use crate::quad::{
    integrate_adaptive, integrate_left_sqrt_singular, QuadratureBudget,
};
use crate::specfun::{central_binomial_weight, erf, incomplete_gamma_weight, kummer_half_one};

/// Drift rate and horizon of a drifted Brownian motion started at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftClock {
    pub mu: f64,
    pub t: f64,
}

impl DriftClock {
    pub fn new(mu: f64, t: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::domain("lastzero::DriftClock", format!("mu = {mu} must be finite")));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::domain("lastzero::DriftClock", format!("t = {t} must be positive")));
        }
        Ok(Self { mu, t })
    }

    /// μ²/2, the rate of the exponential weight.
    pub fn k(&self) -> f64 {
        0.5 * self.mu * self.mu
    }

    pub fn with_t(&self, t: f64) -> Self {
        Self { mu: self.mu, t }
    }
}

/// Evaluation route for [`last_zero_cdf`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CdfForm {
    /// Integral in s over `[0, t−a]` with a `1/√s` endpoint.
    IntegralS,
    /// Integral in y = √(s/a) over `[0, √((t−a)/a)]`.
    #[default]
    IntegralY,
    /// Integral in θ = arctan y.
    Angular,
}

/// Evaluation route for [`last_zero_pdf`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PdfForm {
    /// y-integral, evaluated through erf.
    #[default]
    IntegralY,
    /// w-integral over `[a, t]` by quadrature.
    IntegralS,
}

/// Continuous part and atom of the mixing variable `W` on `(0, t]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureWeight {
    /// (μ²/2) e^{−μ² w/2}, the density of `W` at `w < t`.
    pub density: f64,
    /// P(W = t) = e^{−μ² t/2}.
    pub atom_at_t: f64,
}

fn check_cdf_arg(op: &'static str, clock: &DriftClock, a: f64) -> Result<()> {
    if !(a > 0.0) || a > clock.t {
        return Err(Error::domain(op, format!("need 0 < a <= t = {}, got a = {a}", clock.t)));
    }
    Ok(())
}

fn check_open_arg(op: &'static str, clock: &DriftClock, a: f64) -> Result<()> {
    if !(a > 0.0) || !(a < clock.t) {
        return Err(Error::domain(op, format!("need 0 < a < t = {}, got a = {a}", clock.t)));
    }
    Ok(())
}

/// P(T₀,t < a) with the default form and quadrature budget.
pub fn last_zero_cdf(clock: DriftClock, a: f64) -> Result<f64> {
    last_zero_cdf_with(clock, a, CdfForm::default(), QuadratureBudget::precise())
}

/// P(T₀,t < a) by the requested route.
pub fn last_zero_cdf_with(
    clock: DriftClock,
    a: f64,
    form: CdfForm,
    budget: QuadratureBudget,
) -> Result<f64> {
    check_cdf_arg("lastzero::last_zero_cdf", &clock, a)?;
    if a == clock.t {
        return Ok(1.0);
    }
    let k = clock.k();
    let t = clock.t;
    match form {
        CdfForm::IntegralS => {
            let ra = a.sqrt();
            let i = integrate_left_sqrt_singular(
                |s| ra * (-k * (a + s)).exp() / (a + s),
                0.0,
                t - a,
                budget,
            )?;
            Ok(1.0 - i / PI)
        }
        CdfForm::IntegralY => {
            let c = k * a;
            let y_max = ((t - a) / a).sqrt();
            if y_max < 1.0 {
                let i = integrate_adaptive(
                    |y| {
                        let q = 1.0 + y * y;
                        (-c * q).exp() / q
                    },
                    0.0,
                    y_max,
                    budget,
                )?;
                Ok(1.0 - FRAC_2_PI * i)
            } else {
                // complement of the tail y > y_max, written in v = 1/y
                let i = integrate_adaptive(
                    |v| {
                        if v == 0.0 {
                            return 0.0;
                        }
                        let e = if c == 0.0 { 1.0 } else { (-c * (1.0 + 1.0 / (v * v))).exp() };
                        e / (1.0 + v * v)
                    },
                    0.0,
                    1.0 / y_max,
                    budget,
                )?;
                Ok(erf(c.sqrt()) + FRAC_2_PI * i)
            }
        }
        CdfForm::Angular => {
            let c = k * a;
            let theta = (t - a).sqrt().atan2(a.sqrt());
            let i = integrate_adaptive(
                |th| {
                    let tn = th.tan();
                    (-c * tn * tn).exp()
                },
                0.0,
                theta,
                budget,
            )?;
            Ok(1.0 - FRAC_2_PI * (-c).exp() * i)
        }
    }
}

/// Density of T₀,t at `a ∈ (0, t)`.
pub fn last_zero_pdf(clock: DriftClock, a: f64) -> Result<f64> {
    last_zero_pdf_with(clock, a, PdfForm::default(), QuadratureBudget::precise())
}

pub fn last_zero_pdf_with(
    clock: DriftClock,
    a: f64,
    form: PdfForm,
    budget: QuadratureBudget,
) -> Result<f64> {
    check_open_arg("lastzero::last_zero_pdf", &clock, a)?;
    let t = clock.t;
    let k = clock.k();
    let head = (-k * t).exp() / (PI * (a * (t - a)).sqrt());
    if k == 0.0 {
        return Ok(head);
    }
    let tail = match form {
        PdfForm::IntegralY => {
            let m = clock.mu.abs();
            m * (-k * a).exp() / (2.0 * PI * a).sqrt() * erf(m * ((t - a) / 2.0).sqrt())
        }
        PdfForm::IntegralS => {
            let i = integrate_left_sqrt_singular(|w| (-k * w).exp(), a, t, budget)?;
            k / (PI * a.sqrt()) * i
        }
    };
    Ok(head + tail)
}

/// π√(a(t−a)) · pdf(a), free of endpoint singularities; no argument checks.
pub(crate) fn pdf_scaled(mu: f64, t: f64, a: f64) -> f64 {
    let m = mu.abs();
    let k = 0.5 * m * m;
    let r = (t - a).max(0.0);
    let head = (-k * t).exp();
    if k == 0.0 {
        return head;
    }
    head + m * (-k * a).exp() * (0.5 * PI * r).sqrt() * erf(m * (0.5 * r).sqrt())
}

/// E[T₀,t^m] = C(2m,m)/4^m · m ∫₀ᵗ a^{m−1} e^{−μ²a/2} da.
pub fn last_zero_moment(clock: DriftClock, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("lastzero::last_zero_moment", "m must be >= 1"));
    }
    let w = incomplete_gamma_weight(m, clock.k() * clock.t)?;
    Ok(central_binomial_weight(m) * clock.t.powi(m as i32) * w)
}

/// E[e^{γ T₀,t}] = e^{−μ²t/2} M(γt) + (μ²/2) ∫₀ᵗ e^{−μ²a/2} M(γa) da,
/// with M(x) = ₁F₁(x; 1/2, 1).
pub fn last_zero_mgf(clock: DriftClock, gamma: f64) -> Result<f64> {
    last_zero_mgf_with(clock, gamma, QuadratureBudget::precise())
}

pub fn last_zero_mgf_with(clock: DriftClock, gamma: f64, budget: QuadratureBudget) -> Result<f64> {
    let t = clock.t;
    let k = clock.k();
    let head = (-k * t).exp() * kummer_half_one(gamma * t)?;
    if k == 0.0 {
        return Ok(head);
    }
    // M is finite on the whole range once M(γt) is
    let i = integrate_adaptive(
        |a| (-k * a).exp() * kummer_half_one(gamma * a).unwrap_or(f64::NAN),
        0.0,
        t,
        budget,
    )?;
    Ok(head + k * i)
}

/// CDF of Gamma(1/2, rate) at `a`: erf(√(rate·a)).
pub fn gamma_half_cdf(rate: f64, a: f64) -> f64 {
    erf((rate * a).sqrt())
}

/// lim_{t→∞} P(T₀,t < a) = erf(|μ|√(a/2)), a Gamma(1/2, μ²/2) law.
pub fn last_zero_cdf_infinite_horizon(mu: f64, a: f64) -> Result<f64> {
    const OP: &str = "lastzero::last_zero_cdf_infinite_horizon";
    if mu == 0.0 || !mu.is_finite() {
        return Err(Error::domain(OP, "the driftless last zero has no limit law"));
    }
    if !(a > 0.0) {
        return Err(Error::domain(OP, format!("a = {a} must be positive")));
    }
    Ok(gamma_half_cdf(0.5 * mu * mu, a))
}

/// Mean of the limit law, 1/μ².
pub fn infinite_horizon_mean(mu: f64) -> Result<f64> {
    if mu == 0.0 {
        return Err(Error::domain(
            "lastzero::infinite_horizon_mean",
            "the driftless last zero has no limit law",
        ));
    }
    Ok(1.0 / (mu * mu))
}

/// First-order expansion in μ² of the density and CDF.
///
/// The CDF correction (μ²/π)√(a(t−a)) is the integral of the density
/// correction, so the pair is consistent to first order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallMu {
    pub pdf: f64,
    pub cdf: f64,
}

pub fn last_zero_small_mu(clock: DriftClock, a: f64) -> Result<SmallMu> {
    check_open_arg("lastzero::last_zero_small_mu", &clock, a)?;
    let t = clock.t;
    let k = clock.k();
    let root = (a * (t - a)).sqrt();
    Ok(SmallMu {
        pdf: (1.0 + k * (t - 2.0 * a)) / (PI * root),
        cdf: FRAC_2_PI * (a / t).sqrt().asin() + FRAC_2_PI * k * root,
    })
}

/// Law of the mixing variable `W` at `w ∈ (0, t]`.
pub fn mixture_weight(clock: DriftClock, w: f64) -> Result<MixtureWeight> {
    check_cdf_arg("lastzero::mixture_weight", &clock, w)?;
    let k = clock.k();
    Ok(MixtureWeight {
        density: k * (-k * w).exp(),
        atom_at_t: (-k * clock.t).exp(),
    })
}

/// Driftless arcsine CDF (2/π) arcsin √(a/t).
pub fn arcsine_cdf(t: f64, a: f64) -> f64 {
    FRAC_2_PI * (a / t).clamp(0.0, 1.0).sqrt().asin()
}

/// Driftless arcsine density 1/(π √(a(t−a))).
pub fn arcsine_pdf(t: f64, a: f64) -> f64 {
    1.0 / (PI * (a * (t - a)).sqrt())
}
