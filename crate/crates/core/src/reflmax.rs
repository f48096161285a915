//! Two-barrier laws of drifted Brownian motion started at zero.
//!
//! The confined transition density is the driftless image series tilted by
//! e^{μy − μ²t/2}. Short horizons use the image (theta) series, long ones
//! the sine eigenfunction series; both converge like a Gaussian in the index.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lastzero::DriftClock;
use crate::specfun::{gauss_cdf, ln_gauss_cdf};

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Truncation control for image and eigenfunction series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesBudget {
    pub max_terms: usize,
    pub tail_tol: f64,
}

impl Default for SeriesBudget {
    fn default() -> Self {
        Self {
            max_terms: 200,
            tail_tol: 1e-12,
        }
    }
}

/// Lower and upper absorbing barriers around the start point 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierBox {
    pub alpha: f64,
    pub beta: f64,
}

impl BarrierBox {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha < 0.0 && beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::domain(
                "reflmax::BarrierBox",
                format!("need alpha < 0 < beta, got ({alpha}, {beta})"),
            ));
        }
        Ok(Self { alpha, beta })
    }

    pub fn symmetric(beta: f64) -> Result<Self> {
        Self::new(-beta, beta)
    }

    pub fn width(&self) -> f64 {
        self.beta - self.alpha
    }
}

/// Weight attached to each image of the tilted series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ImageWeights {
    /// Every image carries the same tilt e^{μy − μ²t/2}.
    #[default]
    Girsanov,
    /// The k-th image pair carries e^{μ(y − 2kΔ) − μ²t/2}. Kept for
    /// comparison; it does not vanish at the barriers when μ ≠ 0.
    PerImageTilt,
}

/// Which upper bound of the inner motion sets the outer horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaxKind {
    #[default]
    AbsMax,
    OneSidedMax,
}

fn series_error(op: &'static str, budget: &SeriesBudget, last_term: f64) -> Error {
    Error::SeriesBudget {
        op,
        terms: budget.max_terms,
        last_term,
    }
}

/// Driftless image sum q₀(y)·√(2πt), optionally with per-image tilt factors.
fn image_sum(
    t: f64,
    bx: &BarrierBox,
    y: f64,
    tilt: Option<f64>,
    budget: &SeriesBudget,
) -> Result<f64> {
    let delta = bx.width();
    let alpha = bx.alpha;
    let pair = |k: f64| {
        let s = 2.0 * k * delta;
        let g1 = (-(y - s).powi(2) / (2.0 * t)).exp();
        let g2 = (-(y - s - 2.0 * alpha).powi(2) / (2.0 * t)).exp();
        let w = tilt.map_or(1.0, |mu| (-mu * s).exp());
        w * (g1 - g2)
    };
    let mut sum = pair(0.0);
    // the tilted terms peak near 2kΔ ≈ −μt, so do not stop before passing it
    let k_peak = tilt.map_or(0.0, |mu| (mu * t).abs() / (2.0 * delta)).ceil() as usize + 1;
    for k in 1..=budget.max_terms {
        let kf = k as f64;
        let round = pair(kf) + pair(-kf);
        sum += round;
        if k >= k_peak.max(2) && round.abs() <= budget.tail_tol * sum.abs().max(f64::MIN_POSITIVE) {
            return Ok(sum);
        }
        if !sum.is_finite() {
            break;
        }
    }
    Err(series_error("reflmax::two_barrier_density", budget, sum))
}

/// Sine-series form of q₀(y): (2/Δ) Σ e^{−n²π²t/(2Δ²)} sin(nπ(−α)/Δ) sin(nπ(y−α)/Δ).
fn eigen_sum(t: f64, bx: &BarrierBox, y: f64, budget: &SeriesBudget) -> Result<f64> {
    let delta = bx.width();
    let decay = PI * PI * t / (2.0 * delta * delta);
    let mut sum = 0.0;
    let mut scale = 0.0_f64;
    for n in 1..=budget.max_terms {
        let nf = n as f64;
        let e = (-nf * nf * decay).exp();
        let term = e * (nf * PI * (-bx.alpha) / delta).sin() * (nf * PI * (y - bx.alpha) / delta).sin();
        sum += term;
        scale = scale.max(sum.abs());
        // the remaining terms are bounded by a geometric tail of e
        if e <= budget.tail_tol * scale.max(f64::MIN_POSITIVE) && n >= 2 {
            return Ok(2.0 / delta * sum);
        }
    }
    Err(series_error("reflmax::two_barrier_density", budget, sum))
}

/// Density of B^μ(t) at `y` on the event that the path stays in (α, β).
pub fn two_barrier_density(
    clock: DriftClock,
    bx: BarrierBox,
    y: f64,
    budget: SeriesBudget,
    weights: ImageWeights,
) -> Result<f64> {
    if !(y > bx.alpha && y < bx.beta) {
        return Err(Error::domain(
            "reflmax::two_barrier_density",
            format!("y = {y} outside ({}, {})", bx.alpha, bx.beta),
        ));
    }
    let t = clock.t;
    let mu = clock.mu;
    let tilt = (mu * y - 0.5 * mu * mu * t).exp();
    let delta = bx.width();
    match weights {
        ImageWeights::Girsanov => {
            let q0 = if delta * delta / t >= 0.5 {
                image_sum(t, &bx, y, None, &budget)? / (SQRT_2PI * t.sqrt())
            } else {
                eigen_sum(t, &bx, y, &budget)?
            };
            Ok(tilt * q0)
        }
        ImageWeights::PerImageTilt => {
            Ok(tilt * image_sum(t, &bx, y, Some(mu), &budget)? / (SQRT_2PI * t.sqrt()))
        }
    }
}

/// Φ(u) − Φ(l) for l ≤ u, accurate when both lie in the same tail.
fn gauss_interval(l: f64, u: f64) -> f64 {
    if l > 0.0 {
        gauss_cdf(-l) - gauss_cdf(-u)
    } else {
        gauss_cdf(u) - gauss_cdf(l)
    }
}

/// ln(Φ(u) − Φ(l)), for images far in a Gaussian tail.
fn ln_gauss_interval(l: f64, u: f64) -> f64 {
    let (l, u) = if l > 0.0 { (-u, -l) } else { (l, u) };
    let lu = ln_gauss_cdf(u);
    let ll = ln_gauss_cdf(l);
    lu + (-(ll - lu).exp()).ln_1p()
}

/// P(max_{s≤t} |B^μ(s)| < β).
pub fn max_abs_cdf(clock: DriftClock, beta: f64, budget: SeriesBudget) -> Result<f64> {
    max_abs_cdf_with(clock, beta, budget, ImageWeights::Girsanov)
}

pub fn max_abs_cdf_with(
    clock: DriftClock,
    beta: f64,
    budget: SeriesBudget,
    weights: ImageWeights,
) -> Result<f64> {
    const OP: &str = "reflmax::max_abs_cdf";
    if !(beta > 0.0) {
        return Err(Error::domain(OP, format!("beta = {beta} must be positive")));
    }
    if beta.is_infinite() {
        return Ok(1.0);
    }
    let t = clock.t;
    // the law of |B^μ| is the same for ±μ; the comparison weights are not
    let mu = match weights {
        ImageWeights::Girsanov => clock.mu.abs(),
        ImageWeights::PerImageTilt => clock.mu,
    };
    let delta = 2.0 * beta;
    if weights == ImageWeights::Girsanov && delta * delta / t < 0.5 {
        return max_abs_eigen(clock, beta, &budget);
    }
    let st = t.sqrt();
    let term = |r: i64| -> f64 {
        let rf = r as f64;
        let l = (-beta - 2.0 * beta * rf - mu * t) / st;
        let u = (beta - 2.0 * beta * rf - mu * t) / st;
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        let ln_w = match weights {
            ImageWeights::Girsanov => 2.0 * mu * beta * rf,
            ImageWeights::PerImageTilt => {
                if r % 2 == 0 {
                    0.0
                } else {
                    -2.0 * mu * beta
                }
            }
        };
        if ln_w == 0.0 {
            sign * gauss_interval(l, u)
        } else {
            sign * (ln_w + ln_gauss_interval(l, u)).exp()
        }
    };
    let mut sum = term(0);
    let r_peak = ((mu * t).abs() / (2.0 * beta)).ceil() as i64 + 1;
    for r in 1..=budget.max_terms as i64 {
        let round = term(r) + term(-r);
        sum += round;
        if r >= r_peak.max(2) && round.abs() <= budget.tail_tol * sum.abs().max(f64::MIN_POSITIVE) {
            return Ok(match weights {
                ImageWeights::Girsanov => sum.clamp(0.0, 1.0),
                ImageWeights::PerImageTilt => sum,
            });
        }
    }
    Err(series_error(OP, &budget, sum))
}

/// Eigenfunction form of the confinement probability in (−β, β).
fn max_abs_eigen(clock: DriftClock, beta: f64, budget: &SeriesBudget) -> Result<f64> {
    let t = clock.t;
    let mu = clock.mu;
    let delta = 2.0 * beta;
    let m = mu.abs();
    // e^{−μ²t/2} cosh(μβ), in log form
    let ln_pref = -0.5 * mu * mu * t + m * beta + (0.5 * (1.0 + (-2.0 * m * beta).exp())).ln();
    let decay = PI * PI * t / (2.0 * delta * delta);
    let mut sum = 0.0;
    for j in 0..budget.max_terms {
        let n = (2 * j + 1) as f64;
        let k = n * PI / delta;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let e = (-n * n * decay).exp();
        sum += sign * e * 2.0 * k / (mu * mu + k * k);
        if e <= budget.tail_tol * sum.abs().max(f64::MIN_POSITIVE) && j >= 1 {
            return Ok((2.0 / delta * sum * ln_pref.exp()).clamp(0.0, 1.0));
        }
    }
    Err(series_error("reflmax::max_abs_cdf", budget, sum))
}

/// P(max_{s≤t} (y0 + B^μ(s)) < β) for a start `y0 < β`.
pub fn max_onesided_cdf(clock: DriftClock, beta: f64, y0: f64) -> Result<f64> {
    if !(y0 < beta) {
        return Err(Error::domain(
            "reflmax::max_onesided_cdf",
            format!("start y0 = {y0} must lie below beta = {beta}"),
        ));
    }
    if beta.is_infinite() {
        return Ok(1.0);
    }
    let t = clock.t;
    let mu = clock.mu;
    let d = beta - y0;
    let st = t.sqrt();
    let first = gauss_cdf((d - mu * t) / st);
    let second = (2.0 * mu * d + ln_gauss_cdf((-d - mu * t) / st)).exp();
    Ok((first - second).clamp(0.0, 1.0))
}

/// Density of the first passage time of B^μ to the level `d > 0` at time `s`.
pub fn first_passage_pdf(mu: f64, d: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    d * (-(d - mu * s).powi(2) / (2.0 * s)).exp() / (SQRT_2PI * s * s.sqrt())
}

/// Kolmogorov–Smirnov series Σ_r (−1)^r e^{−2r²x²} with x = β/√t.
pub fn bridge_max_abs_cdf(t: f64, beta: f64, budget: SeriesBudget) -> Result<f64> {
    const OP: &str = "reflmax::bridge_max_abs_cdf";
    if !(beta > 0.0) || !(t > 0.0) {
        return Err(Error::domain(OP, format!("need beta > 0 and t > 0, got {beta}, {t}")));
    }
    if beta.is_infinite() {
        return Ok(1.0);
    }
    let x = beta / t.sqrt();
    if x >= 1.0 {
        let mut sum = 1.0;
        for r in 1..=budget.max_terms {
            let rf = r as f64;
            let term = 2.0 * (-2.0 * rf * rf * x * x).exp();
            sum += if r % 2 == 0 { term } else { -term };
            if term <= budget.tail_tol * sum.abs() {
                return Ok(sum);
            }
        }
        Err(series_error(OP, &budget, sum))
    } else {
        // Jacobi theta transformation of the same series
        let mut sum = 0.0;
        for k in 1..=budget.max_terms {
            let n = (2 * k - 1) as f64;
            let term = (-n * n * PI * PI / (8.0 * x * x)).exp();
            sum += term;
            if term <= budget.tail_tol * sum.max(f64::MIN_POSITIVE) {
                return Ok(SQRT_2PI / x * sum);
            }
        }
        Err(series_error(OP, &budget, sum))
    }
}

/// Bridge law as the ratio of the confined density at 0 to the free density at 0.
pub fn bridge_max_abs_cdf_ratio(
    clock: DriftClock,
    beta: f64,
    budget: SeriesBudget,
    weights: ImageWeights,
) -> Result<f64> {
    let bx = BarrierBox::symmetric(beta)?;
    let confined = two_barrier_density(clock, bx, 0.0, budget, weights)?;
    let t = clock.t;
    let free = (-0.5 * clock.mu * clock.mu * t).exp() / (SQRT_2PI * t.sqrt());
    Ok(confined / free)
}
