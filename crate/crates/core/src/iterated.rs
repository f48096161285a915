//! Zero-crossing laws built from several independent Brownian motions.
//!
//! * [`iterated_bm_pdf`]: density of B₁^{μ₁}(|B₂^{μ₂}(t)|).
//! * [`iter_last_zero_cdf`]: last zero of the outer motion before the
//!   running maximum of the inner one.
//! * [`nested_last_zero_cdf`]: last zero of B^{μ₁} before the last zero of
//!   B^{μ₂} before `t`, and the n-fold driftless recursion.

use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::{Error, Result};
use crate::lastzero::{arcsine_pdf, last_zero_cdf, pdf_scaled, DriftClock};
use crate::quad::{
    integrate_adaptive, integrate_arcsine_kernel, integrate_left_sqrt_singular, QuadratureBudget,
};
use crate::reflmax::{max_abs_cdf, max_onesided_cdf, MaxKind, SeriesBudget};
use crate::specfun::{central_binomial_weight, erf, kummer_half_one};

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Deepest n-fold recursion evaluated by quadrature.
pub const MAX_ANALYTIC_DEPTH: usize = 3;

/// Drifts of a nested last-zero time, innermost horizon first.
///
/// `drifts[j]` drives the motion whose last zero is taken at level `j + 1`;
/// level 1 is the outermost time returned and `drifts.len()` is the depth.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedSpec {
    pub drifts: Vec<f64>,
    pub t: f64,
}

impl NestedSpec {
    pub fn new(drifts: Vec<f64>, t: f64) -> Result<Self> {
        if drifts.is_empty() {
            return Err(Error::domain("iterated::NestedSpec", "depth must be >= 1"));
        }
        if !(t > 0.0) || drifts.iter().any(|m| !m.is_finite()) {
            return Err(Error::domain("iterated::NestedSpec", "need t > 0 and finite drifts"));
        }
        Ok(Self { drifts, t })
    }

    pub fn driftless(depth: usize, t: f64) -> Result<Self> {
        Self::new(vec![0.0; depth], t)
    }

    pub fn depth(&self) -> usize {
        self.drifts.len()
    }
}

/// Density of B₁^{μ₁}(|B₂^{μ₂}(t)|) at `x`.
pub fn iterated_bm_pdf(mu1: f64, mu2: f64, t: f64, x: f64, budget: QuadratureBudget) -> Result<f64> {
    if !(t > 0.0) || !x.is_finite() {
        return Err(Error::domain("iterated::iterated_bm_pdf", "need t > 0 and finite x"));
    }
    // s = u²: the outer Gaussian in x with variance s loses its 1/√s factor
    let upper = (mu2.abs() * t + 12.0 * t.sqrt()).sqrt();
    let st = t.sqrt();
    let inner = |s: f64| {
        ((-(s - mu2 * t).powi(2) / (2.0 * t)).exp() + (-(s + mu2 * t).powi(2) / (2.0 * t)).exp())
            / (SQRT_2PI * st)
    };
    let i = integrate_adaptive(
        |u| {
            if u == 0.0 {
                return 0.0;
            }
            let s = u * u;
            let outer = 2.0 * (-(x - mu1 * s).powi(2) / (2.0 * s)).exp() / SQRT_2PI;
            outer * inner(s)
        },
        0.0,
        upper,
        budget,
    )?;
    Ok(i)
}

/// P(last zero of B^μ before max_{z≤t}|B₂(z)| < a), inner motion driftless.
pub fn iter_last_zero_cdf(
    mu: f64,
    t: f64,
    a: f64,
    qb: QuadratureBudget,
    sb: SeriesBudget,
) -> Result<f64> {
    iter_last_zero_cdf_drifted_inner(mu, 0.0, t, a, MaxKind::AbsMax, qb, sb)
}

/// As [`iter_last_zero_cdf`] with a drifted inner motion whose absolute or
/// one-sided running maximum sets the outer horizon.
pub fn iter_last_zero_cdf_drifted_inner(
    mu1: f64,
    mu2: f64,
    t: f64,
    a: f64,
    kind: MaxKind,
    qb: QuadratureBudget,
    sb: SeriesBudget,
) -> Result<f64> {
    const OP: &str = "iterated::iter_last_zero_cdf";
    if !(a > 0.0) || !(t > 0.0) {
        return Err(Error::domain(OP, format!("need a > 0 and t > 0, got a = {a}, t = {t}")));
    }
    let inner = DriftClock::new(mu2, t)?;
    let horizon_cdf = |w: f64| -> Result<f64> {
        match kind {
            MaxKind::AbsMax => max_abs_cdf(inner, w, sb),
            MaxKind::OneSidedMax => max_onesided_cdf(inner, w, 0.0),
        }
    };
    // P(T < a) = erf(√c) + (2/π) ∫₀^∞ F(a(1+y²)) e^{−c(1+y²)}/(1+y²) dy, c = μ²a/2
    let c = 0.5 * mu1 * mu1 * a;
    let near = integrate_adaptive(
        |y| {
            let q = 1.0 + y * y;
            horizon_cdf(a * q).unwrap_or(f64::NAN) * (-c * q).exp() / q
        },
        0.0,
        1.0,
        qb.share(2.0),
    )?;
    let far = integrate_adaptive(
        |v| {
            if v == 0.0 {
                return 0.0;
            }
            let q = 1.0 + 1.0 / (v * v);
            let e = if c == 0.0 { 1.0 } else { (-c * q).exp() };
            if e == 0.0 {
                return 0.0;
            }
            horizon_cdf(a * q).unwrap_or(f64::NAN) * e / (1.0 + v * v)
        },
        0.0,
        1.0,
        qb.share(2.0),
    )?;
    Ok((erf(c.sqrt()) + FRAC_2_PI * (near + far)).clamp(0.0, 1.0))
}

fn check_nested(op: &'static str, t: f64, a: f64) -> Result<()> {
    if !(a > 0.0) || !(a <= t) {
        return Err(Error::domain(op, format!("need 0 < a <= t = {t}, got a = {a}")));
    }
    Ok(())
}

/// P(last zero of B^{μ₁} before the last zero of B^{μ₂} before t < a).
///
/// Integration by parts in the horizon gives
/// G₁(a; t) + ∫_a^t (√a/π) e^{−μ₁²w/2} / (w√(w−a)) · G₂(w; t) dw
/// with G_j the last-zero CDF of the j-th motion.
pub fn nested_last_zero_cdf(mu1: f64, mu2: f64, t: f64, a: f64, qb: QuadratureBudget) -> Result<f64> {
    check_nested("iterated::nested_last_zero_cdf", t, a)?;
    if a == t {
        return Ok(1.0);
    }
    let c1 = DriftClock::new(mu1, t)?;
    let c2 = DriftClock::new(mu2, t)?;
    let k1 = c1.k();
    let head = last_zero_cdf(c1, a)?;
    let ra = a.sqrt();
    let tail = integrate_arcsine_kernel(
        |w| {
            let g2 = last_zero_cdf(c2, w.min(t)).unwrap_or(f64::NAN);
            ra / PI * (-k1 * w).exp() * g2 * (t - w).max(0.0).sqrt() / w
        },
        a,
        t,
        qb,
    )?;
    Ok((head + tail).min(1.0))
}

/// Density of the nested time: ∫_a^t p₁(a; w) p₂(w; t) dw.
pub fn nested_last_zero_pdf(mu1: f64, mu2: f64, t: f64, a: f64, qb: QuadratureBudget) -> Result<f64> {
    if !(a > 0.0 && a < t) {
        return Err(Error::domain(
            "iterated::nested_last_zero_pdf",
            format!("need 0 < a < t = {t}, got a = {a}"),
        ));
    }
    let i = integrate_arcsine_kernel(
        |w| pdf_scaled(mu1, w, a) * pdf_scaled(mu2, t, w) / (PI * PI * (a * w).sqrt()),
        a,
        t,
        qb,
    )?;
    Ok(i)
}

/// Arithmetic–geometric mean.
fn agm(mut x: f64, mut y: f64) -> f64 {
    for _ in 0..64 {
        let m = 0.5 * (x + y);
        let g = (x * y).sqrt();
        if (m - g).abs() <= 1e-16 * m {
            return m;
        }
        x = m;
        y = g;
    }
    0.5 * (x + y)
}

/// Driftless depth-2 density 2K(√(1−a/t))/(π²√(at)) = 1/(π√(at) AGM(1, √(a/t))).
fn nfold2_pdf(t: f64, a: f64) -> f64 {
    1.0 / (PI * (a * t).sqrt() * agm(1.0, (a / t).sqrt()))
}

/// Driftless density of the n-fold nested last zero; `n` counts arcsine kernels.
pub fn nfold_last_zero_pdf(n: usize, t: f64, a: f64, qb: QuadratureBudget) -> Result<f64> {
    const OP: &str = "iterated::nfold_last_zero_pdf";
    if n == 0 {
        return Err(Error::domain(OP, "depth must be >= 1"));
    }
    if n > MAX_ANALYTIC_DEPTH {
        return Err(Error::Depth {
            op: OP,
            depth: n,
            max: MAX_ANALYTIC_DEPTH,
        });
    }
    if !(a > 0.0 && a < t) {
        return Err(Error::domain(OP, format!("need 0 < a < t = {t}, got a = {a}")));
    }
    match n {
        1 => Ok(arcsine_pdf(t, a)),
        2 => Ok(nfold2_pdf(t, a)),
        _ => {
            let i = integrate_left_sqrt_singular(|w| nfold2_pdf(t, w.min(t)), a, t, qb)?;
            Ok(i / (PI * a.sqrt()))
        }
    }
}

/// E[(ⁿT₀,t)^m] = (C(2m,m)/4^m)ⁿ t^m.
pub fn nfold_moment(n: usize, m: u32, t: f64) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(Error::domain("iterated::nfold_moment", "need n >= 1 and m >= 1"));
    }
    Ok(central_binomial_weight(m).powi(n as i32) * t.powi(m as i32))
}

/// E[e^{α ⁿT₀,t}] = Σ_m (αt)^m (C(2m,m)/4^m)ⁿ / m!.
///
/// For αt < −2 the alternating series cancels; there the driftless scaling
/// ⁿT = ⁿ⁻¹T · A with A arcsine on (0, 1) gives a stable recursion ending in
/// Kummer's transformation at depth one.
pub fn nfold_mgf(n: usize, t: f64, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("iterated::nfold_mgf", "depth must be >= 1"));
    }
    nfold_mgf_x(n, alpha * t)
}

fn nfold_mgf_x(n: usize, x: f64) -> Result<f64> {
    if n == 1 {
        return kummer_half_one(x);
    }
    if x >= -2.0 {
        return nfold_mgf_series(n, x);
    }
    let v = integrate_arcsine_kernel(
        |u| nfold_mgf_x(n - 1, x * u).unwrap_or(f64::NAN),
        0.0,
        1.0,
        QuadratureBudget::new(1e-15, 1e-13, 50)?,
    )?;
    Ok(v / PI)
}

fn nfold_mgf_series(n: usize, x: f64) -> Result<f64> {
    const OP: &str = "iterated::nfold_mgf";
    const MAX_TERMS: usize = 500;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut scale = 1.0_f64;
    for m in 0..MAX_TERMS {
        let mf = m as f64;
        let r = (2.0 * mf + 1.0) / (2.0 * mf + 2.0);
        term *= x * r.powi(n as i32) / (mf + 1.0);
        sum += term;
        scale = scale.max(sum.abs());
        if mf + 1.0 > x.abs() && term.abs() <= 1e-14 * scale {
            return Ok(sum);
        }
        if !sum.is_finite() {
            return Err(Error::Overflow { op: OP, arg: x });
        }
    }
    Err(Error::SeriesBudget {
        op: OP,
        terms: MAX_TERMS,
        last_term: term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lastzero::{arcsine_cdf, last_zero_pdf};
    use crate::quad::{integrate_half_line, integrate_right_sqrt_singular};

    fn qb() -> QuadratureBudget {
        QuadratureBudget::precise()
    }

    #[test]
    fn iterated_bm_symmetry_and_mass() {
        let b = QuadratureBudget::default();
        let p = iterated_bm_pdf(1.0, 0.5, 1.0, 0.3, b).unwrap();
        let q = iterated_bm_pdf(-1.0, 0.5, 1.0, -0.3, b).unwrap();
        assert!((p - q).abs() < 1e-12);
        let pdf = |x: f64| iterated_bm_pdf(1.0, 0.5, 1.0, x, qb()).unwrap();
        let right = integrate_half_line(pdf, 0.0, QuadratureBudget::new(1e-11, 1e-10, 50).unwrap()).unwrap();
        let left = integrate_half_line(|x| pdf(-x), 0.0, QuadratureBudget::new(1e-11, 1e-10, 50).unwrap()).unwrap();
        assert!((left + right - 1.0).abs() < 1e-7, "{}", left + right);
    }

    #[test]
    fn iter_last_zero_limits() {
        let s = SeriesBudget::default();
        let b = QuadratureBudget::default();
        assert!(iter_last_zero_cdf(1.0, 1.0, 1e-6, b, s).unwrap() < 1e-2);
        assert!(iter_last_zero_cdf(0.0, 1.0, 1e-6, b, s).unwrap() < 1e-2);
        let a = 10.0 * (1.0 + 10.0);
        assert!(iter_last_zero_cdf(1.0, 1.0, a, b, s).unwrap() >= 1.0 - 1e-6);
        assert!(iter_last_zero_cdf(0.3, 1.0, 1e3, b, s).unwrap() > 0.99);
        let mut prev = 0.0;
        for i in 1..=20 {
            let a = 0.1 * i as f64;
            let v = iter_last_zero_cdf_drifted_inner(1.0, 0.5, 1.0, a, MaxKind::AbsMax, b, s).unwrap();
            assert!(v >= prev - 1e-12 && v <= 1.0);
            prev = v;
        }
    }

    #[test]
    fn iter_last_zero_driftless_inner_reduction() {
        let s = SeriesBudget::default();
        let b = QuadratureBudget::default();
        let x = iter_last_zero_cdf(0.8, 1.3, 0.6, b, s).unwrap();
        let y = iter_last_zero_cdf_drifted_inner(0.8, 0.0, 1.3, 0.6, MaxKind::AbsMax, b, s).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn iter_last_zero_matches_horizon_mixture() {
        // P(T < a) = E[G(a; H)], G the last-zero CDF on horizon H = max|B₂|
        let s = SeriesBudget::default();
        let (mu, t, a) = (1.0, 1.0, 0.5);
        let inner = DriftClock::new(0.0, t).unwrap();
        let h = 1e-5;
        let dens = |w: f64| {
            (max_abs_cdf(inner, w + h, s).unwrap() - max_abs_cdf(inner, (w - h).max(1e-12), s).unwrap()) / (2.0 * h)
        };
        let below = max_abs_cdf(inner, a, s).unwrap();
        let above = integrate_adaptive(
            |w| last_zero_cdf(DriftClock::new(mu, w).unwrap(), a).unwrap() * dens(w),
            a,
            12.0,
            QuadratureBudget::new(1e-9, 1e-8, 40).unwrap(),
        )
        .unwrap();
        let v = iter_last_zero_cdf(mu, t, a, qb(), s).unwrap();
        assert!((v - (below + above)).abs() < 1e-6, "{v} {}", below + above);
    }

    #[test]
    fn nested_driftless_against_arcsin_form() {
        // G(a) = (2/π) arcsin√(a/t) + (2/π²) ∫_a^t arcsin√(a/w) / √(w(t−w)) dw
        let (t, a) = (1.0, 0.5);
        let i = integrate_arcsine_kernel(
            |w| (a / w).sqrt().asin() * ((w - a) / w).sqrt(),
            a,
            t,
            qb(),
        )
        .unwrap();
        let oracle = arcsine_cdf(t, a) + 2.0 / (PI * PI) * i;
        let v = nested_last_zero_cdf(0.0, 0.0, t, a, qb()).unwrap();
        assert!((v - oracle).abs() < 1e-10, "{v} {oracle}");
    }

    #[test]
    fn nested_cdf_dominates_outer_cdf() {
        for &(m1, m2) in &[(0.0, 0.0), (1.0, 1.0), (0.5, 2.0)] {
            for &a in &[0.1, 0.4, 0.8] {
                let nested = nested_last_zero_cdf(m1, m2, 1.0, a, qb()).unwrap();
                let outer = last_zero_cdf(DriftClock::new(m1, 1.0).unwrap(), a).unwrap();
                assert!(nested > outer && nested <= 1.0);
            }
        }
    }

    #[test]
    fn nested_pdf_is_derivative_of_cdf() {
        let (m1, m2, t, a, h) = (1.0, 0.5, 1.0, 0.4, 1e-5);
        let fd = (nested_last_zero_cdf(m1, m2, t, a + h, qb()).unwrap()
            - nested_last_zero_cdf(m1, m2, t, a - h, qb()).unwrap())
            / (2.0 * h);
        let p = nested_last_zero_pdf(m1, m2, t, a, qb()).unwrap();
        assert!((fd - p).abs() < 1e-5, "{fd} {p}");
    }

    #[test]
    fn nested_pdf_normalizes() {
        let b = QuadratureBudget::new(1e-9, 1e-9, 50).unwrap();
        for &(m1, m2) in &[(1.0, 0.5), (0.0, 0.0), (2.0, 1.0)] {
            let i = integrate_left_sqrt_singular(
                |a| nested_last_zero_pdf(m1, m2, 1.0, a.max(1e-300), qb()).unwrap() * a.sqrt(),
                0.0,
                1.0,
                b,
            )
            .unwrap();
            assert!((i - 1.0).abs() < 1e-6, "{m1} {m2}: {i}");
        }
    }

    #[test]
    fn nfold_depth_two_closed_form_matches_quadrature() {
        for &a in &[0.01, 0.3, 0.77, 0.999] {
            let direct = integrate_arcsine_kernel(
                |w| 1.0 / (PI * PI * (a * w).sqrt()),
                a,
                1.0,
                qb(),
            )
            .unwrap();
            let closed = nfold_last_zero_pdf(2, 1.0, a, qb()).unwrap();
            assert!((direct - closed).abs() < 1e-11 * closed, "{a}");
            let nested = nested_last_zero_pdf(0.0, 0.0, 1.0, a, qb()).unwrap();
            assert!((nested - closed).abs() < 1e-11 * closed);
        }
        assert_eq!(nfold_last_zero_pdf(1, 2.0, 0.5, qb()).unwrap(), last_zero_pdf(DriftClock::new(0.0, 2.0).unwrap(), 0.5).unwrap());
    }

    #[test]
    fn nfold_moments_from_densities() {
        let b = QuadratureBudget::new(1e-11, 1e-10, 50).unwrap();
        for n in 1..=3 {
            for m in 1..=2u32 {
                let f = |a: f64| {
                    let a = a.clamp(1e-300, 1.0 - 1e-16);
                    a.powi(m as i32) * nfold_last_zero_pdf(n, 1.0, a, qb()).unwrap()
                };
                let left = integrate_left_sqrt_singular(|a| f(a) * a.sqrt(), 0.0, 0.5, b).unwrap();
                let right = integrate_right_sqrt_singular(|a| f(a) * (1.0 - a).sqrt(), 0.5, 1.0, b).unwrap();
                let exact = nfold_moment(n, m, 1.0).unwrap();
                assert!((left + right - exact).abs() < 1e-7, "n={n} m={m}: {} vs {exact}", left + right);
            }
        }
        assert_eq!(nfold_moment(2, 1, 1.0).unwrap(), 0.25);
        assert_eq!(nfold_moment(2, 2, 1.0).unwrap(), 0.140625);
        assert_eq!(nfold_moment(3, 1, 8.0).unwrap(), 1.0);
        assert_eq!(nfold_moment(1, 1, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn nfold_depth_limit() {
        assert!(matches!(
            nfold_last_zero_pdf(4, 1.0, 0.5, qb()),
            Err(Error::Depth { depth: 4, .. })
        ));
    }

    #[test]
    fn mean_square_shrinks_with_depth() {
        let mut prev = f64::INFINITY;
        for n in 1..=20 {
            let v = nfold_moment(n, 2, 1.0).unwrap();
            assert!((v - 0.375f64.powi(n as i32)).abs() < 1e-16);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn nfold_mgf_identities() {
        assert_eq!(nfold_mgf(3, 1.0, 0.0).unwrap(), 1.0);
        assert!((nfold_mgf(1, 1.0, 1.0).unwrap() - kummer_half_one(1.0).unwrap()).abs() < 1e-12);
        for &x in &[-20.0, -1.0, 3.0, 40.0] {
            let v = nfold_mgf(1, 2.0, x / 2.0).unwrap();
            let k = kummer_half_one(x).unwrap();
            assert!((v - k).abs() < 1e-12 * k.max(1.0), "{x}");
        }
        for n in 2..=3 {
            let slow = nfold_mgf_series(n, -1.9).unwrap();
            let fast = nfold_mgf_x(n, -1.9).unwrap();
            assert!((slow - fast).abs() < 1e-13);
            let rec = nfold_mgf_x(n, -2.1).unwrap();
            let ser = nfold_mgf_series(n, -2.1).unwrap();
            assert!((rec - ser).abs() < 1e-12, "{rec} {ser}");
            let deep = nfold_mgf(n, 1.0, -60.0).unwrap();
            assert!(deep > 0.0 && deep < nfold_mgf(n - 1, 1.0, -60.0).unwrap() + 1.0);
        }
        let alpha: f64 = 0.5;
        let mut series = 1.0;
        let mut fact = 1.0;
        for m in 1..=30u32 {
            fact *= m as f64;
            series += alpha.powi(m as i32) * nfold_moment(2, m, 1.0).unwrap() / fact;
        }
        assert!((nfold_mgf(2, 1.0, alpha).unwrap() - series).abs() < 1e-14);
    }

    #[test]
    fn nfold_mgf_series_coefficients() {
        // (2m)!/(m!)³ (x/4)^m are the ₁F₁(x; 1/2, 1) coefficients
        let mut fact = [1.0f64; 21];
        for i in 1..21 {
            fact[i] = fact[i - 1] * i as f64;
        }
        for m in 0..=10usize {
            let lhs = fact[2 * m] / fact[m].powi(3) / 4f64.powi(m as i32);
            let rhs = central_binomial_weight(m as u32) / fact[m];
            assert!((lhs - rhs).abs() < 1e-15 * rhs);
        }
    }
}
