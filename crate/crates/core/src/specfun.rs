//! Scalar special functions used by the zero-crossing laws.
//!
//! | Function | Description |
//! |----------|-------------|
//! | [`erf`], [`erfc`], [`erfcx`] | error function family |
//! | [`gauss_cdf`], [`ln_gauss_cdf`] | standard normal CDF |
//! | [`kummer_half_one`] | ₁F₁(x; 1/2, 1) |
//! | [`central_binomial_weight`] | C(2m, m) / 4^m |
//! | [`incomplete_gamma_weight`] | m ∫₀¹ y^(m−1) e^(−xy) dy |

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Below this |x| erf uses the positive-term series, above it the
/// continued fraction for erfc.
const ERF_SERIES_LIMIT: f64 = 2.5;

/// `|x|` guard for [`kummer_half_one`]; ₁F₁(x;1/2,1) ~ e^x / sqrt(pi x).
pub const KUMMER_OVERFLOW_GUARD: f64 = 700.0;

/// erf(x) = x e^{-x²} (2/√π) Σ (2x²)^n / (1·3·…·(2n+1)); every term is positive.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0.0;
    loop {
        term *= 2.0 * x2 / (2.0 * n + 3.0);
        sum += term;
        n += 1.0;
        if term < 1e-17 * sum {
            break;
        }
    }
    FRAC_2_SQRT_PI * x * (-x2).exp() * sum
}

/// Continued fraction for e^{x²} erfc(x), x ≥ ERF_SERIES_LIMIT (modified Lentz).
///
/// erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …)))).
fn erfcx_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / (SQRT_PI * f)
}

/// Error function (2/√π)∫₀ˣ e^{−w²} dw.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    let ax = x.abs();
    let v = if ax < ERF_SERIES_LIMIT {
        erf_series(ax)
    } else if ax > 6.5 {
        1.0
    } else {
        1.0 - (-ax * ax).exp() * erfcx_cf(ax)
    };
    v.copysign(x)
}

/// Complementary error function, accurate in the upper tail.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    if x < 0.0 {
        2.0 - erfc(-x)
    } else if x < ERF_SERIES_LIMIT {
        1.0 - erf_series(x)
    } else {
        (-x * x).exp() * erfcx_cf(x)
    }
}

/// Scaled complementary error function e^{x²} erfc(x) for x ≥ 0.
pub fn erfcx(x: f64) -> f64 {
    if x < ERF_SERIES_LIMIT {
        (x * x).exp() * erfc(x)
    } else {
        erfcx_cf(x)
    }
}

/// Standard normal CDF Φ(x).
pub fn gauss_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// ln Φ(x), finite far into the lower tail.
pub fn ln_gauss_cdf(x: f64) -> f64 {
    if x > -5.0 {
        gauss_cdf(x).ln()
    } else {
        let z = -x * FRAC_1_SQRT_2;
        -z * z + (0.5 * erfcx(z)).ln()
    }
}

/// Density of N(mean, var) at x.
pub fn gauss_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    (-0.5 * d * d / var).exp() / (2.0 * PI * var).sqrt()
}

/// Σ Γ(m+1/2) x^m / (√π m!²) for x ≥ 0; all terms positive.
fn kummer_series_nonneg(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut m = 0.0_f64;
    loop {
        term *= x * (m + 0.5) / ((m + 1.0) * (m + 1.0));
        sum += term;
        m += 1.0;
        if m > x && term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// Confluent hypergeometric ₁F₁(x; 1/2, 1).
///
/// Negative arguments go through Kummer's transformation
/// ₁F₁(1/2; 1; x) = e^x ₁F₁(1/2; 1; −x), so the summed series never alternates.
pub fn kummer_half_one(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > KUMMER_OVERFLOW_GUARD {
        return Err(Error::Overflow {
            op: "specfun::kummer_half_one",
            arg: x,
        });
    }
    if x >= 0.0 {
        Ok(kummer_series_nonneg(x))
    } else {
        Ok(x.exp() * kummer_series_nonneg(-x))
    }
}

/// C(2m, m) / 2^{2m}, the m-th moment of the arcsine law on [0, 1].
pub fn central_binomial_weight(m: u32) -> f64 {
    (1..=m).fold(1.0, |acc, k| acc * (2 * k - 1) as f64 / (2 * k) as f64)
}

/// m ∫₀¹ y^{m−1} e^{−x y} dy for x ≥ 0.
///
/// Equals m! x^{−m} P(m, x) with P the regularized lower incomplete gamma;
/// at x = 0 it is 1.
pub fn incomplete_gamma_weight(m: u32, x: f64) -> Result<f64> {
    const OP: &str = "specfun::incomplete_gamma_weight";
    if m == 0 {
        return Err(Error::domain(OP, "m must be positive"));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(OP, format!("x = {x} must be finite and >= 0")));
    }
    let mf = m as f64;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x <= 600.0 {
        // m e^{-x} Σ_k x^k / (m (m+1) … (m+k))
        let mut term = 1.0 / mf;
        let mut sum = term;
        let mut k = 0.0;
        loop {
            term *= x / (mf + k + 1.0);
            sum += term;
            k += 1.0;
            if k > x && term < 1e-17 * sum {
                break;
            }
        }
        Ok(mf * (-x).exp() * sum)
    } else {
        let ln_fact: f64 = (1..=m).map(|k| (k as f64).ln()).sum();
        let lnx = x.ln();
        // upper tail e^{-x} Σ_{k<m} x^k/k!, in log space
        let mut q = 0.0;
        let mut ln_kfact = 0.0;
        for k in 0..m {
            if k > 0 {
                ln_kfact += (k as f64).ln();
            }
            q += (-x + k as f64 * lnx - ln_kfact).exp();
        }
        Ok((ln_fact - mf * lnx).exp() * (1.0 - q))
    }
}

/// ∫_lo^hi e^{−k s} / √s ds for 0 ≤ lo ≤ hi, k ≥ 0, via erf.
pub(crate) fn int_exp_over_sqrt(k: f64, lo: f64, hi: f64) -> f64 {
    if k == 0.0 {
        return 2.0 * (hi.sqrt() - lo.sqrt());
    }
    let rk = k.sqrt();
    (PI / k).sqrt() * (erf(rk * hi.sqrt()) - erf(rk * lo.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_arcsine_kernel, QuadratureBudget};
    use proptest::prelude::*;

    #[test]
    fn kummer_matches_arcsine_average() {
        // M(x) = (1/π) ∫₀¹ e^{xs} / √(s(1−s)) ds
        let b = QuadratureBudget::precise();
        for i in 0..=40 {
            let x = -50.0 + 2.5 * i as f64;
            let q = integrate_arcsine_kernel(|s| (x * s).exp(), 0.0, 1.0, b).unwrap() / std::f64::consts::PI;
            let k = kummer_half_one(x).unwrap();
            assert!((q - k).abs() <= 1e-9 * q.max(1.0), "{x}: {q} {k}");
        }
        let q = integrate_arcsine_kernel(f64::exp, 0.0, 1.0, b).unwrap() / std::f64::consts::PI;
        assert!((kummer_half_one(1.0).unwrap() - q).abs() < 1e-10);
    }

    /// Maclaurin series of erf, summed with enough terms for |x| ≤ 3.
    fn erf_taylor_oracle(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut pow = x;
        let mut fact = 1.0;
        for n in 0..200 {
            if n > 0 {
                fact *= n as f64;
                pow *= -x * x;
            }
            sum += pow / (fact * (2 * n + 1) as f64);
        }
        FRAC_2_SQRT_PI * sum
    }

    fn bessel_i0_oracle(x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            term *= (x / 2.0) * (x / 2.0) / (k as f64 * k as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn erf_reference_values() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(1.0) - 0.842_700_792_9).abs() < 1e-10);
        assert!((erf(1.0) - erf_taylor_oracle(1.0)).abs() < 1e-12);
        assert!((erf(6.0) - 1.0).abs() <= 1e-15);
        for &x in &[0.1, 0.5, 1.3, 2.2, 2.49, 2.51, 2.9] {
            assert!(
                (erf(x) - erf_taylor_oracle(x)).abs() < 1e-13,
                "x = {x}: {} vs {}",
                erf(x),
                erf_taylor_oracle(x)
            );
        }
    }

    #[test]
    fn erfc_tail_is_relative_accurate() {
        // erfc(5) = 1.5374597944280348e-12
        let v = erfc(5.0);
        assert!((v / 1.537_459_794_428_034_8e-12 - 1.0).abs() < 1e-12);
        assert!((erfc(-1.0) - (1.0 + erf(1.0))).abs() < 1e-15);
    }

    #[test]
    fn gauss_cdf_values() {
        assert_eq!(gauss_cdf(0.0), 0.5);
        assert!((gauss_cdf(1.0) - 0.841_344_746_1).abs() < 1e-10);
        assert!((gauss_cdf(-1.3) - (1.0 - gauss_cdf(1.3))).abs() < 1e-15);
        // ln Φ(-10) = -53.23128515051247
        assert!((ln_gauss_cdf(-10.0) + 53.231_285_150_512_47).abs() < 1e-10);
        assert!((ln_gauss_cdf(-4.9) - gauss_cdf(-4.9).ln()).abs() < 1e-12);
    }

    #[test]
    fn kummer_identities() {
        assert_eq!(kummer_half_one(0.0).unwrap(), 1.0);
        let expected = 2.0_f64.exp() * bessel_i0_oracle(2.0);
        assert!((kummer_half_one(4.0).unwrap() / expected - 1.0).abs() < 1e-13);
        for &x in &[-40.0f64, -3.0, 0.5, 12.0, 45.0] {
            let expected = (x / 2.0).exp() * bessel_i0_oracle(x / 2.0);
            let got = kummer_half_one(x).unwrap();
            assert!((got / expected - 1.0).abs() < 1e-12, "x = {x}");
        }
        assert!(matches!(
            kummer_half_one(701.0),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn central_binomial_weight_values() {
        assert_eq!(central_binomial_weight(0), 1.0);
        assert_eq!(central_binomial_weight(1), 0.5);
        assert_eq!(central_binomial_weight(2), 0.375);
        for m in 0..60u32 {
            let r = central_binomial_weight(m + 1) / central_binomial_weight(m);
            let exact = (2 * m + 1) as f64 / (2 * m + 2) as f64;
            assert!((r - exact).abs() < 1e-15);
        }
    }

    #[test]
    fn incomplete_gamma_weight_branches() {
        // m = 1: (1 - e^{-x}) / x
        for &x in &[1e-8, 0.3, 5.0, 80.0, 599.0, 601.0, 5000.0] {
            let v = incomplete_gamma_weight(1, x).unwrap();
            let exact = -(-x).exp_m1() / x;
            assert!((v / exact - 1.0).abs() < 1e-13, "x = {x}");
        }
        // m = 3: 3 (2 - e^{-x}(x² + 2x + 2)) / x³
        let x: f64 = 2.0;
        let exact = 3.0 * (2.0 - (-x).exp() * (x * x + 2.0 * x + 2.0)) / x.powi(3);
        assert!((incomplete_gamma_weight(3, x).unwrap() - exact).abs() < 1e-14);
        assert_eq!(incomplete_gamma_weight(4, 0.0).unwrap(), 1.0);
        assert!(incomplete_gamma_weight(0, 1.0).is_err());
    }

    #[test]
    fn int_exp_over_sqrt_matches_limit() {
        assert!((int_exp_over_sqrt(0.0, 0.0, 1.0) - 2.0).abs() < 1e-15);
        let tiny = int_exp_over_sqrt(1e-14, 0.25, 1.0);
        assert!((tiny - 1.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn erf_is_odd_and_bounded(x in -8.0f64..8.0) {
            prop_assert_eq!(erf(-x), -erf(x));
            prop_assert!(erf(x).abs() <= 1.0);
            prop_assert!((erf(x) + erfc(x) - 1.0).abs() <= 1e-15);
        }

        #[test]
        fn erf_is_monotone(x in -6.0f64..6.0, dx in 1e-6f64..0.5) {
            prop_assert!(erf(x + dx) >= erf(x));
        }

        #[test]
        fn kummer_is_increasing(x in -200.0f64..200.0, dx in 1e-3f64..1.0) {
            let a = kummer_half_one(x).unwrap();
            let b = kummer_half_one(x + dx).unwrap();
            prop_assert!(a > 0.0 && b > a);
        }
    }
}
