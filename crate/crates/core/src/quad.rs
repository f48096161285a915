//! Adaptive Gauss–Kronrod quadrature with inverse-square-root endpoint handling.
//!
//! Every integral in this crate is either smooth on a finite interval, has a
//! `1/√(s−lo)` or `1/√(hi−s)` factor at one or both ends, or runs over a
//! half-line against a decaying exponential. The helpers below reduce each
//! case to [`integrate_adaptive`] on an analytic integrand.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::error::{Error, Result};

/// Tolerances and limits for one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureBudget {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth of any subinterval.
    pub max_depth: u32,
    /// Cooperative cancellation point, checked between subdivisions.
    pub deadline: Option<Instant>,
}

impl Default for QuadratureBudget {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_depth: 40,
            deadline: None,
        }
    }
}

impl QuadratureBudget {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32) -> Result<Self> {
        if !(abs_tol > 0.0) || !(rel_tol > 0.0) || max_depth == 0 {
            return Err(Error::domain(
                "quad::QuadratureBudget",
                "tolerances must be positive and max_depth >= 1",
            ));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_depth,
            deadline: None,
        })
    }

    /// Budget used internally by the closed-form laws.
    pub fn precise() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-13,
            max_depth: 50,
            deadline: None,
        }
    }

    pub fn with_deadline(mut self, deadline: Instant) -> Self {
        self.deadline = Some(deadline);
        self
    }

    /// Same tolerances split over `parts` pieces, for sums of integrals.
    pub(crate) fn share(self, parts: f64) -> Self {
        Self {
            abs_tol: self.abs_tol / parts,
            ..self
        }
    }
}

/// Hard cap on the number of live subintervals.
const MAX_SEGMENTS: usize = 20_000;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Rule {
    value: f64,
    error: f64,
    /// ∫|f|, used for the roundoff floor.
    resabs: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Rule {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for (j, wg) in WG.iter().take(3).enumerate() {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += wg * (f1 + f2);
        resk += WGK[jtw] * (f1 + f2);
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(floor);
    }
    Rule {
        value,
        error,
        resabs,
    }
}

struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    resabs: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn segment<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, depth: u32) -> Segment {
    let r = gk15(f, lo, hi);
    Segment {
        lo,
        hi,
        value: r.value,
        error: r.error,
        resabs: r.resabs,
        depth,
    }
}

/// Global adaptive G7/K15 integration of `f` over `[lo, hi]`.
///
/// The subinterval with the largest error estimate is bisected until the
/// summed estimate falls below `max(abs_tol, rel_tol·|I|)`. Subintervals whose
/// error is already at the roundoff floor are not split further.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    budget: QuadratureBudget,
) -> Result<f64> {
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::domain(
            "quad::integrate_adaptive",
            format!("need finite lo <= hi, got [{lo}, {hi}]"),
        ));
    }
    if lo == hi {
        return Ok(0.0);
    }
    let first = segment(&f, lo, hi, 0);
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    // error held by segments stopped at the depth or segment cap
    let mut capped_err = 0.0;

    loop {
        if !total.is_finite() {
            return Err(Error::domain(
                "quad::integrate_adaptive",
                "integrand produced a non-finite value",
            ));
        }
        let tol = budget.abs_tol.max(budget.rel_tol * total.abs());
        if total_err <= tol {
            return Ok(total);
        }
        if let Some(deadline) = budget.deadline {
            if Instant::now() >= deadline {
                return Err(Error::Deadline);
            }
        }
        let Some(worst) = heap.pop() else {
            return if capped_err > tol {
                Err(Error::QuadratureBudget {
                    estimate: total,
                    error_bound: total_err,
                })
            } else {
                Ok(total)
            };
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        let at_floor = worst.error <= 50.0 * f64::EPSILON * worst.resabs
            || mid <= worst.lo
            || mid >= worst.hi;
        if at_floor {
            continue;
        }
        if worst.depth >= budget.max_depth || heap.len() >= MAX_SEGMENTS {
            capped_err += worst.error;
            continue;
        }
        let left = segment(&f, worst.lo, mid, worst.depth + 1);
        let right = segment(&f, mid, worst.hi, worst.depth + 1);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
}

/// ∫_lo^hi g(s)/√(s−lo) ds, computed as 2∫₀^√(hi−lo) g(lo+u²) du.
pub fn integrate_left_sqrt_singular<G: Fn(f64) -> f64>(
    g: G,
    lo: f64,
    hi: f64,
    budget: QuadratureBudget,
) -> Result<f64> {
    check_order("quad::integrate_left_sqrt_singular", lo, hi)?;
    let r = integrate_adaptive(|u| g(lo + u * u), 0.0, (hi - lo).sqrt(), budget.share(2.0))?;
    Ok(2.0 * r)
}

/// ∫_lo^hi g(s)/√(hi−s) ds, computed as 2∫₀^√(hi−lo) g(hi−u²) du.
pub fn integrate_right_sqrt_singular<G: Fn(f64) -> f64>(
    g: G,
    lo: f64,
    hi: f64,
    budget: QuadratureBudget,
) -> Result<f64> {
    check_order("quad::integrate_right_sqrt_singular", lo, hi)?;
    let r = integrate_adaptive(|u| g(hi - u * u), 0.0, (hi - lo).sqrt(), budget.share(2.0))?;
    Ok(2.0 * r)
}

/// ∫_lo^hi g(s)/√((s−lo)(hi−s)) ds.
///
/// Split at the midpoint; each half carries one singular endpoint and the
/// other factor is folded into `g`.
pub fn integrate_arcsine_kernel<G: Fn(f64) -> f64>(
    g: G,
    lo: f64,
    hi: f64,
    budget: QuadratureBudget,
) -> Result<f64> {
    check_order("quad::integrate_arcsine_kernel", lo, hi)?;
    if lo == hi {
        return Ok(0.0);
    }
    let mid = 0.5 * (lo + hi);
    let half = budget.share(2.0);
    let left = integrate_left_sqrt_singular(|s| g(s) / (hi - s).sqrt(), lo, mid, half)?;
    let right = integrate_right_sqrt_singular(|s| g(s) / (s - lo).sqrt(), mid, hi, half)?;
    Ok(left + right)
}

/// ∫_lo^∞ f(s) ds via s = lo + u/(1−u).
///
/// The integrand must decay at least like an exponential or a power faster
/// than 1/s; every caller in this crate integrates against e^{−μ²s/2} or a
/// Gaussian kernel.
pub fn integrate_half_line<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    budget: QuadratureBudget,
) -> Result<f64> {
    if !lo.is_finite() {
        return Err(Error::domain("quad::integrate_half_line", "lo must be finite"));
    }
    integrate_adaptive(
        |u| {
            let w = 1.0 - u;
            let v = f(lo + u / w) / (w * w);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        budget,
    )
}

fn check_order(op: &'static str, lo: f64, hi: f64) -> Result<()> {
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::domain(op, format!("need finite lo <= hi, got [{lo}, {hi}]")));
    }
    Ok(())
}
