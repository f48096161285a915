use zerocross::iterated::{
    iter_last_zero_cdf, iter_last_zero_cdf_drifted_inner, iterated_bm_pdf, nested_last_zero_cdf, NestedSpec,
};
use zerocross::jointlaw::{joint_survival, p_never_return, ReturnTime};
use zerocross::lastzero::{arcsine_cdf, last_zero_cdf, DriftClock};
use zerocross::mcoracle::*;
use zerocross::quad::{integrate_adaptive, QuadratureBudget};
use zerocross::reflmax::{
    max_abs_cdf, max_onesided_cdf, two_barrier_density, BarrierBox, ImageWeights, MaxKind, SeriesBudget,
};
use zerocross::specfun::erf;

fn cfg() -> McConfig {
    McConfig::new(40_000, 1e-4)
}

fn clock(mu: f64, t: f64) -> DriftClock {
    DriftClock::new(mu, t).unwrap()
}

// Several points are checked per sample, so 4σ keeps false alarms rare.
fn assert_close(e: Estimate, target: f64, what: &str) {
    assert!(e.within(target, 4.0, 0.0), "{what}: {} ± {} vs {target}", e.value, e.std_error);
}

#[test]
fn driftless_last_zero_is_arcsine() {
    let s = sample_last_zero(0.0, 1.0, &cfg()).unwrap();
    assert_close(estimate(&s, Functional::CdfAt(0.5)).unwrap(), 0.5, "cdf");
    assert_close(estimate(&s, Functional::Mean).unwrap(), 0.5, "mean");
    assert_close(estimate(&s, Functional::CdfAt(0.1)).unwrap(), arcsine_cdf(1.0, 0.1), "cdf 0.1");
}

#[test]
fn drifted_last_zero_curve() {
    let s = sample_last_zero(1.0, 1.0, &cfg()).unwrap();
    for i in 1..=10 {
        let a = 0.095 * i as f64;
        let e = estimate(&s, Functional::CdfAt(a)).unwrap();
        assert_close(e, last_zero_cdf(clock(1.0, 1.0), a).unwrap(), &format!("a = {a}"));
    }
}

#[test]
fn bridge_correction_reduces_bias() {
    let coarse = McConfig::new(20_000, 0.01);
    let exact = sample_last_zero(0.0, 1.0, &coarse).unwrap();
    let naive = sample_last_zero(0.0, 1.0, &coarse.with_bridge_correction(false)).unwrap();
    let mut err_exact = 0.0;
    let mut err_naive = 0.0;
    for &a in &[0.3, 0.6, 0.9] {
        let g = arcsine_cdf(1.0, a);
        err_exact += (estimate(&exact, Functional::CdfAt(a)).unwrap().value - g).abs();
        err_naive += (estimate(&naive, Functional::CdfAt(a)).unwrap().value - g).abs();
    }
    assert!(err_exact < err_naive, "{err_exact} vs {err_naive}");
}

#[test]
fn shard_count_changes_samples_not_law() {
    let a = sample_last_zero(1.0, 1.0, &cfg()).unwrap();
    let b = sample_last_zero(1.0, 1.0, &cfg().with_shards(5)).unwrap();
    assert_ne!(a, b);
    let ea = estimate(&a, Functional::CdfAt(0.4)).unwrap();
    let eb = estimate(&b, Functional::CdfAt(0.4)).unwrap();
    let se = (ea.std_error.powi(2) + eb.std_error.powi(2)).sqrt();
    assert!((ea.value - eb.value).abs() <= 3.0 * se);
}

#[test]
fn censored_returns() {
    let c = McConfig::new(20_000, 1e-3);
    let s = sample_first_return_after(0.0, 1.0, 1e8, &c).unwrap();
    assert!(censored_fraction(&s).unwrap().value < 1e-3);

    let s = sample_first_return_after(1.0, 2.0, 50.0, &cfg()).unwrap();
    let frac = censored_fraction(&s).unwrap();
    assert_close(frac, erf(1.0), "never returns");
    assert!((p_never_return(clock(1.0, 2.0)) - erf(1.0)).abs() < 1e-15);
}

#[test]
fn joint_cells_match_survival_differences() {
    let (mu, t, horizon) = (0.8, 1.0, 40.0);
    let s = sample_joint(mu, t, horizon, &cfg()).unwrap();
    let c = clock(mu, t);
    // P(A ≤ a, B ≤ b) = G(a; t) − G(a; b)
    let cell_cdf = |a: f64, b: f64| {
        last_zero_cdf(c, a).unwrap() - joint_survival(c, a, ReturnTime::Finite(b)).unwrap()
    };
    for &(a0, a1) in &[(0.2, 0.5), (0.5, 0.9)] {
        for &(b0, b1) in &[(1.0, 1.5), (1.5, 3.0)] {
            let p = cell_cdf(a1, b1) - cell_cdf(a0, b1) - cell_cdf(a1, b0) + cell_cdf(a0, b0);
            let flags: Vec<f64> = s
                .iter()
                .map(|&(a, b)| {
                    let b = b.as_time();
                    f64::from(u8::from(a > a0 && a <= a1 && b > b0 && b <= b1))
                })
                .collect();
            let e = estimate(&flags, Functional::Mean).unwrap();
            assert_close(e, p, &format!("cell a ({a0},{a1}] b ({b0},{b1}]"));
        }
    }
}

#[test]
fn max_abs_against_series() {
    for &mu in &[0.0, 1.0] {
        let s = sample_max_abs(mu, 1.0, &cfg()).unwrap();
        for &beta in &[0.6, 1.0, 1.5, 2.5] {
            let e = estimate(&s, Functional::CdfAt(beta)).unwrap();
            let f = max_abs_cdf(clock(mu, 1.0), beta, SeriesBudget::default()).unwrap();
            assert_close(e, f, &format!("mu = {mu}, beta = {beta}"));
        }
        assert!(estimate(&s, Functional::CdfAt(6.0)).unwrap().value > 0.999);
    }
}

#[test]
fn onesided_max_against_formula() {
    let s = sample_max_onesided(-0.5, 2.0, &cfg()).unwrap();
    for &beta in &[0.3, 1.0, 2.0] {
        let e = estimate(&s, Functional::CdfAt(beta)).unwrap();
        assert_close(e, max_onesided_cdf(clock(-0.5, 2.0), beta, 0.0).unwrap(), "one-sided");
    }
}

#[test]
fn confinement_against_two_barrier_density() {
    let bx = BarrierBox::new(-0.7, 1.2).unwrap();
    let c = clock(0.6, 1.0);
    let s = sample_confined(0.6, 1.0, bx, &cfg()).unwrap();
    for &(lo, hi) in &[(-0.7, 0.0), (0.0, 1.2), (0.2, 0.6)] {
        let p = integrate_adaptive(
            |y| two_barrier_density(c, bx, y, SeriesBudget::default(), ImageWeights::Girsanov).unwrap_or(0.0),
            lo,
            hi,
            QuadratureBudget::default(),
        )
        .unwrap();
        let flags: Vec<f64> = s
            .iter()
            .map(|y| f64::from(u8::from(matches!(y, Some(y) if *y > lo && *y <= hi))))
            .collect();
        assert_close(estimate(&flags, Functional::Mean).unwrap(), p, &format!("({lo}, {hi})"));
    }
}

#[test]
fn nested_moments() {
    let s2 = sample_nested(&NestedSpec::driftless(2, 1.0).unwrap(), &cfg()).unwrap();
    assert_close(estimate(&s2, Functional::Mean).unwrap(), 0.25, "n = 2 mean");
    let s3 = sample_nested(&NestedSpec::driftless(3, 1.0).unwrap(), &cfg()).unwrap();
    assert_close(estimate(&s3, Functional::Moment(2)).unwrap(), 0.375f64.powi(3), "n = 3 second moment");
}

#[test]
fn drifted_nested_cdf() {
    let spec = NestedSpec::new(vec![1.0, 0.5], 1.0).unwrap();
    let s = sample_nested(&spec, &cfg()).unwrap();
    for &a in &[0.05, 0.2, 0.5] {
        let e = estimate(&s, Functional::CdfAt(a)).unwrap();
        let g = nested_last_zero_cdf(1.0, 0.5, 1.0, a, QuadratureBudget::default()).unwrap();
        assert_close(e, g, &format!("a = {a}"));
    }
}

#[test]
fn iterated_last_zero() {
    let qb = QuadratureBudget::default();
    let sb = SeriesBudget::default();
    let s = sample_iterated_last_zero(1.0, 1.0, &cfg()).unwrap();
    for &a in &[0.1, 0.3, 0.6, 1.0, 1.5] {
        let e = estimate(&s, Functional::CdfAt(a)).unwrap();
        assert_close(e, iter_last_zero_cdf(1.0, 1.0, a, qb, sb).unwrap(), &format!("a = {a}"));
    }
    let s = sample_iterated_last_zero_with(0.5, 0.8, 1.0, MaxKind::OneSidedMax, &cfg()).unwrap();
    for &a in &[0.1, 0.5, 1.2] {
        let e = estimate(&s, Functional::CdfAt(a)).unwrap();
        let g = iter_last_zero_cdf_drifted_inner(0.5, 0.8, 1.0, a, MaxKind::OneSidedMax, qb, sb).unwrap();
        assert_close(e, g, &format!("one-sided a = {a}"));
    }
}

#[test]
fn iterated_bm_composition() {
    let s = sample_iterated_bm(1.0, 0.5, 1.0, &cfg()).unwrap();
    let qb = QuadratureBudget::default();
    for &x in &[-0.5, 0.0, 0.8] {
        let p = integrate_adaptive(|y| iterated_bm_pdf(1.0, 0.5, 1.0, y, qb).unwrap(), -12.0, x, qb).unwrap();
        assert_close(estimate(&s, Functional::CdfAt(x)).unwrap(), p, &format!("x = {x}"));
    }
}
