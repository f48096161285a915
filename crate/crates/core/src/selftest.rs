//! Analytic-versus-oracle self checks.
//!
//! Every check is deterministic for a given seed, so two runs of a suite
//! produce identical reports.

use crate::error::Result;
use crate::iterated::{iter_last_zero_cdf, nfold_mgf, nfold_moment, NestedSpec};
use crate::jointlaw::p_never_return;
use crate::lastzero::{last_zero_cdf, last_zero_cdf_with, last_zero_moment, CdfForm, DriftClock};
use crate::mcoracle::{
    censored_fraction, estimate, sample_first_return_after, sample_iterated_last_zero, sample_last_zero,
    sample_max_abs, sample_nested, Estimate, Functional, McConfig,
};
use crate::quad::QuadratureBudget;
use crate::reflmax::{bridge_max_abs_cdf, bridge_max_abs_cdf_ratio, max_abs_cdf, ImageWeights, SeriesBudget};
use crate::report::{Cell, RunReport};
use crate::specfun::{erf, kummer_half_one};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Quick,
    Full,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Quick => "quick",
            Suite::Full => "full",
        }
    }

    fn paths(self) -> usize {
        match self {
            Suite::Quick => 20_000,
            Suite::Full => 200_000,
        }
    }
}

/// Report plus the number of failed checks.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfTestOutcome {
    pub report: RunReport,
    pub failures: usize,
}

impl SelfTestOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Checks {
    report: RunReport,
    failures: usize,
}

impl Checks {
    fn exact(&mut self, name: &str, expected: f64, observed: f64, tol: f64) {
        self.row(name, expected, observed, 0.0, tol);
    }

    fn mc(&mut self, name: &str, expected: f64, e: Estimate) {
        self.row(name, expected, e.value, e.std_error, 3.0 * e.std_error);
    }

    fn row(&mut self, name: &str, expected: f64, observed: f64, se: f64, tol: f64) {
        let pass = (observed - expected).abs() <= tol;
        if !pass {
            self.failures += 1;
        }
        self.report.push(vec![
            Cell::from(name),
            expected.into(),
            observed.into(),
            se.into(),
            tol.into(),
            Cell::from(if pass { "pass" } else { "fail" }),
        ]);
    }
}

/// Alternating Kolmogorov–Smirnov series 1 + 2 Σ (−1)^r e^{−2r²x²}.
fn ks_series(x: f64) -> f64 {
    let mut s = 1.0;
    for r in 1..200 {
        let r = r as f64;
        let term = 2.0 * (-2.0 * r * r * x * x).exp();
        s += if r as i64 % 2 == 1 { -term } else { term };
        if term < 1e-18 {
            break;
        }
    }
    s
}

fn clock(mu: f64, t: f64) -> Result<DriftClock> {
    DriftClock::new(mu, t)
}

fn analytic_checks(c: &mut Checks) -> Result<()> {
    let qb = QuadratureBudget::default();
    let sb = SeriesBudget::default();
    c.exact("arcsine at a = t/4", 1.0 / 3.0, last_zero_cdf(clock(0.0, 1.0)?, 0.25)?, 1e-12);
    let k = clock(1.0, 2.0)?;
    let y = last_zero_cdf_with(k, 0.7, CdfForm::IntegralY, qb)?;
    c.exact("cdf forms s vs y", y, last_zero_cdf_with(k, 0.7, CdfForm::IntegralS, qb)?, 1e-8);
    c.exact("cdf forms angular vs y", y, last_zero_cdf_with(k, 0.7, CdfForm::Angular, qb)?, 1e-8);
    c.exact(
        "drifted mean closed form",
        1.0 - (-0.5f64).exp(),
        last_zero_moment(clock(1.0, 1.0)?, 1)?,
        1e-12,
    );
    c.exact("n-fold mgf at depth one", kummer_half_one(0.8)?, nfold_mgf(1, 2.0, 0.4)?, 1e-12);
    c.exact("gamma limit at a = 2", erf(1.0), last_zero_cdf(clock(1.0, 1e4)?, 2.0)?, 1e-3);
    c.exact("never returns mu 1 t 2", erf(1.0), p_never_return(clock(1.0, 2.0)?), 1e-14);
    c.exact("bridge max KS series", ks_series(1.0), bridge_max_abs_cdf(1.0, 1.0, sb)?, 1e-12);
    c.exact(
        "bridge ratio drift invariance",
        bridge_max_abs_cdf_ratio(clock(0.0, 1.0)?, 1.0, sb, ImageWeights::Girsanov)?,
        bridge_max_abs_cdf_ratio(clock(1.5, 1.0)?, 1.0, sb, ImageWeights::Girsanov)?,
        1e-8,
    );
    c.exact("n-fold mean n = 2", 0.25, nfold_moment(2, 1, 1.0)?, 0.0);
    c.exact("n-fold second moment n = 3", 0.375f64.powi(3), nfold_moment(3, 2, 1.0)?, 1e-17);
    Ok(())
}

fn mc_checks(c: &mut Checks, suite: Suite, base: McConfig) -> Result<()> {
    let sb = SeriesBudget::default();
    let qb = QuadratureBudget::default();
    let cfg = McConfig { paths: suite.paths(), ..base };

    let k = clock(1.0, 1.0)?;
    let s = sample_last_zero(1.0, 1.0, &cfg)?;
    let points: Vec<f64> = match suite {
        Suite::Quick => vec![0.5],
        Suite::Full => (1..=10).map(|i| 0.095 * i as f64).collect(),
    };
    for a in points {
        let e = estimate(&s, Functional::CdfAt(a))?;
        c.mc(&format!("mc last zero mu 1 a {a}"), last_zero_cdf(k, a)?, e);
    }

    let mus: &[f64] = match suite {
        Suite::Quick => &[1.0],
        Suite::Full => &[0.0, 1.0],
    };
    let betas: &[f64] = match suite {
        Suite::Quick => &[1.0],
        Suite::Full => &[0.6, 0.9, 1.2, 1.6, 2.2],
    };
    for &mu in mus {
        let s = sample_max_abs(mu, 1.0, &cfg)?;
        for &beta in betas {
            let e = estimate(&s, Functional::CdfAt(beta))?;
            c.mc(&format!("mc max abs mu {mu} beta {beta}"), max_abs_cdf(clock(mu, 1.0)?, beta, sb)?, e);
        }
    }

    let horizon = 50.0;
    let s = sample_first_return_after(1.0, 2.0, horizon, &cfg)?;
    let target = last_zero_cdf(clock(1.0, horizon)?, 2.0)?;
    c.mc("mc censored return mu 1 t 2", target, censored_fraction(&s)?);

    if suite == Suite::Full {
        let s = sample_iterated_last_zero(1.0, 1.0, &cfg)?;
        for a in [0.2, 0.5, 0.8, 1.2, 1.8] {
            let e = estimate(&s, Functional::CdfAt(a))?;
            c.mc(&format!("mc iterated last zero a {a}"), iter_last_zero_cdf(1.0, 1.0, a, qb, sb)?, e);
        }
        for n in 1..=3 {
            let s = sample_nested(&NestedSpec::driftless(n, 1.0)?, &cfg)?;
            for m in 1..=2u32 {
                let e = estimate(&s, Functional::Moment(m))?;
                c.mc(&format!("mc nested n {n} moment {m}"), nfold_moment(n, m, 1.0)?, e);
            }
        }
    }
    Ok(())
}

/// Runs a suite; `base` supplies seed, step, shards and thread cap.
pub fn run_suite(suite: Suite, base: McConfig) -> Result<SelfTestOutcome> {
    let mut report = RunReport::new(
        format!("selftest {}", suite.name()),
        &["check", "expected", "observed", "std_error", "tolerance", "verdict"],
    );
    report.param("suite", suite.name());
    report.param("seed", base.seed.to_string());
    report.param("paths", suite.paths().to_string());
    report.param("dt", crate::report::format_number(base.dt));
    let mut checks = Checks { report, failures: 0 };
    analytic_checks(&mut checks)?;
    mc_checks(&mut checks, suite, base)?;
    Ok(SelfTestOutcome {
        report: checks.report,
        failures: checks.failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_oracle_value() {
        assert!((ks_series(1.0) - 0.7300003283).abs() < 1e-9);
    }

    #[test]
    fn quick_suite_passes_and_repeats() {
        let a = run_suite(Suite::Quick, McConfig::default()).unwrap();
        let b = run_suite(Suite::Quick, McConfig::default()).unwrap();
        assert!(a.passed(), "{}", a.report.to_csv());
        assert_eq!(a.report.to_csv(), b.report.to_csv());
    }
}
