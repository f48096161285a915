//! Monte Carlo oracle for every random time in the crate.
//!
//! Paths are simulated per shard with an independent ChaCha8 stream. With
//! `bridge_correction` on, every event is drawn from its exact conditional
//! law: last zeros from the time-reversed bridge, maxima by refining paths
//! only where an extreme can still occur, and returns from inverse Gaussian
//! hitting times. With it off, paths are plain grids of exact Gaussian
//! increments and events are read off the grid.
//!
//! Shard `i` of seed `s` uses the stream seeded by
//! `splitmix64(s + (i + 1) · 0x9E3779B97F4A7C15)`; results are concatenated
//! in shard order, so output depends only on `(seed, shards, paths, dt)`.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, InverseGaussian, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::iterated::NestedSpec;
use crate::reflmax::{BarrierBox, MaxKind};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x2D7A_11CE_5EED_0001;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const COARSE_INTERVALS: usize = 32;
const BOTH_SIDES_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub paths: usize,
    pub dt: f64,
    pub seed: u64,
    pub shards: usize,
    pub bridge_correction: bool,
    /// Cap on worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            paths: 200_000,
            dt: 1e-4,
            seed: DEFAULT_SEED,
            shards: 16,
            bridge_correction: true,
            threads: None,
        }
    }
}

impl McConfig {
    pub fn new(paths: usize, dt: f64) -> Self {
        Self {
            paths,
            dt,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_shards(mut self, shards: usize) -> Self {
        self.shards = shards;
        self
    }

    pub fn with_bridge_correction(mut self, on: bool) -> Self {
        self.bridge_correction = on;
        self
    }

    pub fn with_threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    /// Checks the configuration against horizon `t`.
    pub fn validate(&self, t: f64) -> Result<()> {
        if self.paths < 1000 {
            return Err(Error::McConfig(format!("paths must be >= 1000, got {}", self.paths)));
        }
        if self.shards == 0 {
            return Err(Error::McConfig("shards must be >= 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::McConfig("threads must be >= 1".into()));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::McConfig(format!("horizon must be positive, got {t}")));
        }
        if !(self.dt > 0.0) || self.dt > t / 100.0 {
            return Err(Error::McConfig(format!(
                "dt must lie in (0, t/100] = (0, {}], got {}",
                t / 100.0,
                self.dt
            )));
        }
        Ok(())
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of shard `shard` under master seed `seed`.
pub fn shard_seed(seed: u64, shard: usize) -> u64 {
    splitmix64(seed.wrapping_add((shard as u64 + 1).wrapping_mul(GOLDEN)))
}

fn run_shards<T, F>(cfg: &McConfig, per_path: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let base = cfg.paths / cfg.shards;
    let extra = cfg.paths % cfg.shards;
    let work = || {
        (0..cfg.shards)
            .into_par_iter()
            .map(|i| {
                let n = base + usize::from(i < extra);
                let mut rng = ChaCha8Rng::seed_from_u64(shard_seed(cfg.seed, i));
                (0..n).map(|_| per_path(&mut rng)).collect::<Vec<T>>()
            })
            .collect::<Vec<Vec<T>>>()
    };
    let shards = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::McConfig(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    Ok(shards.into_iter().flatten().collect())
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Uniform on (0, 1].
fn open_uniform<R: Rng>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Last zero on [0, h] of a path from 0 conditioned to end at `x_end`.
/// Reversed in time this is the first zero of a path from `x_end`, whose
/// hitting time of 0 given the return is h x²/(x² + h N²).
fn bridge_last_zero<R: Rng>(rng: &mut R, h: f64, x_end: f64) -> f64 {
    let x2 = x_end * x_end;
    if x2 == 0.0 {
        return h;
    }
    let n = normal(rng);
    h * h * n * n / (x2 + h * n * n)
}

/// Exact last zero on [0, h] with drift, plus the endpoint.
fn exact_last_zero<R: Rng>(rng: &mut R, mu: f64, h: f64) -> (f64, f64) {
    let x = mu * h + h.sqrt() * normal(rng);
    (bridge_last_zero(rng, h, x), x)
}

/// Last sign change on a grid of step `dt`, plus the endpoint.
fn grid_last_zero<R: Rng>(rng: &mut R, mu: f64, h: f64, dt: f64) -> (f64, f64) {
    let n = (h / dt).ceil().max(1.0) as usize;
    let step = h / n as f64;
    let sd = step.sqrt();
    let mut x = 0.0;
    let mut last = 0usize;
    for i in 0..n {
        let y = x + mu * step + sd * normal(rng);
        if x * y <= 0.0 {
            last = i;
        }
        x = y;
    }
    ((last as f64 + rng.random::<f64>()) * step, x)
}

fn last_zero_once<R: Rng>(rng: &mut R, mu: f64, h: f64, cfg: &McConfig, res: f64) -> (f64, f64) {
    if cfg.bridge_correction {
        exact_last_zero(rng, mu, h)
    } else {
        grid_last_zero(rng, mu, h, res)
    }
}

/// Samples of the last zero of B^μ before `t`.
pub fn sample_last_zero(mu: f64, t: f64, cfg: &McConfig) -> Result<Vec<f64>> {
    cfg.validate(t)?;
    run_shards(cfg, |rng| last_zero_once(rng, mu, t, cfg, cfg.dt).0)
}

/// First zero after `t`, or censoring at the horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReturnSample {
    At(f64),
    Censored,
}

impl ReturnSample {
    /// The time, with censoring mapped to +∞.
    pub fn as_time(self) -> f64 {
        match self {
            ReturnSample::At(b) => b,
            ReturnSample::Censored => f64::INFINITY,
        }
    }
}

/// Hitting time of zero from `x` under drift `mu`; `None` if it never happens.
fn hitting_time_of_zero<R: Rng>(rng: &mut R, mu: f64, x: f64) -> Option<f64> {
    let d = x.abs();
    if d == 0.0 {
        return Some(0.0);
    }
    // Drift of the distance to zero while it stays positive
    let away = mu * x.signum();
    if away == 0.0 {
        let z: f64 = normal(rng);
        return Some(d * d / (z * z));
    }
    if away > 0.0 && rng.random::<f64>() >= (-2.0 * away * d).exp() {
        return None;
    }
    let ig = InverseGaussian::new(d / away.abs(), d * d).ok()?;
    Some(ig.sample(rng))
}

fn first_return_once<R: Rng>(
    rng: &mut R,
    mu: f64,
    t: f64,
    horizon: f64,
    x_t: f64,
    cfg: &McConfig,
) -> ReturnSample {
    if cfg.bridge_correction {
        return match hitting_time_of_zero(rng, mu, x_t) {
            Some(s) if t + s <= horizon => ReturnSample::At(t + s),
            _ => ReturnSample::Censored,
        };
    }
    let sd = cfg.dt.sqrt();
    let mut x = x_t;
    let mut s = t;
    while s < horizon {
        let y = x + mu * cfg.dt + sd * normal(rng);
        if x * y <= 0.0 {
            return ReturnSample::At((s + cfg.dt * rng.random::<f64>()).min(horizon));
        }
        x = y;
        s += cfg.dt;
    }
    ReturnSample::Censored
}

fn check_horizon(t: f64, horizon: f64) -> Result<()> {
    if !(horizon > t) {
        return Err(Error::McConfig(format!("horizon {horizon} must exceed t = {t}")));
    }
    Ok(())
}

/// Samples of the first zero after `t`, censored beyond `horizon`.
pub fn sample_first_return_after(mu: f64, t: f64, horizon: f64, cfg: &McConfig) -> Result<Vec<ReturnSample>> {
    cfg.validate(t)?;
    check_horizon(t, horizon)?;
    let sd = t.sqrt();
    run_shards(cfg, |rng| {
        let x_t = mu * t + sd * normal(rng);
        first_return_once(rng, mu, t, horizon, x_t, cfg)
    })
}

/// Joint samples of (last zero before `t`, first zero after `t`).
pub fn sample_joint(mu: f64, t: f64, horizon: f64, cfg: &McConfig) -> Result<Vec<(f64, ReturnSample)>> {
    cfg.validate(t)?;
    check_horizon(t, horizon)?;
    run_shards(cfg, |rng| {
        let (a, x_t) = last_zero_once(rng, mu, t, cfg, cfg.dt);
        (a, first_return_once(rng, mu, t, horizon, x_t, cfg))
    })
}

struct Segment {
    x0: f64,
    x1: f64,
    h: f64,
}

fn coarse_grid<R: Rng>(rng: &mut R, mu: f64, t: f64) -> Vec<f64> {
    let h = t / COARSE_INTERVALS as f64;
    let sd = h.sqrt();
    let mut xs = Vec::with_capacity(COARSE_INTERVALS + 1);
    xs.push(0.0);
    let mut x = 0.0;
    for _ in 0..COARSE_INTERVALS {
        x += mu * h + sd * normal(rng);
        xs.push(x);
    }
    xs
}

/// Maximum of a bridge of length `h` from `x0` to `x1`.
fn bridge_max<R: Rng>(rng: &mut R, x0: f64, x1: f64, h: f64) -> f64 {
    let d = x1 - x0;
    0.5 * (x0 + x1 + (d * d - 2.0 * h * open_uniform(rng).ln()).sqrt())
}

/// max |B^μ| on [0, t] from a coarse grid and exact bridge extremes.
///
/// Each segment's maximum and minimum are drawn independently. That is exact
/// for max |B| unless both can beat the running bound on one segment; such
/// segments are bisected until that chance is below `BOTH_SIDES_TOL`.
fn exact_max_abs<R: Rng>(rng: &mut R, mu: f64, t: f64) -> f64 {
    let xs = coarse_grid(rng, mu, t);
    let h0 = t / COARSE_INTERVALS as f64;
    let mut best = xs.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut pending: Vec<Segment> = xs
        .windows(2)
        .map(|w| Segment { x0: w[0], x1: w[1], h: h0 })
        .collect();
    let mut settled = Vec::with_capacity(pending.len());
    while let Some(seg) = pending.pop() {
        let up = level_cross(best, seg.x0, seg.x1, seg.h);
        let down = level_cross(best, -seg.x0, -seg.x1, seg.h);
        if up.min(down) < BOTH_SIDES_TOL {
            settled.push(seg);
            continue;
        }
        let h = 0.5 * seg.h;
        let xm = 0.5 * (seg.x0 + seg.x1) + (0.5 * h).sqrt() * normal(rng);
        best = best.max(xm.abs());
        pending.push(Segment { x0: seg.x0, x1: xm, h });
        pending.push(Segment { x0: xm, x1: seg.x1, h });
    }
    for seg in settled {
        let hi = bridge_max(rng, seg.x0, seg.x1, seg.h);
        let lo = bridge_max(rng, -seg.x0, -seg.x1, seg.h);
        best = best.max(hi).max(lo);
    }
    best
}

fn grid_max_abs<R: Rng>(rng: &mut R, mu: f64, t: f64, dt: f64) -> f64 {
    let n = (t / dt).ceil().max(1.0) as usize;
    let step = t / n as f64;
    let sd = step.sqrt();
    let mut x = 0.0_f64;
    let mut best = 0.0_f64;
    for _ in 0..n {
        x += mu * step + sd * normal(rng);
        best = best.max(x.abs());
    }
    best
}

fn max_abs_once<R: Rng>(rng: &mut R, mu: f64, t: f64, cfg: &McConfig) -> f64 {
    if cfg.bridge_correction {
        exact_max_abs(rng, mu, t)
    } else {
        grid_max_abs(rng, mu, t, cfg.dt)
    }
}

fn onesided_max_once<R: Rng>(rng: &mut R, mu: f64, t: f64, cfg: &McConfig) -> f64 {
    if cfg.bridge_correction {
        let x = mu * t + t.sqrt() * normal(rng);
        return bridge_max(rng, 0.0, x, t);
    }
    let n = (t / cfg.dt).ceil().max(1.0) as usize;
    let step = t / n as f64;
    let sd = step.sqrt();
    let mut x = 0.0_f64;
    let mut best = 0.0_f64;
    for _ in 0..n {
        x += mu * step + sd * normal(rng);
        best = best.max(x);
    }
    best
}

/// Samples of max_{s≤t} |B^μ(s)|.
pub fn sample_max_abs(mu: f64, t: f64, cfg: &McConfig) -> Result<Vec<f64>> {
    cfg.validate(t)?;
    run_shards(cfg, |rng| max_abs_once(rng, mu, t, cfg))
}

/// Samples of max_{s≤t} B^μ(s).
pub fn sample_max_onesided(mu: f64, t: f64, cfg: &McConfig) -> Result<Vec<f64>> {
    cfg.validate(t)?;
    run_shards(cfg, |rng| onesided_max_once(rng, mu, t, cfg))
}

/// Crossing probability of level `c` by a bridge from `x0` to `x1` strictly below it.
fn level_cross(c: f64, x0: f64, x1: f64, h: f64) -> f64 {
    (-2.0 * (c - x0) * (c - x1) / h).exp()
}

fn confined_once<R: Rng>(rng: &mut R, mu: f64, t: f64, bx: BarrierBox, res: f64) -> Option<f64> {
    let inside = |x: f64| x > bx.alpha && x < bx.beta;
    let xs = coarse_grid(rng, mu, t);
    if !xs.iter().all(|&x| inside(x)) {
        return None;
    }
    let h0 = t / COARSE_INTERVALS as f64;
    let mut stack: Vec<Segment> = xs
        .windows(2)
        .map(|w| Segment { x0: w[0], x1: w[1], h: h0 })
        .collect();
    while let Some(seg) = stack.pop() {
        let up = level_cross(bx.beta, seg.x0, seg.x1, seg.h);
        let down = level_cross(-bx.alpha, -seg.x0, -seg.x1, seg.h);
        let p = up + down - up * down;
        if p < 1e-17 {
            continue;
        }
        if seg.h <= res {
            if rng.random::<f64>() < p {
                return None;
            }
            continue;
        }
        let h = 0.5 * seg.h;
        let xm = 0.5 * (seg.x0 + seg.x1) + (0.5 * h).sqrt() * normal(rng);
        if !inside(xm) {
            return None;
        }
        stack.push(Segment { x0: seg.x0, x1: xm, h });
        stack.push(Segment { x0: xm, x1: seg.x1, h });
    }
    xs.last().copied()
}

/// Endpoint of B^μ(t) for paths that stay inside the box, `None` otherwise.
pub fn sample_confined(mu: f64, t: f64, bx: BarrierBox, cfg: &McConfig) -> Result<Vec<Option<f64>>> {
    cfg.validate(t)?;
    run_shards(cfg, |rng| {
        if cfg.bridge_correction {
            confined_once(rng, mu, t, bx, cfg.dt)
        } else {
            let n = (t / cfg.dt).ceil().max(1.0) as usize;
            let step = t / n as f64;
            let sd = step.sqrt();
            let mut x = 0.0_f64;
            let mut ok = true;
            for _ in 0..n {
                x += mu * step + sd * normal(rng);
                ok &= x > bx.alpha && x < bx.beta;
            }
            ok.then_some(x)
        }
    })
}

/// Samples of the nested last zero: starting from h = t, each drift from the
/// last to the first replaces h by the last zero of its motion before h.
/// Resolution scales with the current horizon.
pub fn sample_nested(spec: &NestedSpec, cfg: &McConfig) -> Result<Vec<f64>> {
    cfg.validate(spec.t)?;
    let rel = cfg.dt / spec.t;
    run_shards(cfg, |rng| {
        let mut h = spec.t;
        for &mu in spec.drifts.iter().rev() {
            if h <= 0.0 {
                break;
            }
            h = last_zero_once(rng, mu, h, cfg, rel * h).0;
        }
        h
    })
}

/// Samples of the last zero of B^μ before max_{s≤t} |B₂(s)|, B₂ driftless.
pub fn sample_iterated_last_zero(mu: f64, t: f64, cfg: &McConfig) -> Result<Vec<f64>> {
    sample_iterated_last_zero_with(mu, 0.0, t, MaxKind::AbsMax, cfg)
}

/// As [`sample_iterated_last_zero`] with a drifted inner motion and a choice
/// of absolute or one-sided running maximum.
pub fn sample_iterated_last_zero_with(
    mu1: f64,
    mu2: f64,
    t: f64,
    kind: MaxKind,
    cfg: &McConfig,
) -> Result<Vec<f64>> {
    cfg.validate(t)?;
    let rel = cfg.dt / t;
    run_shards(cfg, |rng| {
        let h = match kind {
            MaxKind::AbsMax => max_abs_once(rng, mu2, t, cfg),
            MaxKind::OneSidedMax => onesided_max_once(rng, mu2, t, cfg),
        };
        if h <= 0.0 {
            return 0.0;
        }
        last_zero_once(rng, mu1, h, cfg, rel * h.min(t)).0
    })
}

/// Exact samples of B₁^{μ₁}(|B₂^{μ₂}(t)|).
pub fn sample_iterated_bm(mu1: f64, mu2: f64, t: f64, cfg: &McConfig) -> Result<Vec<f64>> {
    cfg.validate(t)?;
    run_shards(cfg, |rng| {
        let s = (mu2 * t + t.sqrt() * normal(rng)).abs();
        mu1 * s + s.sqrt() * normal(rng)
    })
}

/// Functional estimated from a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    /// Empirical P(X ≤ x).
    CdfAt(f64),
    Moment(u32),
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Standard deviation of the summands (divisor n) over √n.
    pub std_error: f64,
    pub n: usize,
}

impl Estimate {
    /// Deviation from `target` in standard errors; infinite when the
    /// standard error vanishes and the value differs.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = self.value - target;
        if self.std_error > 0.0 {
            d / self.std_error
        } else if d == 0.0 {
            0.0
        } else {
            d.signum() * f64::INFINITY
        }
    }

    pub fn within(&self, target: f64, sigmas: f64, allowance: f64) -> bool {
        (self.value - target).abs() <= sigmas * self.std_error + allowance
    }
}

/// Plug-in estimate of a functional with its standard error.
pub fn estimate(samples: &[f64], functional: Functional) -> Result<Estimate> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let f = |s: f64| match functional {
        Functional::CdfAt(x) => f64::from(u8::from(s <= x)),
        Functional::Moment(m) => s.powi(m as i32),
        Functional::Mean => s,
    };
    let n = samples.len();
    let nf = n as f64;
    let mean = samples.iter().map(|&s| f(s)).sum::<f64>() / nf;
    let var = samples.iter().map(|&s| (f(s) - mean).powi(2)).sum::<f64>() / nf;
    Ok(Estimate {
        value: mean,
        std_error: (var / nf).sqrt(),
        n,
    })
}

/// Estimate over first-return samples with censoring treated as +∞.
pub fn estimate_returns(samples: &[ReturnSample], functional: Functional) -> Result<Estimate> {
    let times: Vec<f64> = samples.iter().map(|s| s.as_time()).collect();
    estimate(&times, functional)
}

/// Fraction of censored samples.
pub fn censored_fraction(samples: &[ReturnSample]) -> Result<Estimate> {
    let flags: Vec<f64> = samples
        .iter()
        .map(|s| f64::from(u8::from(*s == ReturnSample::Censored)))
        .collect();
    estimate(&flags, Functional::Mean)
}

/// Writes samples as a one-column CSV with header `sample`.
pub fn write_samples_csv<W: Write>(mut w: W, samples: &[f64]) -> io::Result<()> {
    writeln!(w, "sample")?;
    for s in samples {
        writeln!(w, "{s:?}")?;
    }
    Ok(())
}

/// As [`write_samples_csv`], writing `censored` for censored returns.
pub fn write_return_samples_csv<W: Write>(mut w: W, samples: &[ReturnSample]) -> io::Result<()> {
    writeln!(w, "sample")?;
    for s in samples {
        match s {
            ReturnSample::At(b) => writeln!(w, "{b:?}")?,
            ReturnSample::Censored => writeln!(w, "censored")?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(paths: usize) -> McConfig {
        McConfig::new(paths, 1e-3).with_shards(4)
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(999, 1e-3).validate(1.0).is_err());
        assert!(McConfig::new(1000, 0.02).validate(1.0).is_err());
        assert!(McConfig::new(1000, 0.01).validate(1.0).is_ok());
        assert!(small(1000).with_shards(0).validate(1.0).is_err());
        assert!(matches!(sample_last_zero(0.0, 1.0, &McConfig::new(10, 1e-3)), Err(Error::McConfig(_))));
    }

    #[test]
    fn shard_seeds_differ() {
        let s: Vec<u64> = (0..64).map(|i| shard_seed(DEFAULT_SEED, i)).collect();
        for i in 0..s.len() {
            for j in 0..i {
                assert_ne!(s[i], s[j]);
            }
        }
    }

    #[test]
    fn estimate_basics() {
        assert!(matches!(estimate(&[], Functional::Mean), Err(Error::EmptySample)));
        let c = estimate(&[2.5; 10], Functional::Mean).unwrap();
        assert_eq!((c.value, c.std_error), (2.5, 0.0));
        let coin: Vec<f64> = (0..1000).map(|i| f64::from(i % 2)).collect();
        let e = estimate(&coin, Functional::CdfAt(0.5)).unwrap();
        assert_eq!(e.value, 0.5);
        assert!((e.std_error - 0.5 / 1000f64.sqrt()).abs() < 1e-15);
        let xs = [0.3, 1.7, 2.2, 0.1];
        assert_eq!(
            estimate(&xs, Functional::Moment(1)).unwrap(),
            estimate(&xs, Functional::Mean).unwrap()
        );
    }

    #[test]
    fn samples_stay_in_range() {
        let cfg = small(2000);
        assert!(sample_last_zero(0.7, 2.0, &cfg).unwrap().iter().all(|&a| (0.0..=2.0).contains(&a)));
        assert!(sample_max_abs(0.7, 2.0, &cfg).unwrap().iter().all(|&m| m > 0.0));
        for s in sample_first_return_after(1.0, 1.0, 3.0, &cfg).unwrap() {
            if let ReturnSample::At(b) = s {
                assert!(b > 1.0 && b <= 3.0);
            }
        }
        let spec = NestedSpec::driftless(3, 1.0).unwrap();
        assert!(sample_nested(&spec, &cfg).unwrap().iter().all(|&a| (0.0..=1.0).contains(&a)));
    }

    #[test]
    fn deterministic_across_thread_caps() {
        let cfg = small(3000);
        let a = sample_last_zero(1.0, 1.0, &cfg).unwrap();
        let b = sample_last_zero(1.0, 1.0, &cfg.with_threads(Some(1))).unwrap();
        let c = sample_last_zero(1.0, 1.0, &cfg.with_threads(Some(3))).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        let d = sample_last_zero(1.0, 1.0, &cfg.with_seed(7)).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn csv_export() {
        let mut buf = Vec::new();
        write_return_samples_csv(&mut buf, &[ReturnSample::At(1.5), ReturnSample::Censored]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "sample\n1.5\ncensored\n");
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, &[0.1, 2.0]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "sample\n0.1\n2.0\n");
    }
}
