//! Command-line front end.
//!
//! Every leaf subcommand maps onto one library operation. Real-valued flags
//! accept a single value (`--a 0.3`) or a closed grid (`--a-grid 0:1:11`);
//! rows are the cartesian product of all given values.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::iterated::{
    iter_last_zero_cdf_drifted_inner, iterated_bm_pdf, nested_last_zero_cdf, nested_last_zero_pdf, nfold_last_zero_pdf,
    nfold_mgf, nfold_moment, NestedSpec,
};
use crate::jointlaw::{
    cond_last_given_return_pdf, cond_return_given_last_pdf, joint_pdf, joint_survival, p_never_return,
    p_never_return_given_last, return_time_pdf, straddle_length_pdf, ReturnTime,
};
use crate::lastzero::{
    last_zero_cdf, last_zero_cdf_infinite_horizon, last_zero_cdf_with, last_zero_mgf_with, last_zero_moment,
    last_zero_pdf_with, CdfForm, DriftClock, PdfForm,
};
use crate::mcoracle::{
    estimate, sample_first_return_after, sample_iterated_last_zero_with, sample_last_zero, sample_max_abs,
    sample_nested, write_return_samples_csv, write_samples_csv, Estimate, Functional, McConfig, ReturnSample,
    DEFAULT_SEED,
};
use crate::quad::QuadratureBudget;
use crate::reflmax::{
    bridge_max_abs_cdf, bridge_max_abs_cdf_ratio, max_abs_cdf_with, max_onesided_cdf, two_barrier_density,
    BarrierBox, ImageWeights, MaxKind, SeriesBudget,
};
use crate::report::{format_number, Cell, Format, RunReport};
use crate::selftest::{run_suite, Suite};

#[derive(Parser, Debug)]
#[command(name = "zerocross", version, about = "Zero-crossing laws of drifted Brownian motion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Last zero before a fixed horizon.
    Lastzero {
        #[command(subcommand)]
        op: LastzeroOp,
    },
    /// Last zero before and first zero after a fixed time.
    Joint {
        #[command(subcommand)]
        op: JointOp,
    },
    /// Barrier densities and running maxima.
    Reflmax {
        #[command(subcommand)]
        op: ReflmaxOp,
    },
    /// Iterated and nested constructions.
    Iter {
        #[command(subcommand)]
        op: IterOp,
    },
    /// Shorthand for the driftless n-fold operations of `iter`.
    Nfold {
        #[command(subcommand)]
        op: NfoldOp,
    },
    /// Monte Carlo estimates next to the analytic values.
    Mc {
        #[command(subcommand)]
        op: McOp,
    },
    /// Analytic-versus-Monte-Carlo checks.
    Selftest(SelftestArgs),
}

#[derive(Subcommand, Debug)]
enum LastzeroOp {
    /// P(T < a) [--mu --t --a, --form s|y|angular]
    Cdf(Params),
    /// Density [--mu --t --a, --form y|s]
    Pdf(Params),
    /// E[T^m] [--mu --t --m]
    Moment(Params),
    /// E[exp(gamma T)] [--mu --t --gamma]
    Mgf(Params),
    /// Infinite-horizon limit law [--mu --a]
    Limit(Params),
}

#[derive(Subcommand, Debug)]
enum JointOp {
    /// P(last zero < a, return > b); no --b means never returns [--mu --t --a --b]
    Survival(Params),
    /// Joint density [--mu --t --a --b]
    Pdf(Params),
    /// Density of the first zero after t [--mu --t --b]
    ReturnPdf(Params),
    /// P(no zero after t); with --a, given the last zero [--mu --t (--a)]
    Never(Params),
    /// Density of the last zero given the return [--t --a --b]
    CondA(Params),
    /// Density of the return given the last zero [--mu --t --a --b]
    CondB(Params),
    /// Density of the straddling excursion length [--mu --t --w]
    Straddle(Params),
}

#[derive(Subcommand, Debug)]
enum ReflmaxOp {
    /// Density at x of paths kept inside (alpha, beta) [--mu --t --alpha --beta --x]
    Triple(Params),
    /// P(max |B| < beta) [--mu --t --beta]
    Maxabs(Params),
    /// P(max (x + B) < beta) [--mu --t --beta (--x)]
    Onesided(Params),
    /// Brownian bridge P(max |B| < beta); with --mu, the density-ratio route [--t --beta (--mu)]
    Bridge(Params),
}

#[derive(Subcommand, Debug)]
enum IterOp {
    /// Density of B1(|B2(t)|) [--mu --mu2 --t --x]
    Pdf(Params),
    /// Last zero before the inner running maximum [--mu --t --a (--mu2 --onesided)]
    Lastzero(Params),
    /// Last zero before another last zero [--mu --mu2 --t --a (--density)]
    Nested(Params),
    /// Driftless n-fold density [--n --t --a]
    NfoldPdf(Params),
    /// Driftless n-fold moment [--n --m --t]
    NfoldMoment(Params),
    /// Driftless n-fold MGF [--n --t --alpha]
    NfoldMgf(Params),
}

#[derive(Subcommand, Debug)]
enum NfoldOp {
    /// Same as `iter nfold-pdf`
    Pdf(Params),
    /// Same as `iter nfold-moment`
    Moment(Params),
    /// Same as `iter nfold-mgf`
    Mgf(Params),
}

impl From<NfoldOp> for IterOp {
    fn from(op: NfoldOp) -> Self {
        match op {
            NfoldOp::Pdf(p) => IterOp::NfoldPdf(p),
            NfoldOp::Moment(p) => IterOp::NfoldMoment(p),
            NfoldOp::Mgf(p) => IterOp::NfoldMgf(p),
        }
    }
}

#[derive(Subcommand, Debug)]
enum McOp {
    /// Last-zero CDF [--mu --t --a]
    Lastzero(Params),
    /// P(first zero after t > b), horizon = largest b [--mu --t --b]
    Return(Params),
    /// P(max |B| < beta) [--mu --t --beta]
    Maxabs(Params),
    /// Depth-2 CDF with --a [--mu --mu2 --t], else driftless moment [--n --m --t]
    Nested(Params),
    /// Iterated last-zero CDF [--mu --t --a (--mu2 --onesided)]
    Iterated(Params),
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[arg(value_enum)]
    suite_pos: Option<SuiteArg>,
    #[arg(long, value_enum)]
    suite: Option<SuiteArg>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SuiteArg {
    Quick,
    Full,
}

#[derive(ValueEnum, Debug, Clone, Copy, Default)]
enum FormatArg {
    #[default]
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum FormArg {
    S,
    Y,
    Angular,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum WeightsArg {
    Girsanov,
    PerImageTilt,
}

/// Closed grid `lo:hi:n`.
#[derive(Debug, Clone, PartialEq)]
struct Grid {
    text: String,
    points: Vec<f64>,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(format!("grid must be lo:hi:n, got {s:?}"));
        };
        let lo: f64 = lo.parse().map_err(|_| format!("bad grid start {lo:?}"))?;
        let hi: f64 = hi.parse().map_err(|_| format!("bad grid end {hi:?}"))?;
        let n: usize = n.parse().map_err(|_| format!("bad grid count {n:?}"))?;
        if n == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err("grid needs finite ends and n >= 1".into());
        }
        if n == 1 && lo != hi {
            return Err("a one-point grid needs lo == hi".into());
        }
        let points = (0..n)
            .map(|i| {
                if i + 1 == n {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect();
        Ok(Grid {
            text: s.to_owned(),
            points,
        })
    }
}

#[derive(Args, Debug, Clone, Default)]
struct Params {
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    #[arg(long = "mu-grid", allow_hyphen_values = true, conflicts_with = "mu")]
    mu_grid: Option<Grid>,
    #[arg(long, allow_negative_numbers = true)]
    mu2: Option<f64>,
    #[arg(long = "mu2-grid", allow_hyphen_values = true, conflicts_with = "mu2")]
    mu2_grid: Option<Grid>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long = "t-grid", conflicts_with = "t")]
    t_grid: Option<Grid>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long = "a-grid", conflicts_with = "a")]
    a_grid: Option<Grid>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long = "b-grid", conflicts_with = "b")]
    b_grid: Option<Grid>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long = "beta-grid", allow_hyphen_values = true, conflicts_with = "beta")]
    beta_grid: Option<Grid>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long = "alpha-grid", allow_hyphen_values = true, conflicts_with = "alpha")]
    alpha_grid: Option<Grid>,
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
    #[arg(long = "x-grid", allow_hyphen_values = true, conflicts_with = "x")]
    x_grid: Option<Grid>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long = "gamma-grid", allow_hyphen_values = true, conflicts_with = "gamma")]
    gamma_grid: Option<Grid>,
    #[arg(long)]
    w: Option<f64>,
    #[arg(long = "w-grid", conflicts_with = "w")]
    w_grid: Option<Grid>,
    /// Depth (number of nested last zeros).
    #[arg(long)]
    n: Option<usize>,
    /// Moment order.
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Quadrature and series tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Integration route for lastzero cdf/pdf.
    #[arg(long, value_enum)]
    form: Option<FormArg>,
    /// Image weights for reflmax triple/maxabs/bridge.
    #[arg(long, value_enum)]
    weights: Option<WeightsArg>,
    /// Use the one-sided inner maximum.
    #[arg(long)]
    onesided: bool,
    /// Report the density instead of the CDF (iter nested).
    #[arg(long)]
    density: bool,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    shards: Option<usize>,
    /// Read events off the grid instead of the exact bridge.
    #[arg(long = "no-bridge")]
    no_bridge: bool,
    /// Write the raw samples as CSV.
    #[arg(long)]
    samples: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Var {
    Mu,
    Mu2,
    T,
    A,
    B,
    Beta,
    Alpha,
    X,
    Gamma,
    W,
}

impl Var {
    fn name(self) -> &'static str {
        match self {
            Var::Mu => "mu",
            Var::Mu2 => "mu2",
            Var::T => "t",
            Var::A => "a",
            Var::B => "b",
            Var::Beta => "beta",
            Var::Alpha => "alpha",
            Var::X => "x",
            Var::Gamma => "gamma",
            Var::W => "w",
        }
    }
}

enum CliError {
    Usage(String),
    Numeric(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// One evaluation point of a sweep.
struct Point(BTreeMap<Var, f64>);

impl Point {
    fn get(&self, v: Var) -> f64 {
        self.0[&v]
    }

    fn opt(&self, v: Var) -> Option<f64> {
        self.0.get(&v).copied()
    }
}

impl Params {
    fn values(&self, v: Var) -> Option<Vec<f64>> {
        let (single, grid) = match v {
            Var::Mu => (self.mu, &self.mu_grid),
            Var::Mu2 => (self.mu2, &self.mu2_grid),
            Var::T => (self.t, &self.t_grid),
            Var::A => (self.a, &self.a_grid),
            Var::B => (self.b, &self.b_grid),
            Var::Beta => (self.beta, &self.beta_grid),
            Var::Alpha => (self.alpha, &self.alpha_grid),
            Var::X => (self.x, &self.x_grid),
            Var::Gamma => (self.gamma, &self.gamma_grid),
            Var::W => (self.w, &self.w_grid),
        };
        grid.as_ref().map(|g| g.points.clone()).or(single.map(|s| vec![s]))
    }

    fn echo(&self, v: Var) -> Option<String> {
        let grid = match v {
            Var::Mu => &self.mu_grid,
            Var::Mu2 => &self.mu2_grid,
            Var::T => &self.t_grid,
            Var::A => &self.a_grid,
            Var::B => &self.b_grid,
            Var::Beta => &self.beta_grid,
            Var::Alpha => &self.alpha_grid,
            Var::X => &self.x_grid,
            Var::Gamma => &self.gamma_grid,
            Var::W => &self.w_grid,
        };
        match grid {
            Some(g) => Some(g.text.clone()),
            None => self.values(v).map(|s| format_number(s[0])),
        }
    }

    fn format(&self) -> Format {
        match self.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }

    fn quad(&self) -> CliResult<QuadratureBudget> {
        match self.tol {
            None => Ok(QuadratureBudget::default()),
            Some(tol) => Ok(QuadratureBudget::new(tol, tol, 50)?),
        }
    }

    fn series(&self) -> CliResult<SeriesBudget> {
        match self.tol {
            None => Ok(SeriesBudget::default()),
            Some(tol) if tol > 0.0 => Ok(SeriesBudget {
                tail_tol: tol,
                ..SeriesBudget::default()
            }),
            Some(tol) => Err(CliError::Usage(format!("--tol must be positive, got {tol}"))),
        }
    }

    fn weights(&self) -> ImageWeights {
        match self.weights {
            Some(WeightsArg::PerImageTilt) => ImageWeights::PerImageTilt,
            _ => ImageWeights::Girsanov,
        }
    }

    fn kind(&self) -> MaxKind {
        if self.onesided {
            MaxKind::OneSidedMax
        } else {
            MaxKind::AbsMax
        }
    }

    fn need_n(&self) -> CliResult<usize> {
        self.n.ok_or_else(|| CliError::Usage("missing required flag --n".into()))
    }

    fn need_m(&self) -> CliResult<u32> {
        self.m.ok_or_else(|| CliError::Usage("missing required flag --m".into()))
    }

    fn mc_config(&self) -> McConfig {
        let d = McConfig::default();
        McConfig {
            paths: self.paths.unwrap_or(d.paths),
            dt: self.dt.unwrap_or(d.dt),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            shards: self.shards.unwrap_or(d.shards),
            bridge_correction: !self.no_bridge,
            threads: self.threads,
        }
    }
}

/// Cartesian sweep over `required` and `optional` variables, in `Var` order.
struct Sweep {
    vars: Vec<Var>,
    points: Vec<Point>,
}

fn sweep(p: &Params, required: &[Var], optional: &[Var]) -> CliResult<Sweep> {
    let mut vars: Vec<(Var, Vec<f64>)> = Vec::new();
    for &v in required {
        let vals = p
            .values(v)
            .ok_or_else(|| CliError::Usage(format!("missing required flag --{} (or --{}-grid)", v.name(), v.name())))?;
        vars.push((v, vals));
    }
    for &v in optional {
        if let Some(vals) = p.values(v) {
            vars.push((v, vals));
        }
    }
    vars.sort_by_key(|(v, _)| *v);
    let mut points = vec![BTreeMap::new()];
    for (v, vals) in &vars {
        let mut next = Vec::with_capacity(points.len() * vals.len());
        for base in &points {
            for &x in vals {
                let mut q = base.clone();
                q.insert(*v, x);
                next.push(q);
            }
        }
        points = next;
    }
    Ok(Sweep {
        vars: vars.into_iter().map(|(v, _)| v).collect(),
        points: points.into_iter().map(Point).collect(),
    })
}

struct Table {
    sweep: Sweep,
    extra: Vec<(&'static str, f64)>,
    report: RunReport,
}

impl Table {
    fn new(
        command: &str,
        params: &Params,
        required: &[Var],
        optional: &[Var],
        extra: Vec<(&'static str, f64)>,
        outputs: &[&str],
    ) -> CliResult<Self> {
        let sweep = sweep(params, required, optional)?;
        let mut columns: Vec<&str> = sweep.vars.iter().map(|v| v.name()).collect();
        columns.extend(extra.iter().map(|(n, _)| *n));
        columns.extend_from_slice(outputs);
        let mut report = RunReport::new(command, &columns);
        for v in &sweep.vars {
            report.param(v.name(), params.echo(*v).unwrap_or_default());
        }
        for (n, x) in &extra {
            report.param(*n, format_number(*x));
        }
        Ok(Self {
            sweep,
            extra,
            report,
        })
    }

    fn with_param(mut self, name: &str, value: impl Into<String>) -> Self {
        self.report.param(name, value);
        self
    }

    /// One analytic value per point.
    fn fill(mut self, f: impl Fn(&Point) -> CliResult<f64>) -> CliResult<RunReport> {
        for pt in &self.sweep.points {
            let v = f(pt)?;
            let mut row: Vec<Cell> = self.sweep.vars.iter().map(|x| pt.get(*x).into()).collect();
            row.extend(self.extra.iter().map(|(_, x)| Cell::from(*x)));
            row.push(v.into());
            self.report.push(row);
        }
        Ok(self.report)
    }

    /// Analytic value and Monte Carlo estimate per point.
    fn fill_mc(mut self, mut f: impl FnMut(&Point) -> CliResult<(f64, Estimate)>) -> CliResult<RunReport> {
        for pt in &self.sweep.points {
            let (analytic, e) = f(pt)?;
            let mut row: Vec<Cell> = self.sweep.vars.iter().map(|x| pt.get(*x).into()).collect();
            row.extend(self.extra.iter().map(|(_, x)| Cell::from(*x)));
            row.extend([analytic.into(), e.value.into(), e.std_error.into(), e.z_score(analytic).into()]);
            self.report.push(row);
        }
        Ok(self.report)
    }
}

fn clock(mu: f64, t: f64) -> CliResult<DriftClock> {
    Ok(DriftClock::new(mu, t)?)
}

use Var::*;

fn lastzero(op: LastzeroOp) -> CliResult<(RunReport, Format)> {
    let out = |p: &Params, r: RunReport| (r, p.format());
    Ok(match op {
        LastzeroOp::Cdf(p) => {
            let qb = p.quad()?;
            let form = match p.form {
                Some(FormArg::S) => CdfForm::IntegralS,
                Some(FormArg::Angular) => CdfForm::Angular,
                _ => CdfForm::IntegralY,
            };
            let r = Table::new("lastzero cdf", &p, &[Mu, T, A], &[], vec![], &["value"])?
                .fill(|x| Ok(last_zero_cdf_with(clock(x.get(Mu), x.get(T))?, x.get(A), form, qb)?))?;
            out(&p, r)
        }
        LastzeroOp::Pdf(p) => {
            let qb = p.quad()?;
            let form = match p.form {
                Some(FormArg::S) => PdfForm::IntegralS,
                Some(FormArg::Angular) => {
                    return Err(CliError::Usage("pdf forms are y and s".into()));
                }
                _ => PdfForm::IntegralY,
            };
            let r = Table::new("lastzero pdf", &p, &[Mu, T, A], &[], vec![], &["value"])?
                .fill(|x| Ok(last_zero_pdf_with(clock(x.get(Mu), x.get(T))?, x.get(A), form, qb)?))?;
            out(&p, r)
        }
        LastzeroOp::Moment(p) => {
            let m = p.need_m()?;
            let r = Table::new("lastzero moment", &p, &[Mu, T], &[], vec![("m", f64::from(m))], &["value"])?
                .fill(|x| Ok(last_zero_moment(clock(x.get(Mu), x.get(T))?, m)?))?;
            out(&p, r)
        }
        LastzeroOp::Mgf(p) => {
            let qb = p.quad()?;
            let r = Table::new("lastzero mgf", &p, &[Mu, T, Gamma], &[], vec![], &["value"])?
                .fill(|x| Ok(last_zero_mgf_with(clock(x.get(Mu), x.get(T))?, x.get(Gamma), qb)?))?;
            out(&p, r)
        }
        LastzeroOp::Limit(p) => {
            let r = Table::new("lastzero limit", &p, &[Mu, A], &[], vec![], &["value"])?
                .fill(|x| Ok(last_zero_cdf_infinite_horizon(x.get(Mu), x.get(A))?))?;
            out(&p, r)
        }
    })
}

/// Single analytic value per point.
fn analytic(
    name: &str,
    p: &Params,
    required: &[Var],
    optional: &[Var],
    f: impl Fn(&Point) -> CliResult<f64>,
) -> CliResult<(RunReport, Format)> {
    let r = Table::new(name, p, required, optional, vec![], &["value"])?.fill(f)?;
    Ok((r, p.format()))
}

fn joint(op: JointOp) -> CliResult<(RunReport, Format)> {
    match op {
        JointOp::Survival(p) => analytic("joint survival", &p, &[Mu, T, A], &[B], |x| {
            let b = x.opt(B).map_or(ReturnTime::Never, ReturnTime::Finite);
            Ok(joint_survival(clock(x.get(Mu), x.get(T))?, x.get(A), b)?)
        }),
        JointOp::Pdf(p) => analytic("joint pdf", &p, &[Mu, T, A, B], &[], |x| {
            Ok(joint_pdf(clock(x.get(Mu), x.get(T))?, x.get(A), x.get(B))?)
        }),
        JointOp::ReturnPdf(p) => analytic("joint return-pdf", &p, &[Mu, T, B], &[], |x| {
            Ok(return_time_pdf(clock(x.get(Mu), x.get(T))?, x.get(B))?)
        }),
        JointOp::Never(p) => analytic("joint never", &p, &[Mu, T], &[A], |x| {
            let c = clock(x.get(Mu), x.get(T))?;
            Ok(match x.opt(A) {
                Some(a) => p_never_return_given_last(c, a)?,
                None => p_never_return(c),
            })
        }),
        JointOp::CondA(p) => analytic("joint cond-a", &p, &[T, A, B], &[], |x| {
            Ok(cond_last_given_return_pdf(x.get(T), x.get(A), x.get(B))?)
        }),
        JointOp::CondB(p) => analytic("joint cond-b", &p, &[Mu, T, A, B], &[], |x| {
            Ok(cond_return_given_last_pdf(clock(x.get(Mu), x.get(T))?, x.get(A), x.get(B))?)
        }),
        JointOp::Straddle(p) => analytic("joint straddle", &p, &[Mu, T, W], &[], |x| {
            Ok(straddle_length_pdf(clock(x.get(Mu), x.get(T))?, x.get(W))?)
        }),
    }
}

fn reflmax(op: ReflmaxOp) -> CliResult<(RunReport, Format)> {
    match op {
        ReflmaxOp::Triple(p) => {
            let sb = p.series()?;
            let w = p.weights();
            let r = Table::new("reflmax triple", &p, &[Mu, T, Beta, Alpha, X], &[], vec![], &["value"])?.fill(|x| {
                let bx = BarrierBox::new(x.get(Alpha), x.get(Beta))?;
                Ok(two_barrier_density(clock(x.get(Mu), x.get(T))?, bx, x.get(X), sb, w)?)
            })?;
            Ok((r, p.format()))
        }
        ReflmaxOp::Maxabs(p) => {
            let sb = p.series()?;
            let w = p.weights();
            let r = Table::new("reflmax maxabs", &p, &[Mu, T, Beta], &[], vec![], &["value"])?
                .fill(|x| Ok(max_abs_cdf_with(clock(x.get(Mu), x.get(T))?, x.get(Beta), sb, w)?))?;
            Ok((r, p.format()))
        }
        ReflmaxOp::Onesided(p) => {
            let r = Table::new("reflmax onesided", &p, &[Mu, T, Beta], &[X], vec![], &["value"])?.fill(|x| {
                Ok(max_onesided_cdf(clock(x.get(Mu), x.get(T))?, x.get(Beta), x.opt(X).unwrap_or(0.0))?)
            })?;
            Ok((r, p.format()))
        }
        ReflmaxOp::Bridge(p) => {
            let sb = p.series()?;
            let w = p.weights();
            let r = Table::new("reflmax bridge", &p, &[T, Beta], &[Mu], vec![], &["value"])?.fill(|x| {
                Ok(match x.opt(Mu) {
                    Some(mu) => bridge_max_abs_cdf_ratio(clock(mu, x.get(T))?, x.get(Beta), sb, w)?,
                    None => bridge_max_abs_cdf(x.get(T), x.get(Beta), sb)?,
                })
            })?;
            Ok((r, p.format()))
        }
    }
}

fn iter(op: IterOp) -> CliResult<(RunReport, Format)> {
    match op {
        IterOp::Pdf(p) => {
            let qb = p.quad()?;
            let r = Table::new("iter pdf", &p, &[Mu, T, X], &[Mu2], vec![], &["value"])?
                .fill(|x| Ok(iterated_bm_pdf(x.get(Mu), x.opt(Mu2).unwrap_or(0.0), x.get(T), x.get(X), qb)?))?;
            Ok((r, p.format()))
        }
        IterOp::Lastzero(p) => {
            let (qb, sb, kind) = (p.quad()?, p.series()?, p.kind());
            let r = Table::new("iter lastzero", &p, &[Mu, T, A], &[Mu2], vec![], &["value"])?
                .with_param("inner_max", if p.onesided { "onesided" } else { "abs" })
                .fill(|x| {
                    let mu2 = x.opt(Mu2).unwrap_or(0.0);
                    Ok(iter_last_zero_cdf_drifted_inner(x.get(Mu), mu2, x.get(T), x.get(A), kind, qb, sb)?)
                })?;
            Ok((r, p.format()))
        }
        IterOp::Nested(p) => {
            let qb = p.quad()?;
            let density = p.density;
            let name = if density { "iter nested pdf" } else { "iter nested" };
            let r = Table::new(name, &p, &[Mu, Mu2, T, A], &[], vec![], &["value"])?.fill(|x| {
                let (m1, m2, t, a) = (x.get(Mu), x.get(Mu2), x.get(T), x.get(A));
                Ok(if density {
                    nested_last_zero_pdf(m1, m2, t, a, qb)?
                } else {
                    nested_last_zero_cdf(m1, m2, t, a, qb)?
                })
            })?;
            Ok((r, p.format()))
        }
        IterOp::NfoldPdf(p) => {
            let (n, qb) = (p.need_n()?, p.quad()?);
            let r = Table::new("iter nfold-pdf", &p, &[T, A], &[], vec![("n", n as f64)], &["value"])?
                .fill(|x| Ok(nfold_last_zero_pdf(n, x.get(T), x.get(A), qb)?))?;
            Ok((r, p.format()))
        }
        IterOp::NfoldMoment(p) => {
            let (n, m) = (p.need_n()?, p.need_m()?);
            let r = Table::new(
                "iter nfold-moment",
                &p,
                &[T],
                &[],
                vec![("n", n as f64), ("m", f64::from(m))],
                &["value"],
            )?
            .fill(|x| Ok(nfold_moment(n, m, x.get(T))?))?;
            Ok((r, p.format()))
        }
        IterOp::NfoldMgf(p) => {
            let n = p.need_n()?;
            let r = Table::new("iter nfold-mgf", &p, &[T, Alpha], &[], vec![("n", n as f64)], &["value"])?
                .fill(|x| Ok(nfold_mgf(n, x.get(T), x.get(Alpha))?))?;
            Ok((r, p.format()))
        }
    }
}

const MC_COLUMNS: [&str; 4] = ["analytic", "mc", "std_error", "z"];

/// Samples drawn once per distinct key, reused across consecutive rows.
struct SampleCache<T> {
    key: Vec<f64>,
    samples: Vec<T>,
}

impl<T> SampleCache<T> {
    fn new() -> Self {
        Self {
            key: vec![f64::NAN],
            samples: Vec::new(),
        }
    }

    fn get(&mut self, key: Vec<f64>, draw: impl FnOnce() -> CliResult<Vec<T>>) -> CliResult<&[T]> {
        if key != self.key {
            self.samples = draw()?;
            self.key = key;
        }
        Ok(&self.samples)
    }
}

fn export(path: &Option<PathBuf>, samples: &[f64]) -> CliResult<()> {
    if let Some(path) = path {
        write_samples_csv(BufWriter::new(File::create(path)?), samples)?;
    }
    Ok(())
}

fn mc(op: McOp) -> CliResult<(RunReport, Format)> {
    match op {
        McOp::Lastzero(p) => {
            let cfg = p.mc_config();
            let mut cache = SampleCache::new();
            let r = Table::new("mc lastzero", &p, &[Mu, T, A], &[], vec![], &MC_COLUMNS)?.fill_mc(|x| {
                let (mu, t) = (x.get(Mu), x.get(T));
                let s = cache.get(vec![mu, t], || Ok(sample_last_zero(mu, t, &cfg)?))?;
                export(&p.samples, s)?;
                Ok((last_zero_cdf(clock(mu, t)?, x.get(A))?, estimate(s, Functional::CdfAt(x.get(A)))?))
            })?;
            Ok((r, p.format()))
        }
        McOp::Return(p) => {
            let cfg = p.mc_config();
            let horizon = p
                .values(B)
                .ok_or_else(|| CliError::Usage("missing required flag --b (or --b-grid)".into()))?
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max);
            let mut cache = SampleCache::new();
            let r = Table::new("mc return", &p, &[Mu, T, B], &[], vec![], &MC_COLUMNS)?
                .with_param("horizon", format_number(horizon))
                .fill_mc(|x| {
                    let (mu, t, b) = (x.get(Mu), x.get(T), x.get(B));
                    let s = cache.get(vec![mu, t], || Ok(sample_first_return_after(mu, t, horizon, &cfg)?))?;
                    if let Some(path) = &p.samples {
                        write_return_samples_csv(BufWriter::new(File::create(path)?), s)?;
                    }
                    let above: Vec<f64> = s
                        .iter()
                        .map(|r| f64::from(u8::from(matches!(r, ReturnSample::Censored) || r.as_time() > b)))
                        .collect();
                    // P(first zero after t exceeds b) = P(no zero on [t, b])
                    let analytic = joint_survival(clock(mu, t)?, t, ReturnTime::Finite(b))?;
                    Ok((analytic, estimate(&above, Functional::Mean)?))
                })?;
            Ok((r, p.format()))
        }
        McOp::Maxabs(p) => {
            let (cfg, sb) = (p.mc_config(), p.series()?);
            let mut cache = SampleCache::new();
            let r = Table::new("mc maxabs", &p, &[Mu, T, Beta], &[], vec![], &MC_COLUMNS)?.fill_mc(|x| {
                let (mu, t, beta) = (x.get(Mu), x.get(T), x.get(Beta));
                let s = cache.get(vec![mu, t], || Ok(sample_max_abs(mu, t, &cfg)?))?;
                export(&p.samples, s)?;
                let analytic = max_abs_cdf_with(clock(mu, t)?, beta, sb, ImageWeights::Girsanov)?;
                Ok((analytic, estimate(s, Functional::CdfAt(beta))?))
            })?;
            Ok((r, p.format()))
        }
        McOp::Nested(p) => {
            let (cfg, qb) = (p.mc_config(), p.quad()?);
            let mut cache = SampleCache::new();
            let r = if p.values(A).is_some() {
                Table::new("mc nested", &p, &[Mu, Mu2, T, A], &[], vec![], &MC_COLUMNS)?.fill_mc(|x| {
                    let (m1, m2, t, a) = (x.get(Mu), x.get(Mu2), x.get(T), x.get(A));
                    let s = cache.get(vec![m1, m2, t], || Ok(sample_nested(&NestedSpec::new(vec![m1, m2], t)?, &cfg)?))?;
                    export(&p.samples, s)?;
                    Ok((nested_last_zero_cdf(m1, m2, t, a, qb)?, estimate(s, Functional::CdfAt(a))?))
                })?
            } else {
                let (n, m) = (p.need_n()?, p.need_m()?);
                Table::new("mc nested", &p, &[T], &[], vec![("n", n as f64), ("m", f64::from(m))], &MC_COLUMNS)?
                    .fill_mc(|x| {
                        let t = x.get(T);
                        let s = cache.get(vec![t], || Ok(sample_nested(&NestedSpec::driftless(n, t)?, &cfg)?))?;
                        export(&p.samples, s)?;
                        Ok((nfold_moment(n, m, t)?, estimate(s, Functional::Moment(m))?))
                    })?
            };
            Ok((r, p.format()))
        }
        McOp::Iterated(p) => {
            let (cfg, qb, sb, kind) = (p.mc_config(), p.quad()?, p.series()?, p.kind());
            let mut cache = SampleCache::new();
            let r = Table::new("mc iterated", &p, &[Mu, T, A], &[Mu2], vec![], &MC_COLUMNS)?
                .with_param("inner_max", if p.onesided { "onesided" } else { "abs" })
                .fill_mc(|x| {
                    let (mu, t, a) = (x.get(Mu), x.get(T), x.get(A));
                    let mu2 = x.opt(Mu2).unwrap_or(0.0);
                    let s = cache.get(vec![mu, mu2, t], || Ok(sample_iterated_last_zero_with(mu, mu2, t, kind, &cfg)?))?;
                    export(&p.samples, s)?;
                    let analytic = iter_last_zero_cdf_drifted_inner(mu, mu2, t, a, kind, qb, sb)?;
                    Ok((analytic, estimate(s, Functional::CdfAt(a))?))
                })?;
            Ok((r, p.format()))
        }
    }
}

fn selftest(args: SelftestArgs) -> CliResult<(RunReport, Format, bool)> {
    let suite = match args.suite.or(args.suite_pos) {
        Some(SuiteArg::Full) => Suite::Full,
        Some(SuiteArg::Quick) | None => Suite::Quick,
    };
    let d = McConfig::default();
    let base = McConfig {
        seed: args.seed.unwrap_or(DEFAULT_SEED),
        dt: args.dt.unwrap_or(d.dt),
        threads: args.threads,
        ..d
    };
    let outcome = run_suite(suite, base)?;
    let format = match args.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let passed = outcome.passed();
    Ok((outcome.report, format, passed))
}

fn dispatch(command: Command) -> CliResult<(RunReport, Format, bool)> {
    let ok = |(r, f): (RunReport, Format)| (r, f, true);
    Ok(match command {
        Command::Lastzero { op } => ok(lastzero(op)?),
        Command::Joint { op } => ok(joint(op)?),
        Command::Reflmax { op } => ok(reflmax(op)?),
        Command::Iter { op } => ok(iter(op)?),
        Command::Nfold { op } => ok(iter(op.into())?),
        Command::Mc { op } => ok(mc(op)?),
        Command::Selftest(args) => selftest(args)?,
    })
}

/// Exit status for a library error: 2 for invalid input, 3 for numeric failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain { .. } | Error::McConfig(_) | Error::EmptySample => 2,
        _ => 3,
    }
}

/// Runs the command line `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok((report, format, passed)) => {
            if out.write_all(report.render(format).as_bytes()).is_err() {
                return 1;
            }
            if passed {
                0
            } else {
                let _ = writeln!(err, "zerocross: self-test failed");
                1
            }
        }
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "zerocross: {msg}\n\nRun with --help for usage.");
            2
        }
        Err(CliError::Numeric(e)) => {
            let _ = writeln!(err, "zerocross: error in module {}: {e}", e.module());
            exit_code(&e)
        }
        Err(CliError::Io(msg)) => {
            let _ = writeln!(err, "zerocross: {msg}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_closed() {
        let g: Grid = "0:1:5".parse().unwrap();
        assert_eq!(g.points, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g: Grid = "0.1:0.7:7".parse().unwrap();
        assert_eq!(*g.points.last().unwrap(), 0.7);
        assert!("1:2".parse::<Grid>().is_err());
        assert!("1:2:1".parse::<Grid>().is_err());
        assert_eq!("2:2:1".parse::<Grid>().unwrap().points, vec![2.0]);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
