use crate::args::*;
use crate::output::{Cell, Table};
use gmclab::fields::{CovarianceSpec, FieldSampler, Grid};
use gmclab::gmc_moments::{
    critical_slope_experiment, multifractal_scaling_experiment, supercritical_exponent_experiment, QuadratureRule,
    MOMENT_CSV_HEADER,
};
use gmclab::paths::{self, ConditionedScheme};
use gmclab::rmt;
use gmclab::specfun::{self, Ensemble, EnsembleFormula, GmcParams};
use std::time::Instant;

#[derive(Debug)]
pub enum CliError {
    Precondition(String),
    Numerical(String),
}

impl From<gmclab::Error> for CliError {
    fn from(e: gmclab::Error) -> Self {
        if e.is_precondition() {
            CliError::Precondition(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Precondition(msg.into())
}

pub type CliResult<T> = Result<T, CliError>;

/// Experiment output: rows for the results file, a one-line summary and the assertion verdict.
pub struct Outcome {
    pub table: Table,
    pub summary: String,
    pub pass: Option<bool>,
}

pub struct Context<'a> {
    pub global: &'a Global,
    pub started: Instant,
}

impl Context<'_> {
    fn seed(&self) -> CliResult<u64> {
        self.global.seed.ok_or_else(|| invalid("this subcommand is stochastic and needs --seed"))
    }

    fn tol(&self, default: f64) -> f64 {
        self.global.tol.unwrap_or(default)
    }

    fn verdict(&self, ok: bool) -> Option<bool> {
        self.global.assert.then_some(ok)
    }

    fn runtime(&self) -> Cell {
        if self.global.timings {
            Cell::Int(self.started.elapsed().as_millis() as u64)
        } else {
            Cell::Empty
        }
    }
}

fn pass_word(p: Option<bool>) -> &'static str {
    match p {
        Some(true) => " PASS",
        Some(false) => " FAIL",
        None => "",
    }
}

fn parse_scale(tok: &str) -> CliResult<f64> {
    let tok = tok.trim();
    if let Some(e) = tok.strip_prefix("2^") {
        let e: i32 = e.parse().map_err(|_| invalid(format!("bad exponent in {tok:?}")))?;
        return Ok(2f64.powi(e));
    }
    tok.parse().map_err(|_| invalid(format!("bad number {tok:?}")))
}

/// `2^a..2^b` (unit steps in the exponent) or a comma list of numbers and powers of two.
pub fn parse_scales(text: &str) -> CliResult<Vec<f64>> {
    if let Some((a, b)) = text.split_once("..") {
        let exp = |t: &str| -> CliResult<i32> {
            t.trim()
                .strip_prefix("2^")
                .and_then(|e| e.parse().ok())
                .ok_or_else(|| invalid(format!("ranges take powers of two, got {t:?}")))
        };
        let (a, b) = (exp(a)?, exp(b)?);
        let step = if b >= a { 1 } else { -1 };
        let mut out = vec![];
        let mut e = a;
        loop {
            out.push(2f64.powi(e));
            if e == b {
                break;
            }
            e += step;
        }
        return Ok(out);
    }
    text.split(',').map(parse_scale).collect()
}

fn parse_angles(a: &AnglesArgs) -> CliResult<Vec<f64>> {
    let text = match (&a.angles, &a.angles_file) {
        (Some(t), None) => t.clone(),
        (None, Some(p)) => std::fs::read_to_string(p).map_err(|e| invalid(format!("cannot read {}: {e}", p.display())))?,
        _ => return Err(invalid("give exactly one of --angles and --angles-file")),
    };
    let v: Vec<f64> = serde_json::from_str(&text).map_err(|e| invalid(format!("angles must be a JSON array of numbers: {e}")))?;
    if v.is_empty() {
        return Err(invalid("need at least one angle"));
    }
    Ok(v)
}

fn scheme(s: Scheme) -> ConditionedScheme {
    match s {
        Scheme::Euler => ConditionedScheme::Euler,
        Scheme::Radial => ConditionedScheme::Radial,
    }
}

pub fn specfun(ctx: &Context, a: &SpecfunArgs) -> CliResult<Outcome> {
    let mut table = Table::new(&["quantity", "value"]);
    let need = |x: Option<f64>, name: &str| x.ok_or_else(|| invalid(format!("--{name} is required")));
    let (name, value, reference): (String, f64, Option<f64>) = if let Some(x) = a.barnes_g {
        let v = specfun::barnes_g(x)?.value();
        // superfactorial prod_{k <= x-2} k! at positive integers
        let exact = (x.fract() == 0.0 && (1.0..=20.0).contains(&x)).then(|| {
            (1..=(x as u64).saturating_sub(2)).map(|k| (1..=k).product::<u64>() as f64).product()
        });
        (format!("barnes_g({x})"), v, exact)
    } else if let Some(x) = a.log_gamma {
        (format!("log_gamma({x})"), specfun::log_gamma(x)?, None)
    } else if a.reflection_coefficient {
        let g = need(a.gamma, "gamma")?;
        (format!("reflection_coefficient({g}, {})", a.d), specfun::reflection_coefficient(GmcParams::new(g, a.d)?)?, None)
    } else if let Some(k) = a.fyodorov_bouchaud {
        let g = need(a.gamma, "gamma")?;
        (format!("fyodorov_bouchaud({k}, {g})"), specfun::fyodorov_bouchaud(k, g)?, None)
    } else if a.ks_moment {
        let s = need(a.s, "s")?;
        let n = a.n.ok_or_else(|| invalid("--n is required"))?;
        (format!("ks_moment({n}, {}, {s})", a.beta), rmt::ks_moment_exact(n as usize, a.beta, s)?, None)
    } else if a.mom_leading {
        let (k, s) = (need(a.k, "k")?, need(a.s, "s")?);
        let n = a.n.ok_or_else(|| invalid("--n is required"))?;
        let ensemble = match a.ensemble {
            EnsembleChoice::Cue => Ensemble::Cue,
            EnsembleChoice::Cbe => Ensemble::CBetaE { beta: a.beta },
            EnsembleChoice::On => Ensemble::On,
            EnsembleChoice::Sp => Ensemble::Sp2N,
        };
        let lo = specfun::mom_leading_order(EnsembleFormula::new(ensemble, k, s)?, n)?;
        table = Table::new(&["quantity", "value", "constant", "n_exponent", "log_power"]);
        table.push(vec![
            "mom_leading".into(),
            lo.value.into(),
            lo.constant.into(),
            lo.n_exponent.into(),
            lo.log_power.into(),
        ]);
        let summary = match lo.value {
            Some(v) => format!("mom_leading = {v}"),
            None => format!("mom_leading: constant unknown, growth N^{} (log N)^{}", lo.n_exponent, lo.log_power),
        };
        return Ok(Outcome { table, summary, pass: None });
    } else {
        return Err(invalid("choose one of --barnes-g, --log-gamma, --reflection-coefficient, --fyodorov-bouchaud, --ks-moment, --mom-leading"));
    };
    table.push(vec![name.clone().into(), value.into()]);
    let pass = if ctx.global.assert {
        let r = reference.ok_or_else(|| invalid(format!("no reference value for {name}")))?;
        Some((value - r).abs() <= ctx.tol(1e-10) * r.abs().max(1.0))
    } else {
        None
    };
    Ok(Outcome { table, summary: format!("{name} = {value}{}", pass_word(pass)), pass })
}

fn rule(m: Method) -> QuadratureRule {
    match m {
        Method::Quadrature => QuadratureRule::Midpoint { points_per_eps: 8.0, max_points: 1 << 20 },
        Method::Graded => QuadratureRule::Graded,
    }
}

fn moment_table() -> Table {
    Table::new(&MOMENT_CSV_HEADER)
}

fn moment_row(kernel: &str, gamma: f64, d: u32, p: f64, eps: f64, method: &str, value: f64, stderr: f64, reps: usize, heavy: bool, seed: Option<u64>) -> Vec<Cell> {
    vec![
        kernel.into(),
        gamma.into(),
        d.into(),
        p.into(),
        eps.into(),
        method.into(),
        value.into(),
        stderr.into(),
        reps.into(),
        heavy.into(),
        seed.into(),
    ]
}

pub fn gmc_slope(ctx: &Context, a: &SlopeArgs) -> CliResult<Outcome> {
    if a.d != 1 {
        return Err(invalid("slope experiments run on the unit interval (d = 1)"));
    }
    let eps = parse_scales(&a.eps)?;
    let kernel = a.kernel;
    let family = move |e: f64| match kernel {
        KernelChoice::Cutoff => CovarianceSpec::cutoff(0.0, 1.0, e),
        KernelChoice::Mollified => CovarianceSpec::mollified(0.0, 1.0, e),
    };
    let exp = critical_slope_experiment(family, &eps, a.gamma, rule(a.method))?;
    let mut table = moment_table();
    for (e, m) in eps.iter().zip(&exp.estimates) {
        let id = family(*e)?.kernel.id();
        table.push(moment_row(&id, a.gamma, a.d, exp.p, *e, m.method.as_str(), m.value, m.stderr, m.replicates, m.heavy_tail_flag, None));
    }
    let rel = (exp.fit.slope - exp.predicted).abs() / exp.predicted.abs();
    let pass = ctx.verdict(rel <= ctx.tol(0.05));
    Ok(Outcome {
        table,
        summary: format!(
            "slope = {:.6} (predicted {:.6}, relative error {:.4}, r^2 {:.6}){}",
            exp.fit.slope, exp.predicted, rel, exp.fit.r_squared, pass_word(pass)
        ),
        pass,
    })
}

pub fn gmc_supercritical(ctx: &Context, a: &SupercriticalArgs) -> CliResult<Outcome> {
    let eps = parse_scales(&a.eps)?;
    let (fit, predicted) = supercritical_exponent_experiment(a.gamma, a.p, &eps, rule(a.method))?;
    let mut table = Table::new(&["gamma", "p", "slope", "intercept", "r_squared", "predicted", "points"]);
    table.push(vec![a.gamma.into(), a.p.into(), fit.slope.into(), fit.intercept.into(), fit.r_squared.into(), predicted.into(), fit.fitted_points.into()]);
    let rel = (fit.slope - predicted).abs() / predicted.abs();
    let pass = ctx.verdict(rel <= ctx.tol(0.05));
    Ok(Outcome {
        table,
        summary: format!("exponent = {:.6} (predicted {:.6}, relative error {:.4}){}", fit.slope, predicted, rel, pass_word(pass)),
        pass,
    })
}

pub fn gmc_multifractal(ctx: &Context, a: &MultifractalArgs) -> CliResult<Outcome> {
    let seed = ctx.seed()?;
    let radii = parse_scales(&a.radii)?;
    let eps = 4.0 / a.points as f64;
    let spec = CovarianceSpec::mollified(0.0, 1.0, eps)?;
    let sampler = FieldSampler::circulant(&spec, Grid::interval(0.0, 1.0, a.points)?)?;
    let res = multifractal_scaling_experiment(&sampler, a.gamma, a.alpha, &radii, a.reps, seed)?;
    let mut table = moment_table();
    let id = spec.kernel.id();
    for (r, m) in radii.iter().zip(&res.estimates) {
        table.push(moment_row(&id, a.gamma, 1, a.alpha, *r, m.method.as_str(), m.value, m.stderr, m.replicates, m.heavy_tail_flag, Some(seed)));
    }
    let rel = (res.fit.slope - res.predicted).abs() / res.predicted.abs();
    let pass = ctx.verdict(!res.heavy_tail && rel <= ctx.tol(0.10));
    Ok(Outcome {
        table,
        summary: format!(
            "exponent = {:.6} (predicted {:.6}, relative error {:.4}{}){}",
            res.fit.slope,
            res.predicted,
            rel,
            if res.heavy_tail { ", heavy-tailed" } else { "" },
            pass_word(pass)
        ),
        pass,
    })
}

fn ks_table() -> Table {
    Table::new(&["test", "n", "statistic", "threshold", "pass", "seed"])
}

pub fn paths_verify(ctx: &Context, a: &PathsVerifyArgs) -> CliResult<Outcome> {
    let seed = ctx.seed()?;
    let sch = scheme(a.scheme);
    let mut table = ks_table();
    let mut push = |t: &str, n: usize, stat: f64, thr: f64, pass: bool| {
        table.push(vec![t.into(), n.into(), stat.into(), thr.into(), pass.into(), seed.into()]);
    };
    let records = match a.test {
        PathTest::Williams => {
            let o = paths::williams_check(a.mu, a.dt, a.reps, seed, sch)?;
            vec![o.t1, o.t5, paths::exp_max_check(a.mu, a.dt, a.reps, seed)?]
        }
        PathTest::ExpMax => vec![paths::exp_max_check(a.mu, a.dt, a.reps, seed)?],
        PathTest::TwoMMinusB => vec![paths::two_m_minus_b_check(a.mu, a.dt, a.reps, seed, sch)?],
        PathTest::Bes3 => vec![paths::bes3_marginal_check(a.dt, a.reps, seed, sch)],
        PathTest::TimeReversal => {
            let o = paths::time_reversal_check(a.mu, a.x, a.dt, a.reps, seed, sch)?;
            vec![o.hitting, o.midpoint]
        }
        PathTest::Independence => {
            let o = paths::independence_check(a.mu, a.x, a.dt, a.reps, seed)?;
            let ok = o.correlation.abs() <= 5.0 * o.stderr;
            push("independence_correlation", o.n, o.correlation, 5.0 * o.stderr, ok);
            let pass = ctx.verdict(ok);
            return Ok(Outcome {
                table,
                summary: format!("correlation = {:.5} +- {:.5}{}", o.correlation, o.stderr, pass_word(Some(ok))),
                pass,
            });
        }
    };
    let mut parts = vec![];
    for r in &records {
        push(&r.test, r.n, r.ks, r.threshold, r.pass);
        parts.push(format!("{} ks={:.4} (<{})", r.test, r.ks, r.threshold));
    }
    let ok = records.iter().all(|r| r.pass);
    let pass = ctx.verdict(ok);
    Ok(Outcome { table, summary: format!("{}{}", parts.join(", "), pass_word(Some(ok))), pass })
}

pub fn paths_reflection(ctx: &Context, a: &ReflectionArgs) -> CliResult<Outcome> {
    let seed = ctx.seed()?;
    let params = GmcParams::new(a.gamma, 1)?;
    let p = params.p();
    let mu = 0.5 * a.gamma * (p - 1.0);
    let t_cut = a.t_cut.unwrap_or(10.0 / (a.gamma * mu));
    let est = paths::reflection_mc(a.gamma, t_cut, a.dt, a.reps, seed, scheme(a.scheme))?;
    let exact = specfun::reflection_coefficient(params)?;
    let mut table = Table::new(&["gamma", "mu", "p", "dt", "t_cut", "value", "stderr", "replicates", "heavy_tail_flag", "truncation_share", "reference", "seed"]);
    let e = est.estimate;
    table.push(vec![
        a.gamma.into(),
        est.mu.into(),
        est.p.into(),
        a.dt.into(),
        t_cut.into(),
        e.value.into(),
        e.stderr.into(),
        e.replicates.into(),
        e.heavy_tail_flag.into(),
        est.truncation_share.into(),
        exact.into(),
        seed.into(),
    ]);
    let rel = (e.value - exact).abs() / exact;
    let pass = ctx.verdict(rel <= ctx.tol(0.25));
    Ok(Outcome {
        table,
        summary: format!(
            "reflection = {:.4} +- {:.4} (exact {exact:.6}, relative error {rel:.4}{}){}",
            e.value,
            e.stderr,
            if est.truncation_warning { ", truncation warning" } else { "" },
            pass_word(pass)
        ),
        pass,
    })
}

fn rmt_table() -> Table {
    Table::new(&["ensemble", "beta", "N", "k", "s", "method", "value", "stderr", "runtime_ms", "seed"])
}

pub fn rmt_mom(ctx: &Context, a: &RmtMomArgs) -> CliResult<Outcome> {
    let mut table = rmt_table();
    let ensemble = if a.beta == 2.0 { "CUE" } else { "CbE" };
    let (value, stderr, method, seed, heavy) = match a.method {
        MomMethod::MonteCarlo => {
            let seed = ctx.seed()?;
            let grid = a.grid.unwrap_or(8 * a.n);
            let e = rmt::mom_estimate(a.n, a.beta, a.k, a.s, grid, a.reps, seed)?;
            (e.value, Some(e.stderr), "monte-carlo", Some(seed), e.heavy_tail_flag)
        }
        MomMethod::Toeplitz => {
            if a.beta != 2.0 {
                return Err(invalid("the Toeplitz route is exact for beta = 2 only"));
            }
            if a.k.fract() != 0.0 {
                return Err(invalid("the Toeplitz route needs integer k"));
            }
            (rmt::toeplitz_mom(a.n, a.k as u32, a.s, a.quad_nodes)?, None, "toeplitz", None, false)
        }
    };
    table.push(vec![
        ensemble.into(),
        a.beta.into(),
        a.n.into(),
        a.k.into(),
        a.s.into(),
        method.into(),
        value.into(),
        stderr.into(),
        ctx.runtime(),
        seed.into(),
    ]);
    let pass = if ctx.global.assert {
        let ens = if a.beta == 2.0 { Ensemble::Cue } else { Ensemble::CBetaE { beta: a.beta } };
        let lo = specfun::mom_leading_order(EnsembleFormula::new(ens, a.k, a.s)?, a.n as u64)?;
        let reference = lo.value.ok_or_else(|| invalid("no explicit leading-order constant for these parameters"))?;
        Some((value / reference - 1.0).abs() <= ctx.tol(0.10))
    } else {
        None
    };
    let err = stderr.map(|s| format!(" +- {s:.6}")).unwrap_or_default();
    Ok(Outcome {
        table,
        summary: format!("MoM = {value:.6}{err}{}{}", if heavy { " (heavy-tailed)" } else { "" }, pass_word(pass)),
        pass,
    })
}

pub fn rmt_toeplitz(ctx: &Context, a: &RmtToeplitzArgs) -> CliResult<Outcome> {
    let angles = parse_angles(&a.angles)?;
    let k = angles.len();
    let logd = rmt::toeplitz_determinant(&rmt::FisherHartwigSymbol::new(angles, a.s, a.n)?)?;
    let mut table = rmt_table();
    table.push(vec!["CUE".into(), 2.0.into(), a.n.into(), k.into(), a.s.into(), "toeplitz-logdet".into(), logd.into(), Cell::Empty, ctx.runtime(), Cell::Empty]);
    let pass = if ctx.global.assert {
        if k != 1 {
            return Err(invalid("--assert compares against the exact product, which needs a single angle"));
        }
        let exact = rmt::ks_moment_exact_log(a.n, 2.0, a.s)?;
        Some((logd - exact).abs() <= ctx.tol(1e-8) * exact.abs().max(1.0))
    } else {
        None
    };
    Ok(Outcome { table, summary: format!("log D_{} = {logd} (D = {}){}", a.n, logd.exp(), pass_word(pass)), pass })
}

pub fn rmt_fh(ctx: &Context, a: &RmtFhArgs) -> CliResult<Outcome> {
    let angles = parse_angles(&a.angles)?;
    let k = angles.len();
    let ratio = rmt::fh_uniformity_check(&angles, a.s, a.n, a.delta)?;
    let mut table = rmt_table();
    table.push(vec!["CUE".into(), 2.0.into(), a.n.into(), k.into(), a.s.into(), "fh-ratio".into(), ratio.into(), Cell::Empty, ctx.runtime(), Cell::Empty]);
    let pass = ctx.verdict((ratio - 1.0).abs() <= ctx.tol(0.05));
    Ok(Outcome { table, summary: format!("ratio = {ratio:.6}{}", pass_word(pass)), pass })
}
