use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "gmclab",
    version,
    about = "Experiments on critical moments of Gaussian multiplicative chaos, Brownian path decompositions and moments of moments of random matrices",
    after_help = "Exit codes: 0 success, 2 invalid parameters, 3 numerical failure, 4 assertion failed, 64 usage error."
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Master seed; required by every stochastic subcommand.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all available cores); results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// JSON object of flag values; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Compare against the reference value and exit with 4 on failure.
    #[arg(long, global = true)]
    pub assert: bool,
    /// Tolerance used by --assert.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Results file; defaults to standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Fill the runtime_ms column (otherwise left empty so output is reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Midpoint rule, eight cells per cutoff length.
    Quadrature,
    /// Gauss-Legendre on graded panels in the separation variables.
    Graded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelChoice {
    Cutoff,
    Mollified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Euler,
    Radial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathTest {
    Williams,
    ExpMax,
    TwoMMinusB,
    Bes3,
    TimeReversal,
    Independence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnsembleChoice {
    Cue,
    Cbe,
    On,
    Sp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MomMethod {
    MonteCarlo,
    Toeplitz,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Special functions and closed-form constants.
    ///
    /// Barnes G (G(z+1) = Gamma(z) G(z)), the reflection coefficient of the
    /// critical-moment theorem, the Fyodorov-Bouchaud circle moments, the
    /// Keating-Snaith product and leading orders of moments of moments.
    Specfun(SpecfunArgs),
    /// Critical moment growth E[M_eps(D)^p] ~ C log(1/eps) at p = 2d/gamma^2.
    ///
    /// Deterministic moments of the cutoff or mollified field on [0, 1]
    /// fitted against log(1/eps) and compared with the theorem constant
    /// (p - 1) R(gamma) / p times the weight integral.
    GmcSlope(SlopeArgs),
    /// Supercritical integer moments E[M_eps^p] ~ eps^{-(gamma^2/2)(p-1)(p - 2d/gamma^2)}.
    ///
    /// Log-log fit of exact moments of the cutoff field on [0, 1].
    GmcSupercritical(SupercriticalArgs),
    /// Multifractal scaling E[M(B(x, r))^alpha] ~ r^{alpha d + (gamma^2/2) alpha (1 - alpha)}.
    ///
    /// Monte Carlo over a mollified log-correlated field on [0, 1].
    GmcMultifractal(MultifractalArgs),
    /// Distributional checks of Brownian path decompositions.
    ///
    /// williams: splitting a drift -mu motion at its maximum M ~ Exp(2mu) into a
    /// motion with drift +mu run to M and a conditioned process; exp-max: the
    /// maximum law; two-m-minus-b: 2S - B of drift mu motion is the conditioned
    /// process; bes3: mu = 0 case against the Bessel-3 law; time-reversal: a
    /// drift mu motion run to its hitting time of x, reversed, is the conditioned
    /// process run to its last passage at x; independence: the future of 2S - B
    /// after S first reaches x is independent of its past.
    PathsVerify(PathsVerifyArgs),
    /// Reflection coefficient as an exponential functional of the conditioned process.
    ///
    /// Monte Carlo of E[(int e^{-gamma B_t} Z(dt))^{p-1}] with a two-sided
    /// conditioned process of drift (gamma/2)(p-1), compared with R(gamma), d = 1.
    PathsReflection(ReflectionArgs),
    /// Moments of moments E[((1/2pi) int |P_N|^{2s})^k] of circular ensembles.
    ///
    /// Monte Carlo over circular beta ensembles, or deterministic through
    /// Toeplitz determinants with Fisher-Hartwig singularities (beta = 2).
    RmtMom(RmtMomArgs),
    /// Log-determinant D_n of the Toeplitz matrix with symbol prod_j |z - e^{i theta_j}|^{2s}.
    ///
    /// D_n equals the unitary average of prod_j |P_n(theta_j)|^{2s}.
    RmtToeplitz(RmtToeplitzArgs),
    /// Ratio of D_N to N^{k s^2} (G(1+s)^2/G(1+2s))^k prod |e^{i theta_u} - e^{i theta_v}|^{-2 s^2}.
    ///
    /// Uniform for separations at least N^{-(1-delta)}.
    RmtFh(RmtFhArgs),
}

#[derive(Debug, Args)]
pub struct SpecfunArgs {
    /// Evaluate G(x).
    #[arg(long, value_name = "X")]
    pub barnes_g: Option<f64>,
    /// Evaluate ln Gamma(x).
    #[arg(long, value_name = "X")]
    pub log_gamma: Option<f64>,
    /// Evaluate R(gamma) in dimension d.
    #[arg(long)]
    pub reflection_coefficient: bool,
    /// Evaluate the Fyodorov-Bouchaud moment of order K.
    #[arg(long, value_name = "K")]
    pub fyodorov_bouchaud: Option<f64>,
    /// Evaluate the Keating-Snaith product E|P_N|^{2s} for the circular beta ensemble.
    #[arg(long)]
    pub ks_moment: bool,
    /// Leading-order moments of moments.
    #[arg(long)]
    pub mom_leading: bool,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub d: u32,
    #[arg(long, value_enum, default_value_t = EnsembleChoice::Cue)]
    pub ensemble: EnsembleChoice,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
}

#[derive(Debug, Args)]
pub struct SlopeArgs {
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1)]
    pub d: u32,
    /// Cutoff scales, e.g. `2^-6..2^-16` or a comma list.
    #[arg(long, default_value = "2^-6..2^-16")]
    pub eps: String,
    #[arg(long, value_enum, default_value_t = Method::Quadrature)]
    pub method: Method,
    #[arg(long, value_enum, default_value_t = KernelChoice::Cutoff)]
    pub kernel: KernelChoice,
}

#[derive(Debug, Args)]
pub struct SupercriticalArgs {
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub p: u32,
    #[arg(long, default_value = "2^-6..2^-16")]
    pub eps: String,
    #[arg(long, value_enum, default_value_t = Method::Graded)]
    pub method: Method,
}

#[derive(Debug, Args)]
pub struct MultifractalArgs {
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub alpha: f64,
    /// Ball radii, decreasing, e.g. `2^-3..2^-8` or a comma list.
    #[arg(long, default_value = "2^-3..2^-8")]
    pub radii: String,
    /// Grid points on [0, 1].
    #[arg(long, default_value_t = 4096)]
    pub points: usize,
    #[arg(long, default_value_t = 2000)]
    pub reps: usize,
}

#[derive(Debug, Args)]
pub struct PathsVerifyArgs {
    #[arg(long, value_enum)]
    pub test: PathTest,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    /// Level for time reversal and independence.
    #[arg(long, default_value_t = 1.0)]
    pub x: f64,
    #[arg(long, value_enum, default_value_t = Scheme::Euler)]
    pub scheme: Scheme,
}

#[derive(Debug, Args)]
pub struct ReflectionArgs {
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Half-width of the time window (default 10 / (gamma mu)).
    #[arg(long)]
    pub t_cut: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    #[arg(long, default_value_t = 40_000)]
    pub reps: usize,
    #[arg(long, value_enum, default_value_t = Scheme::Euler)]
    pub scheme: Scheme,
}

#[derive(Debug, Args)]
pub struct RmtMomArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: f64,
    #[arg(long)]
    pub s: f64,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    #[arg(long, value_enum, default_value_t = MomMethod::MonteCarlo)]
    pub method: MomMethod,
    /// Trapezoid nodes per sample (default 8N).
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    /// Quadrature node budget per free angle for the Toeplitz route.
    #[arg(long, default_value_t = 128)]
    pub quad_nodes: usize,
}

#[derive(Debug, Args)]
pub struct AnglesArgs {
    /// Singular angles as a JSON array, e.g. `[0, 1.5]`.
    #[arg(long)]
    pub angles: Option<String>,
    /// File holding the JSON array of angles.
    #[arg(long)]
    pub angles_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RmtToeplitzArgs {
    #[command(flatten)]
    pub angles: AnglesArgs,
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct RmtFhArgs {
    #[command(flatten)]
    pub angles: AnglesArgs,
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
}
