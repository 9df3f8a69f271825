//! `ballcheck` command-line front end.
//!
//! Every subcommand prints a report (JSON by default) or a table (CSV by
//! default). Exit status: 0 pass, 1 failed check, 2 inconclusive, 64 usage
//! error.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ballcheck::geometry::Domain;
use ballcheck::report::{Verdict, VerificationReport};
use ballcheck::solutions::SolutionField;
use ballcheck::specfun::{a_norm, b_norm, bessel_i, bessel_j, bessel_zero, gamma_fn, BesselOrder};
use ballcheck::verify::{
    characterize, check_identity, check_mean_value_formula, default_family, flux_identity_check,
    kuran_limit_check, membrane_counterexample, proof_discrepancy, theorem1_identity_check,
    CharacterizationProblem, CharacterizationVerdict, CheckOptions, DiscrepancyVariant,
};
use ballcheck::Error;

use output::{Format, Output, Table};

const EXIT_FAIL: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser, Debug)]
#[command(name = "ballcheck", version, about = "Numerical checks of Helmholtz mean-value identities and ball characterization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate kernels, Bessel functions, zeros or gamma
    Specfun(SpecfunArgs),
    /// Check a_m(λr) u(x) = M(u, B_r(x))
    MeanValue(MeanValueArgs),
    /// Check u(x0) a_m(λr) = M(u, D) for one field
    Identity(IdentityArgs),
    /// Run the identity over a family of fields plus the size condition
    Characterize(CharacterizeArgs),
    /// Sign of ∫_{G_i} U − ∫_{G_e} U
    Discrepancy(DiscrepancyArgs),
    /// The square membrane example
    Membrane(MembraneArgs),
    /// Check ∫_{B_r} u against the boundary flux
    Flux(FluxArgs),
    /// The λ → 0 limit
    Kuran(KuranArgs),
    /// Ball identity for the modified Helmholtz equation
    Theorem1(Theorem1Args),
    /// CSV of t, a_m(t), b_m(t) on a grid
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Monte Carlo samples
    #[arg(long, default_value_t = ballcheck::quadrature::DEFAULT_MC_SAMPLES)]
    samples: u64,
    /// Quadrature nodes per direction (radial, angular and box rules)
    #[arg(long)]
    nodes: Option<usize>,
    /// Identity tolerance for deterministic quadrature
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn options(&self) -> anyhow::Result<CheckOptions> {
        if self.samples < 2 {
            bail!("--samples must be at least 2");
        }
        if !(self.tol >= 0.0) || !self.tol.is_finite() {
            bail!("--tol must be finite and non-negative");
        }
        let mut o = CheckOptions { samples: self.samples, seed: self.seed, tolerance: self.tol, ..CheckOptions::default() };
        if let Some(n) = self.nodes {
            if !(2..=4096).contains(&n) {
                bail!("--nodes must be in 2..=4096");
            }
            o.radial_nodes = n;
            o.angular_resolution = n;
            o.box_nodes = n;
        }
        Ok(o)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SpecfunKind {
    /// a_m(t)
    A,
    /// b_m(t)
    B,
    /// J_ν(t)
    J,
    /// I_ν(t)
    I,
    /// j_{ν,n} for n = 1..count
    Zeros,
    /// Γ(t)
    Gamma,
}

#[derive(Args, Debug)]
struct SpecfunArgs {
    #[arg(value_enum)]
    kind: SpecfunKind,
    /// Dimension for a and b
    #[arg(long)]
    m: Option<u32>,
    /// Bessel order for j, i and zeros
    #[arg(long)]
    nu: Option<f64>,
    /// Single argument
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    #[command(flatten)]
    grid: Grid,
    /// Number of zeros
    #[arg(long, default_value_t = 1)]
    count: u32,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Copy)]
struct Grid {
    #[arg(long, default_value_t = 0.0)]
    t_min: f64,
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,
    #[arg(long, default_value_t = 101)]
    points: usize,
}

impl Grid {
    fn values(&self) -> anyhow::Result<Vec<f64>> {
        if !(self.t_min.is_finite() && self.t_max.is_finite()) || self.t_max < self.t_min {
            bail!("grid needs finite --t-min <= --t-max");
        }
        if self.points < 2 {
            bail!("--points must be at least 2");
        }
        let step = (self.t_max - self.t_min) / (self.points - 1) as f64;
        Ok((0..self.points).map(|k| self.t_min + step * k as f64).collect())
    }
}

#[derive(Args, Debug)]
struct MeanValueArgs {
    /// Solution field, JSON text or file
    #[arg(long)]
    solution: String,
    /// Ball centre; defaults to the origin
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    x0: Option<Vec<f64>>,
    #[arg(long)]
    r: Option<f64>,
    /// Ball domain, JSON text or file; alternative to --x0/--r
    #[arg(long)]
    domain: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct IdentityArgs {
    #[arg(long)]
    domain: String,
    #[arg(long)]
    solution: String,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    x0: Vec<f64>,
    /// Must equal the solution's wavenumber when given
    #[arg(long)]
    lambda: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct CharacterizeArgs {
    #[arg(long)]
    domain: String,
    #[arg(long)]
    lambda: f64,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    x0: Vec<f64>,
    /// Replace the default family; repeatable
    #[arg(long)]
    solution: Vec<String>,
    /// Random-direction plane waves in the default family
    #[arg(long, default_value_t = 8)]
    random: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum VariantArg {
    Helmholtz,
    Modified,
}

#[derive(Args, Debug)]
struct DiscrepancyArgs {
    #[arg(long)]
    domain: String,
    /// λ, or μ for the modified variant
    #[arg(long, alias = "mu")]
    lambda: f64,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    x0: Vec<f64>,
    #[arg(long, value_enum, default_value = "helmholtz")]
    variant: VariantArg,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct MembraneArgs {
    /// Side of the square
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct FluxArgs {
    #[arg(long)]
    solution: String,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    x0: Option<Vec<f64>>,
    #[arg(long)]
    r: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct KuranArgs {
    #[arg(long)]
    domain: String,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    x0: Vec<f64>,
    /// Decreasing wavenumbers
    #[arg(long = "lambda", value_delimiter = ',', default_value = "0.1,0.01,0.001")]
    lambdas: Vec<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Theorem1Args {
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    r: f64,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    x0: Option<Vec<f64>>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    m: u32,
    #[command(flatten)]
    grid: Grid,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Inline JSON when the argument looks like an object, otherwise a path.
fn json_arg(arg: &str) -> anyhow::Result<String> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
    }
}

fn load_domain(arg: &str) -> anyhow::Result<Domain> {
    Ok(Domain::from_json(&json_arg(arg)?)?)
}

fn load_solution(arg: &str) -> anyhow::Result<SolutionField> {
    Ok(SolutionField::from_json(&json_arg(arg)?)?)
}

fn positive(name: &str, v: f64) -> anyhow::Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        bail!("--{name} must be positive and finite, got {v}")
    }
}

fn point_or_origin(x0: Option<Vec<f64>>, m: usize) -> anyhow::Result<Vec<f64>> {
    let p = x0.unwrap_or_else(|| vec![0.0; m]);
    if p.len() != m {
        bail!("--x0 has {} coordinates, expected {m}", p.len());
    }
    Ok(p)
}

fn worst(reports: &[VerificationReport]) -> Verdict {
    if reports.iter().any(|r| r.verdict == Verdict::Fail) {
        Verdict::Fail
    } else if reports.iter().any(|r| r.verdict == Verdict::Inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    }
}

fn exit_for(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn specfun(a: SpecfunArgs) -> anyhow::Result<(Output, u8)> {
    let ts = match a.t {
        Some(t) => vec![t],
        None => a.grid.values()?,
    };
    let need_m = || a.m.ok_or_else(|| anyhow!("--m is required"));
    let need_nu = || -> anyhow::Result<BesselOrder> {
        Ok(BesselOrder::new(a.nu.ok_or_else(|| anyhow!("--nu is required"))?)?)
    };
    let mut rows = Vec::new();
    let header = match a.kind {
        SpecfunKind::Zeros => {
            let nu = need_nu()?;
            if a.count == 0 {
                bail!("--count must be at least 1");
            }
            for n in 1..=a.count {
                rows.push(vec![f64::from(n), bessel_zero(nu, n)?]);
            }
            ["n", "value"]
        }
        kind => {
            for &t in &ts {
                let v = match kind {
                    SpecfunKind::A => a_norm(need_m()?, t)?,
                    SpecfunKind::B => b_norm(need_m()?, t)?,
                    SpecfunKind::J => bessel_j(need_nu()?, t)?,
                    SpecfunKind::I => bessel_i(need_nu()?, t)?,
                    SpecfunKind::Gamma => gamma_fn(t)?,
                    SpecfunKind::Zeros => unreachable!(),
                };
                rows.push(vec![t, v]);
            }
            ["t", "value"]
        }
    };
    let table = Table { columns: header.iter().map(|s| s.to_string()).collect(), rows };
    Ok((Output::Table(table), 0))
}

fn sweep(a: &SweepArgs) -> anyhow::Result<Output> {
    let mut rows = Vec::new();
    for t in a.grid.values()? {
        rows.push(vec![t, a_norm(a.m, t)?, b_norm(a.m, t)?]);
    }
    let columns = vec!["t".into(), format!("a_{}", a.m), format!("b_{}", a.m)];
    Ok(Output::Table(Table { columns, rows }))
}

fn run(cli: Cli) -> anyhow::Result<(Output, Option<Format>, Option<PathBuf>, u8)> {
    Ok(match cli.command {
        Command::Specfun(a) => {
            let (fmt, out) = (a.format, a.out.clone());
            let (o, code) = specfun(a)?;
            (o, fmt, out, code)
        }
        Command::Sweep(a) => (sweep(&a)?, a.format, a.out, 0),
        Command::MeanValue(a) => {
            let opts = a.common.options()?;
            let u = load_solution(&a.solution)?;
            let (centre, r) = match (&a.domain, a.r) {
                (Some(d), None) => load_domain(d)?
                    .as_ball()
                    .ok_or_else(|| anyhow!("--domain must be a ball for mean-value"))?,
                (None, Some(r)) => (point_or_origin(a.x0.clone(), u.dimension())?, positive("r", r)?),
                _ => bail!("give either --domain <ball> or --r (with optional --x0)"),
            };
            let rep = check_mean_value_formula(&u, &centre, r, &opts)?;
            let code = exit_for(rep.verdict);
            (Output::Reports(vec![rep]).with_settings(&opts), a.common.format, a.common.out, code)
        }
        Command::Identity(a) => {
            let opts = a.common.options()?;
            let u = load_solution(&a.solution)?;
            let lambda = a.lambda.unwrap_or(u.wavenumber());
            let p = CharacterizationProblem::new(load_domain(&a.domain)?, positive("lambda", lambda)?, &a.x0, &opts)?;
            let rep = check_identity(&u, &p, &opts)?;
            let code = exit_for(rep.verdict);
            (Output::Reports(vec![rep]).with_settings(&opts), a.common.format, a.common.out, code)
        }
        Command::Characterize(a) => {
            let opts = a.common.options()?;
            let d = load_domain(&a.domain)?;
            let m = d.dimension();
            let lambda = positive("lambda", a.lambda)?;
            let family = if a.solution.is_empty() {
                default_family(m, lambda, a.random, opts.seed)?
            } else {
                a.solution.iter().map(|s| load_solution(s)).collect::<anyhow::Result<Vec<_>>>()?
            };
            let p = CharacterizationProblem::new(d, lambda, &a.x0, &opts)?;
            let out = characterize(&p, &family, &opts)?;
            let code = match out.verdict {
                CharacterizationVerdict::ConsistentWithBall => 0,
                CharacterizationVerdict::NotABall => EXIT_FAIL,
                CharacterizationVerdict::OutsideTheoremScope | CharacterizationVerdict::Inconclusive => {
                    EXIT_INCONCLUSIVE
                }
            };
            if let Some(w) = &out.witness {
                eprintln!("witness: {w}");
            }
            (Output::Characterization(out).with_settings(&opts), a.common.format, a.common.out, code)
        }
        Command::Discrepancy(a) => {
            let opts = a.common.options()?;
            let p = CharacterizationProblem::new(load_domain(&a.domain)?, positive("lambda", a.lambda)?, &a.x0, &opts)?;
            let variant = match a.variant {
                VariantArg::Helmholtz => DiscrepancyVariant::Helmholtz,
                VariantArg::Modified => DiscrepancyVariant::Modified,
            };
            let out = proof_discrepancy(&p, variant, &opts)?;
            let reports = vec![out.discrepancy, out.volume_balance];
            let code = exit_for(worst(&reports));
            (Output::Reports(reports).with_settings(&opts), a.common.format, a.common.out, code)
        }
        Command::Membrane(a) => {
            let opts = a.common.options()?;
            let b = membrane_counterexample(positive("a", a.a)?, &opts)?;
            // the bundle succeeds when it shows identity pass together with size failure
            let expected = b.reports.iter().all(|r| match r.name.as_str() {
                "membrane.size_condition" | "membrane.radial_identity" => r.verdict == Verdict::Fail,
                _ => r.passed(),
            }) && b.characterization == CharacterizationVerdict::OutsideTheoremScope;
            (Output::Membrane(b).with_settings(&opts), a.common.format, a.common.out, if expected { 0 } else { EXIT_FAIL })
        }
        Command::Flux(a) => {
            let opts = a.common.options()?;
            let u = load_solution(&a.solution)?;
            let c = point_or_origin(a.x0, u.dimension())?;
            let rep = flux_identity_check(&u, &c, positive("r", a.r)?, &opts)?;
            let code = exit_for(rep.verdict);
            (Output::Reports(vec![rep]).with_settings(&opts), a.common.format, a.common.out, code)
        }
        Command::Kuran(a) => {
            let opts = a.common.options()?;
            let d = load_domain(&a.domain)?;
            if a.lambdas.windows(2).any(|w| w[1] >= w[0]) {
                bail!("--lambda values must be strictly decreasing");
            }
            let reps = kuran_limit_check(&d, &a.x0, &a.lambdas, &opts)?;
            let code = exit_for(worst(&reps));
            (Output::Reports(reps).with_settings(&opts), a.common.format, a.common.out, code)
        }
        Command::Theorem1(a) => {
            let opts = a.common.options()?;
            let x0 = point_or_origin(a.x0, a.m)?;
            let rep = theorem1_identity_check(positive("mu", a.mu)?, &x0, positive("r", a.r)?, a.m, &opts)?;
            let code = exit_for(rep.verdict);
            (Output::Reports(vec![rep]).with_settings(&opts), a.common.format, a.common.out, code)
        }
    })
}

fn error_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Estimation(_)) => EXIT_INCONCLUSIVE,
        Some(Error::Internal(_)) => EXIT_INTERNAL,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = run(cli).and_then(|(out, fmt, path, code)| {
        out.emit(fmt, path.as_deref())?;
        Ok(code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}
