//! `sternfarey`: reproducible experiments with CSV output.

mod args;
mod csv;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sternfarey::dynamics::{
    distortion_check, restricted_preimage, sum_level_report,
};
use sternfarey::exact::{fmt_rational, rat, Rational};
use sternfarey::farey::{
    farey_enumerate, height_ball_mass, height_bound, mass_deviation, farey_weighted_mass,
    toeplitz_chain, ZETA2,
};
use sternfarey::measures::{ks_distance, measure_report, MeasureKind, TargetCdf};
use sternfarey::poincare::{algebraic_sum, geometric_sum, BallSummary};
use sternfarey::selftest::{self, Check};
use sternfarey::stern_brocot::{even_sequence, kappa_sum, mass_rows, SternBrocotLevel};
use sternfarey::transfer::{
    dclass_check, transfer_apply_n, uniformly_returning_report, TestFunction,
};
use sternfarey::Scalar;

use crate::csv::Csv;

/// Exact rational CSV fields are written as `p/q`; floats use the shortest
/// representation that round-trips.
#[derive(Parser)]
#[command(name = "sternfarey", version, about)]
struct Cli {
    /// Worker threads for the parallel parts (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the CSV here instead of stdout, plus a FILE.manifest with the
    /// parameters.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Run the exact invariant checks of the command's module instead.
    #[arg(long, global = true)]
    selftest: bool,
    #[command(subcommand)]
    group: Group,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Subcommand)]
enum Group {
    /// Stern-Brocot levels, S_n and preimage-tree identities.
    #[command(subcommand)]
    Stern(SternCmd),
    /// Farey sequences and totient sums.
    #[command(subcommand)]
    Farey(FareyCmd),
    /// Exact interval dynamics of the Farey map.
    #[command(subcommand)]
    Dynamics(DynamicsCmd),
    /// Weighted empirical measures and KS distances.
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// Transfer operator evaluations.
    #[command(subcommand)]
    Transfer(TransferCmd),
    /// Partial Poincare sums of PSL2(Z).
    #[command(subcommand)]
    Poincare(PoincareCmd),
}

#[derive(Subcommand)]
enum SternCmd {
    /// All 2^n + 1 entries of level n.
    Level {
        #[arg(long, default_value_t = 4)]
        n: u32,
    },
    /// S_n, the entries new at level n.
    Seq {
        #[arg(long, default_value_t = 4)]
        n: u32,
    },
    /// Sum of 1/(pq) over T^-n(v/w) against 1/(vw).
    Identity {
        #[arg(long, default_value = "1/2")]
        vw: String,
        #[arg(long, default_value = "12")]
        n: String,
    },
    /// Sum of q^-2 over S_n.
    Mass {
        #[arg(long, default_value = "4..16")]
        n: String,
    },
}

#[derive(Subcommand)]
enum FareyCmd {
    /// F_n in ascending order.
    Enum {
        #[arg(long, default_value_t = 5)]
        n: u64,
    },
    /// Sum of phi(q)/q^2 and zeta(2)*mass - ln n.
    Mass {
        #[arg(long, default_value = "1000,10000,100000")]
        n: String,
    },
    /// Toeplitz chain for f(x) = x*exp(t*x).
    Toeplitz {
        #[arg(long, default_value = "10,100,1000")]
        n: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t: f64,
    },
    /// Height-ball mass over q <= exp(n/2) and its zeta(2)/n scaling.
    Height {
        #[arg(long, default_value = "4,8,12,16,20")]
        n: String,
    },
}

#[derive(Subcommand)]
enum DynamicsCmd {
    /// Exact measures of the sum-level sets T^-(n-1)([1/2,1]).
    Sumlevel {
        #[arg(long, default_value = "1..12")]
        n: String,
    },
    /// Components of T^-n([alpha,beta]).
    Preimage {
        #[arg(long, default_value = "1/2")]
        alpha: String,
        #[arg(long, default_value = "1")]
        beta: String,
        #[arg(long, default_value_t = 3)]
        n: u32,
    },
    /// Lebesgue CDF of T^-n([alpha,beta]), raw and normalised.
    RestrictedCdf {
        #[arg(long, default_value = "1/2")]
        alpha: String,
        #[arg(long, default_value = "1")]
        beta: String,
        #[arg(long, default_value = "2,6,10")]
        n: String,
        #[arg(long, default_value = "1/4,1/2,3/4")]
        x: String,
    },
    /// Bounded-distortion ratio for words g, h over {0,1}.
    Distortion {
        #[arg(long, default_value = "0")]
        g: String,
        #[arg(long, default_value = "1")]
        h: String,
        #[arg(long, default_value = "1/10,1/20,1/40")]
        eps: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Builder {
    Stern,
    SternUnweighted,
    Farey,
    FareyUnweighted,
    Preimage,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long, value_enum, default_value_t = Builder::Stern)]
    builder: Builder,
    /// Root v/w for the preimage builder.
    #[arg(long, default_value = "1/2")]
    vw: String,
}

impl MeasureArgs {
    fn kind(&self) -> Result<MeasureKind> {
        Ok(match self.builder {
            Builder::Stern => MeasureKind::SternWeighted,
            Builder::SternUnweighted => MeasureKind::SternUnweighted,
            Builder::Farey => MeasureKind::FareyWeighted,
            Builder::FareyUnweighted => MeasureKind::FareyUnweighted,
            Builder::Preimage => MeasureKind::Preimage(args::rational(&self.vw)?),
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Uniform,
    Minkowski,
}

#[derive(Subcommand)]
enum MeasureCmd {
    /// Atoms and weights of one measure.
    Build {
        #[command(flatten)]
        which: MeasureArgs,
        #[arg(long, default_value_t = 4)]
        n: u64,
    },
    /// KS distance of the normalised measure to a target CDF.
    Ks {
        #[command(flatten)]
        which: MeasureArgs,
        #[arg(long, default_value = "10,14,18")]
        n: String,
        #[arg(long, value_enum, default_value_t = Target::Uniform)]
        target: Target,
    },
    /// Total mass and both KS distances.
    Report {
        #[command(flatten)]
        which: MeasureArgs,
        #[arg(long, default_value = "10,14,18")]
        n: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Function {
    One,
    Identity,
    Reciprocal,
    Phi,
}

#[derive(Subcommand)]
enum TransferCmd {
    /// T^n f(x) by the preimage-tree sum.
    Iterate {
        #[arg(long, value_enum, default_value_t = Function::One)]
        f: Function,
        /// Parameter of f = phi.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value = "0..4")]
        n: String,
        #[arg(long, default_value = "1/3,1/2,3/4")]
        x: String,
    },
    /// ln(n) * T^n phi_t(x) against mu(phi_t).
    Returning {
        #[arg(long, default_value = "-1,0,1", allow_negative_numbers = true)]
        t: String,
        #[arg(long, default_value = "1024,16384,262144")]
        n: String,
        #[arg(long, default_value = "1/3,1/2,3/4")]
        x: String,
    },
    /// Sign checks of the closed-form derivatives of T phi_t.
    Dclass {
        #[arg(long, default_value = "-1,-0.5,0,0.5,1", allow_negative_numbers = true)]
        t: String,
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
}

#[derive(Subcommand)]
enum PoincareCmd {
    /// Sum over the displacement ball of radius R around i.
    Geometric {
        #[arg(long = "R", default_value = "6,8,10")]
        r: String,
    },
    /// Sum over the word-length ball of length L.
    Algebraic {
        #[arg(long = "L", default_value = "10,12,15")]
        l: String,
    },
}

/// Exit status for a violated exact identity.
const VIOLATION: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            bail!("--jobs must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()?;
    }
    if cli.selftest {
        return run_selftest(&cli.group);
    }
    let out = cli.out.as_deref();
    let exact = cli.mode == Mode::Exact;
    let ok = match &cli.group {
        Group::Stern(cmd) => stern(cmd, out, exact)?,
        Group::Farey(cmd) => farey(cmd, out, exact)?,
        Group::Dynamics(cmd) => dynamics(cmd, out, exact)?,
        Group::Measure(cmd) => measure(cmd, out, exact)?,
        Group::Transfer(cmd) => transfer(cmd, out, exact)?,
        Group::Poincare(cmd) => poincare(cmd, out)?,
    };
    if let Some(path) = out {
        write_manifest(path, ok)?;
    }
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(VIOLATION)
    })
}

/// `FILE.manifest` next to the CSV: everything needed to rerun it.
fn write_manifest(csv: &std::path::Path, ok: bool) -> Result<()> {
    let mut path = csv.as_os_str().to_owned();
    path.push(".manifest");
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let text = format!(
        "program=sternfarey {}\nargs={}\nthreads={}\nidentities_hold={ok}\n",
        env!("CARGO_PKG_VERSION"),
        argv.join(" "),
        rayon::current_num_threads(),
    );
    std::fs::write(&path, text)
        .with_context(|| format!("writing {}", PathBuf::from(path).display()))
}

fn run_selftest(group: &Group) -> Result<ExitCode> {
    let checks: Vec<Check> = match group {
        Group::Stern(_) => {
            let mut c = selftest::exact_core()?;
            c.extend(selftest::stern_brocot()?);
            c
        }
        Group::Farey(_) => selftest::farey()?,
        Group::Dynamics(_) => selftest::dynamics()?,
        Group::Measure(_) => selftest::measures()?,
        Group::Transfer(_) => selftest::transfer()?,
        Group::Poincare(_) => selftest::poincare()?,
    };
    let mut ok = true;
    for c in &checks {
        println!("{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
        ok &= c.passed;
    }
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(VIOLATION)
    })
}

type Out<'a> = Option<&'a std::path::Path>;

fn value_field(x: &Rational, exact: bool) -> String {
    if exact {
        fmt_rational(x)
    } else {
        x.to_f64().to_string()
    }
}

fn stern(cmd: &SternCmd, out: Out, exact: bool) -> Result<bool> {
    match cmd {
        SternCmd::Level { n } => {
            let level = SternBrocotLevel::build(*n)?;
            let mut csv = Csv::create(out, &["k", "value"])?;
            for (k, x) in level.entries().iter().enumerate() {
                csv.row([k.to_string(), value_field(x, exact)])?;
            }
            csv.finish()?;
            Ok(level.is_unimodular())
        }
        SternCmd::Seq { n } => {
            let mut csv = Csv::create(out, &["k", "value"])?;
            for (k, x) in even_sequence(*n)?.iter().enumerate() {
                csv.row([(k + 1).to_string(), value_field(x, exact)])?;
            }
            csv.finish()?;
            Ok(true)
        }
        SternCmd::Identity { vw, n } => {
            let target = args::rational(vw)?;
            let expected = Rational::from_integer(target.numer() * target.denom()).recip();
            let mut ok = true;
            for n in args::schedule::<u32>(n)? {
                let sum = kappa_sum(&target, n)?;
                let holds = sum == expected;
                println!(
                    "{} {} {}",
                    fmt_rational(&sum),
                    if holds { "==" } else { "!=" },
                    fmt_rational(&expected)
                );
                ok &= holds;
            }
            Ok(ok)
        }
        SternCmd::Mass { n } => {
            let schedule = args::schedule::<u32>(n)?;
            let limit = if exact { u32::MAX } else { 0 };
            let mut csv = Csv::create(out, &["n", "mass", "mass_exact", "mass_log_n"])?;
            for row in mass_rows(&schedule, limit)? {
                let exact_field = row.exact.as_ref().map(fmt_rational).unwrap_or_default();
                csv.row([
                    row.n.to_string(),
                    row.mass.to_string(),
                    exact_field,
                    row.mass_log_n.to_string(),
                ])?;
            }
            csv.finish()?;
            Ok(true)
        }
    }
}

fn farey(cmd: &FareyCmd, out: Out, exact: bool) -> Result<bool> {
    match cmd {
        FareyCmd::Enum { n } => {
            let level = farey_enumerate(*n)?;
            let mut csv = Csv::create(out, &["k", "value"])?;
            for (k, x) in level.entries().iter().enumerate() {
                csv.row([(k + 1).to_string(), value_field(x, exact)])?;
            }
            csv.finish()?;
            Ok(level.is_unimodular())
        }
        FareyCmd::Mass { n } => {
            let schedule = args::schedule::<u64>(n)?;
            if exact {
                // ζ(2) stays symbolic: report the exact mass and ln n apart
                let mut csv = Csv::create(out, &["n", "mass", "ln_n"])?;
                for n in schedule {
                    let mass = farey_weighted_mass(n)?;
                    csv.row([n.to_string(), fmt_rational(&mass), (n as f64).ln().to_string()])?;
                }
                csv.finish()?;
            } else {
                let mut csv = Csv::create(out, &["n", "mass", "zeta2_mass_minus_ln_n"])?;
                for (n, mass, d) in mass_deviation(&schedule)? {
                    csv.row([n.to_string(), mass.to_string(), d.to_string()])?;
                }
                csv.finish()?;
            }
            Ok(true)
        }
        FareyCmd::Toeplitz { n, t } => {
            let t = *t;
            let mut csv = Csv::create(out, &["n", "chi", "cesaro"])?;
            for n in args::schedule::<u64>(n)? {
                let p = toeplitz_chain(|x| x * (t * x).exp(), n)?;
                csv.row([n.to_string(), p.chi.to_string(), p.cesaro.to_string()])?;
            }
            csv.finish()?;
            Ok(true)
        }
        FareyCmd::Height { n } => {
            let mut csv = Csv::create(out, &["n", "q_max", "mass", "zeta2_mass_over_n"])?;
            for n in args::schedule::<u32>(n)? {
                let mass = height_ball_mass(n)?;
                csv.row([
                    n.to_string(),
                    height_bound(n).to_string(),
                    mass.to_string(),
                    (ZETA2 * mass / f64::from(n)).to_string(),
                ])?;
            }
            csv.finish()?;
            Ok(true)
        }
    }
}

fn dynamics(cmd: &DynamicsCmd, out: Out, exact: bool) -> Result<bool> {
    match cmd {
        DynamicsCmd::Sumlevel { n } => {
            let schedule = args::schedule::<u32>(n)?;
            let mut csv = Csv::create(out, &["n", "lambda_num", "lambda_den", "lambda_log2_n"])?;
            for row in sum_level_report(&schedule)? {
                csv.row([
                    row.n.to_string(),
                    row.lambda.numer().to_string(),
                    row.lambda.denom().to_string(),
                    row.lambda_log2_n.to_string(),
                ])?;
            }
            csv.finish()?;
            Ok(true)
        }
        DynamicsCmd::Preimage { alpha, beta, n } => {
            let set = restricted_preimage(&args::rational(alpha)?, &args::rational(beta)?, *n)?;
            let mut csv = Csv::create(out, &["lo", "hi"])?;
            for (lo, hi) in set.components() {
                csv.row([value_field(lo, exact), value_field(hi, exact)])?;
            }
            csv.finish()?;
            Ok(true)
        }
        DynamicsCmd::RestrictedCdf { alpha, beta, n, x } => {
            let (a, b) = (args::rational(alpha)?, args::rational(beta)?);
            let xs = args::rationals(x)?;
            let mut csv = Csv::create(out, &["n", "x", "cdf", "normalized_cdf"])?;
            for n in args::schedule::<u32>(n)? {
                let set = restricted_preimage(&a, &b, n)?;
                let total = set.measure();
                for x in &xs {
                    sternfarey::exact::ensure_unit_interval("x", x, false)?;
                    let cdf = set.cdf(x);
                    let normalized = &cdf / &total;
                    csv.row([
                        n.to_string(),
                        fmt_rational(x),
                        value_field(&cdf, exact),
                        value_field(&normalized, exact),
                    ])?;
                }
            }
            csv.finish()?;
            Ok(true)
        }
        DynamicsCmd::Distortion { g, h, eps } => {
            let (g, h) = (args::word(g)?, args::word(h)?);
            let mut csv = Csv::create(out, &["eps", "lhs", "rhs", "ratio"])?;
            for e in args::rationals(eps)? {
                let d = distortion_check(&g, &h, &e)?;
                csv.row([
                    fmt_rational(&e),
                    value_field(&d.lhs, exact),
                    value_field(&d.rhs, exact),
                    d.ratio.to_string(),
                ])?;
            }
            csv.finish()?;
            Ok(true)
        }
    }
}

fn measure(cmd: &MeasureCmd, out: Out, exact: bool) -> Result<bool> {
    match cmd {
        MeasureCmd::Build { which, n } => {
            let kind = which.kind()?;
            let mut csv = Csv::create(out, &["point", "weight", "scale"])?;
            if exact {
                let m = kind.build::<Rational>(*n)?;
                let scale = m.scale().to_string();
                for (x, w) in m.atoms() {
                    csv.row([fmt_rational(x), fmt_rational(w), scale.clone()])?;
                }
            } else {
                let m = kind.build::<f64>(*n)?;
                let scale = m.scale().to_string();
                for (x, w) in m.atoms() {
                    csv.row([x.to_f64().to_string(), w.to_string(), scale.clone()])?;
                }
            }
            csv.finish()?;
            Ok(true)
        }
        MeasureCmd::Ks { which, n, target } => {
            let kind = which.kind()?;
            let target = match target {
                Target::Uniform => TargetCdf::Uniform,
                Target::Minkowski => TargetCdf::MinkowskiQ,
            };
            let mut csv = Csv::create(out, &["n", "ks"])?;
            for n in args::schedule::<u64>(n)? {
                let m = kind.build::<f64>(n)?.normalized()?;
                csv.row([n.to_string(), ks_distance(&m, target)?.to_string()])?;
            }
            csv.finish()?;
            Ok(true)
        }
        MeasureCmd::Report { which, n } => {
            let kind = which.kind()?;
            let schedule = args::schedule::<u64>(n)?;
            let mut csv = Csv::create(out, &["n", "total_mass", "ks_uniform", "ks_minkowski"])?;
            for row in measure_report(&kind, &schedule)? {
                csv.row([
                    row.n.to_string(),
                    row.total_mass.to_string(),
                    row.ks_uniform.to_string(),
                    row.ks_minkowski.to_string(),
                ])?;
            }
            csv.finish()?;
            Ok(true)
        }
    }
}

fn transfer(cmd: &TransferCmd, out: Out, exact: bool) -> Result<bool> {
    match cmd {
        TransferCmd::Iterate { f, t, n, x } => {
            let func = match f {
                Function::One => TestFunction::One,
                Function::Identity => TestFunction::Identity,
                Function::Reciprocal => TestFunction::Reciprocal,
                Function::Phi => TestFunction::PhiT(*t),
            };
            let xs = args::rationals(x)?;
            let mut ok = true;
            let mut csv = Csv::create(out, &["n", "x", "value"])?;
            for n in args::schedule::<u32>(n)? {
                for x in &xs {
                    let value = if exact {
                        let v: Rational = transfer_apply_n(&func, n, x)?;
                        if *f == Function::One {
                            ok &= v == rat(1, 1);
                        }
                        fmt_rational(&v)
                    } else {
                        transfer_apply_n::<f64>(&func, n, x)?.to_string()
                    };
                    csv.row([n.to_string(), fmt_rational(x), value])?;
                }
            }
            csv.finish()?;
            Ok(ok)
        }
        TransferCmd::Returning { t, n, x } => {
            let schedule = args::schedule::<usize>(n)?;
            let xs = args::floats(x)?;
            let mut csv = Csv::create(
                out,
                &["t", "n", "x", "scaled_value", "target", "abs_error"],
            )?;
            for t in args::floats(t)? {
                for row in uniformly_returning_report(t, &xs, &schedule)? {
                    csv.row([
                        row.t.to_string(),
                        row.n.to_string(),
                        row.x.to_string(),
                        row.scaled.to_string(),
                        row.target.to_string(),
                        row.abs_error.to_string(),
                    ])?;
                }
            }
            csv.finish()?;
            Ok(true)
        }
        TransferCmd::Dclass { t, grid } => {
            let mut csv = Csv::create(
                out,
                &["t", "min_first", "max_second", "fd_max_error", "holds"],
            )?;
            for t in args::floats(t)? {
                let row = dclass_check(t, *grid)?;
                csv.row([
                    row.t.to_string(),
                    row.min_first.to_string(),
                    row.max_second.to_string(),
                    row.fd_max_error.to_string(),
                    row.holds().to_string(),
                ])?;
            }
            csv.finish()?;
            Ok(true)
        }
    }
}

fn write_balls(out: Out, rows: Vec<BallSummary>) -> Result<()> {
    let mut csv = Csv::create(out, &["param", "count", "sum", "normalized"])?;
    for r in rows {
        csv.row([
            r.param.to_string(),
            r.count.to_string(),
            r.sum.to_string(),
            r.normalized.to_string(),
        ])?;
    }
    csv.finish()
}

fn poincare(cmd: &PoincareCmd, out: Out) -> Result<bool> {
    match cmd {
        PoincareCmd::Geometric { r } => {
            let mut radii = args::floats(r)?;
            if radii.windows(2).any(|w| w[0] >= w[1]) {
                bail!("--R must be strictly ascending");
            }
            let rows = radii
                .drain(..)
                .map(geometric_sum)
                .collect::<sternfarey::Result<Vec<_>>>()?;
            write_balls(out, rows)?;
            Ok(true)
        }
        PoincareCmd::Algebraic { l } => {
            let rows = args::schedule::<u32>(l)?
                .into_iter()
                .map(algebraic_sum)
                .collect::<sternfarey::Result<Vec<_>>>()?;
            write_balls(out, rows)?;
            Ok(true)
        }
    }
}
