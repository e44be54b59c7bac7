//! Command-line front end: four subcommands (`solve`, `norms`, `sweep`,
//! `nopt`) that drive the solver library and emit deterministic CSV.
//!
//! Output format
//! -------------
//! Every run writes a CSV stream that begins with `# key=value` comment
//! lines echoing the run configuration (raw argument strings, so a run can
//! be reproduced from its own output), followed by a header row and data
//! rows.  All reals are printed in scientific notation with the full
//! working precision, so reruns with identical arguments produce
//! byte-identical output.
//!
//! Exit codes
//! ----------
//! * `0` — success.
//! * `1` — usage error: malformed flags, unparsable expressions or numbers,
//!   inconsistent sweep bounds, precision below the supported floor, or an
//!   output path that cannot be written.
//! * `2` — numeric/domain error: nonpositive coefficient, ill-conditioned
//!   matching, overflowing exponents, oracle failure, and similar
//!   conditions that arise after the configuration itself was accepted.

use std::fs::File;
use std::io::Write as _;

use clap::builder::ArgGroup;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use rug::Float;

use crate::cheb::ChebGrid;
use crate::error::{Error, Result};
use crate::oracle::{self, OracleSolution};
use crate::scalar::{fmt_real, Precision, Scalar};
use crate::truncation::{self, SelectionMode};
use crate::wkb::{IVProblem, PhaseTable, WKBSolution, DEFAULT_POSITIVITY_GRID};
use crate::Expr;

/// Default truncation-order ceiling scanned by `solve --auto-N`.
const DEFAULT_SOLVE_N_MAX: usize = 40;
/// Default truncation-order ceiling scanned by `nopt`.
const DEFAULT_NOPT_N_MAX: usize = 60;
/// Default number of output / error-measurement grid points.
const DEFAULT_GRID_POINTS: usize = 257;

#[derive(Parser)]
#[command(
    name = "wkbsolve",
    about = "High-precision WKB solver for eps^2 phi'' + a(x) phi = 0",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one initial-value problem and tabulate the solution on a grid.
    Solve(SolveArgs),
    /// Tabulate sup-norms of the phase-series derivative terms.
    Norms(NormsArgs),
    /// Measure sup-error against an oracle over an epsilon sweep.
    Sweep(SweepArgs),
    /// Measure the optimal truncation order over an epsilon sweep.
    Nopt(NoptArgs),
}

/// Flags shared by every subcommand.
#[derive(Args)]
struct CommonArgs {
    /// Coefficient expression a(x), e.g. "x" or "1 + x^2/4".
    #[arg(long, value_name = "EXPR")]
    a: String,

    /// Interval endpoints, low then high.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    interval: Vec<String>,

    /// Working precision in significant decimal digits (minimum 34).
    #[arg(long, default_value_t = 34)]
    precision: u32,

    /// Chebyshev degree M used for the spectral phase table.
    #[arg(long = "cheb-degree", default_value_t = 64, value_name = "M")]
    cheb_degree: usize,

    /// Output path for the CSV ("-" writes to stdout).
    #[arg(long, default_value = "-", value_name = "PATH")]
    output: String,
}

/// Initial-condition flags shared by `solve`, `sweep`, and `nopt`.
#[derive(Args)]
struct InitialData {
    /// Initial value phi(lo), real and imaginary parts.
    #[arg(
        long,
        num_args = 2,
        value_names = ["RE", "IM"],
        allow_negative_numbers = true,
        conflicts_with = "airy_ic",
        required_unless_present = "airy_ic",
        requires = "phi1"
    )]
    phi0: Vec<String>,

    /// Initial scaled derivative eps*phi'(lo), real and imaginary parts.
    #[arg(
        long,
        num_args = 2,
        value_names = ["RE", "IM"],
        allow_negative_numbers = true,
        conflicts_with = "airy_ic",
        required_unless_present = "airy_ic",
        requires = "phi0"
    )]
    phi1: Vec<String>,

    /// Derive the initial data from the Airy solution
    /// Ai(-x eps^(-2/3)) + i Bi(-x eps^(-2/3)) at the left endpoint.
    #[arg(long = "airy-ic")]
    airy_ic: bool,
}

#[derive(Args)]
#[command(group = ArgGroup::new("order").required(true).args(["n", "auto_n"]))]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Semiclassical parameter epsilon, 0 < eps < 1.
    #[arg(long)]
    eps: String,

    #[command(flatten)]
    ic: InitialData,

    /// Truncation order N of the WKB series (fixed).
    #[arg(long = "N")]
    n: Option<usize>,

    /// Select the truncation order automatically.
    #[arg(long = "auto-N", value_enum, value_name = "RULE")]
    auto_n: Option<AutoRule>,

    /// Largest order scanned when --auto-N is used.
    #[arg(long = "n-max", default_value_t = DEFAULT_SOLVE_N_MAX)]
    n_max: usize,

    /// Number of uniformly spaced output points (ascending, >= 2).
    #[arg(long = "grid-points", default_value_t = DEFAULT_GRID_POINTS)]
    grid_points: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum AutoRule {
    /// Smallest-term rule: minimize eps^n * sup|S_n'| over n.
    LeastTerm,
}

#[derive(Args)]
struct NormsArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Largest order tabulated.
    #[arg(long = "n-max", default_value_t = 30)]
    n_max: usize,
}

/// Geometric epsilon-sweep flags shared by `sweep` and `nopt`.
#[derive(Args)]
struct SweepSpec {
    /// First (largest) epsilon of the sweep.
    #[arg(long = "eps-start")]
    eps_start: String,

    /// Last (smallest) epsilon of the sweep; must be below eps-start.
    #[arg(long = "eps-stop")]
    eps_stop: String,

    /// Number of geometrically spaced sweep points (>= 2).
    #[arg(long = "eps-count")]
    eps_count: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleChoice {
    /// Closed-form Airy solution (requires a(x) = x).
    Airy,
    /// High-order Taylor time stepper with step-halving verification.
    BruteForce,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,

    #[command(flatten)]
    sweep: SweepSpec,

    #[command(flatten)]
    ic: InitialData,

    /// Truncation orders to measure, comma separated.
    #[arg(long = "N-list", value_delimiter = ',', num_args = 1.., required = true)]
    n_list: Vec<usize>,

    /// Reference oracle used to measure the error.
    #[arg(long, value_enum, default_value_t = OracleChoice::Airy)]
    oracle: OracleChoice,

    /// Agreement tolerance for the brute-force oracle.
    #[arg(long = "oracle-tol", default_value = "1e-25")]
    oracle_tol: String,

    /// Number of error-measurement points (Chebyshev distributed).
    #[arg(long = "grid-points", default_value_t = DEFAULT_GRID_POINTS)]
    grid_points: usize,
}

#[derive(Args)]
struct NoptArgs {
    #[command(flatten)]
    common: CommonArgs,

    #[command(flatten)]
    sweep: SweepSpec,

    #[command(flatten)]
    ic: InitialData,

    /// Largest truncation order scanned for the minimum.
    #[arg(long = "n-max", default_value_t = DEFAULT_NOPT_N_MAX)]
    n_max: usize,

    /// Reference oracle used to measure the error.
    #[arg(long, value_enum, default_value_t = OracleChoice::Airy)]
    oracle: OracleChoice,

    /// Agreement tolerance for the brute-force oracle.
    #[arg(long = "oracle-tol", default_value = "1e-25")]
    oracle_tol: String,

    /// Number of error-measurement points (Chebyshev distributed).
    #[arg(long = "grid-points", default_value_t = DEFAULT_GRID_POINTS)]
    grid_points: usize,
}

/// Entry point for the binary: parse, dispatch, and map errors to exit
/// codes.  Returns the process exit code instead of calling `exit` so the
/// caller keeps control (and tests can invoke it in-process).
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help/--version arrive here too; they print to stdout and
            // exit 0, while genuine usage errors go to stderr and exit 1.
            let code = i32::from(err.use_stderr());
            let _ = err.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Norms(args) => cmd_norms(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Nopt(args) => cmd_nopt(&args),
    };
    match outcome {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

/// Exit code for a library error: 1 for configuration/usage problems, 2
/// for numeric or domain failures discovered while computing.
fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. }
        | Error::InvalidNumber { .. }
        | Error::PrecisionTooLow { .. }
        | Error::BadInterval { .. }
        | Error::BadEpsilon { .. }
        | Error::OrderOutOfRange { .. }
        | Error::Unsupported { .. }
        | Error::Io { .. } => 1,
        _ => 2,
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

/// Validated pieces common to all subcommands.
struct CommonSetup {
    expr: Expr,
    lo: Float,
    hi: Float,
    prec: Precision,
}

fn common_setup(common: &CommonArgs) -> Result<CommonSetup> {
    let prec = Precision::new(common.precision)?;
    let expr = Expr::parse(&common.a)?;
    let lo = prec.real_from_decimal(&common.interval[0])?;
    let hi = prec.real_from_decimal(&common.interval[1])?;
    if common.cheb_degree < 4 {
        return Err(Error::Unsupported {
            detail: format!(
                "chebyshev degree {} is too small; need at least 4",
                common.cheb_degree
            ),
        });
    }
    Ok(CommonSetup { expr, lo, hi, prec })
}

fn header_common(common: &CommonArgs, name: &str) -> Vec<(String, String)> {
    vec![
        ("command".into(), name.into()),
        ("a".into(), common.a.clone()),
        ("interval_lo".into(), common.interval[0].clone()),
        ("interval_hi".into(), common.interval[1].clone()),
        ("precision".into(), common.precision.to_string()),
        ("cheb_degree".into(), common.cheb_degree.to_string()),
    ]
}

fn header_initial_data(ic: &InitialData, header: &mut Vec<(String, String)>) {
    if ic.airy_ic {
        header.push(("airy_ic".into(), "true".into()));
    } else {
        header.push(("phi0_re".into(), ic.phi0[0].clone()));
        header.push(("phi0_im".into(), ic.phi0[1].clone()));
        header.push(("phi1_re".into(), ic.phi1[0].clone()));
        header.push(("phi1_im".into(), ic.phi1[1].clone()));
    }
}

/// Resolve the initial data for one epsilon, either from the literal flag
/// strings or from the Airy reference solution at the left endpoint.
fn resolve_initial_data(
    ic: &InitialData,
    lo: &Float,
    eps: &Float,
    prec: Precision,
) -> Result<(Scalar, Scalar)> {
    if ic.airy_ic {
        oracle::airy_initial_data(lo, eps, prec)
    } else {
        let phi0 = Scalar::from_decimal(&ic.phi0[0], &ic.phi0[1], prec)?;
        let phi1 = Scalar::from_decimal(&ic.phi1[0], &ic.phi1[1], prec)?;
        Ok((phi0, phi1))
    }
}

/// Geometrically spaced, strictly decreasing epsilon sweep.
fn geometric_sweep(spec: &SweepSpec, prec: Precision) -> Result<Vec<Float>> {
    let bits = prec.bits();
    let start = prec.real_from_decimal(&spec.eps_start)?;
    let stop = prec.real_from_decimal(&spec.eps_stop)?;
    if spec.eps_count < 2 {
        return Err(Error::Unsupported {
            detail: format!("eps-count {} is too small; need at least 2", spec.eps_count),
        });
    }
    if !(start.is_finite() && stop.is_finite() && stop > 0 && start > stop) {
        return Err(Error::Unsupported {
            detail: format!(
                "sweep requires eps-start > eps-stop > 0, got [{}, {}]",
                fmt_real(&start, 6),
                fmt_real(&stop, 6)
            ),
        });
    }
    let ln_start = Float::with_val(bits, &start).ln();
    let ln_stop = Float::with_val(bits, &stop).ln();
    let span = ln_stop - &ln_start;
    let denom = (spec.eps_count - 1) as u32;
    let mut out = Vec::with_capacity(spec.eps_count);
    for i in 0..spec.eps_count {
        if i == 0 {
            out.push(start.clone());
        } else if i == spec.eps_count - 1 {
            out.push(stop.clone());
        } else {
            let frac = Float::with_val(bits, &span * (i as u32)) / denom;
            out.push((frac + &ln_start).exp());
        }
    }
    Ok(out)
}

/// Ascending uniformly spaced grid with exact endpoints.
fn uniform_grid(lo: &Float, hi: &Float, points: usize, prec: Precision) -> Result<Vec<Float>> {
    if points < 2 {
        return Err(Error::Unsupported {
            detail: format!("grid-points {points} is too small; need at least 2"),
        });
    }
    let bits = prec.bits();
    let span = Float::with_val(bits, hi - lo);
    let denom = (points - 1) as u32;
    let mut xs = Vec::with_capacity(points);
    for i in 0..points {
        if i == 0 {
            xs.push(lo.clone());
        } else if i == points - 1 {
            xs.push(hi.clone());
        } else {
            let step = Float::with_val(bits, &span * (i as u32)) / denom;
            xs.push(step + lo);
        }
    }
    Ok(xs)
}

/// Ascending Chebyshev-distributed grid (clusters points near the
/// endpoints, where WKB error peaks are most likely).
fn cheb_grid_ascending(
    lo: &Float,
    hi: &Float,
    points: usize,
    prec: Precision,
) -> Result<Vec<Float>> {
    if points < 2 {
        return Err(Error::Unsupported {
            detail: format!("grid-points {points} is too small; need at least 2"),
        });
    }
    let grid = ChebGrid::new(lo, hi, points - 1, prec)?;
    let mut xs: Vec<Float> = grid.nodes().to_vec();
    xs.reverse();
    Ok(xs)
}

/// Compute the oracle solution for one problem on one grid.
fn run_oracle(
    choice: OracleChoice,
    tol_text: &str,
    problem: &IVProblem,
    xs: &[Float],
) -> Result<OracleSolution> {
    match choice {
        OracleChoice::Airy => oracle::airy_analytic(problem, xs),
        OracleChoice::BruteForce => {
            let tol = problem.prec().real_from_decimal(tol_text)?;
            oracle::integrate_ivp(problem, &tol, xs)
        }
    }
}

fn oracle_name(choice: OracleChoice) -> &'static str {
    match choice {
        OracleChoice::Airy => "airy",
        OracleChoice::BruteForce => "brute-force",
    }
}

/// Serialize the header comments, column names, and rows, then write the
/// whole CSV atomically to the chosen destination.
fn write_csv(
    output: &str,
    header: &[(String, String)],
    columns: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut text = String::new();
    for (key, value) in header {
        text.push_str("# ");
        text.push_str(key);
        text.push('=');
        text.push_str(value);
        text.push('\n');
    }
    text.push_str(&columns.join(","));
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    let io_err = |err: std::io::Error| Error::Io {
        detail: format!("cannot write {output}: {err}"),
    };
    if output == "-" {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        lock.write_all(text.as_bytes()).map_err(io_err)?;
        lock.flush().map_err(io_err)?;
    } else {
        let mut file = File::create(output).map_err(io_err)?;
        file.write_all(text.as_bytes()).map_err(io_err)?;
        file.flush().map_err(io_err)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let setup = common_setup(&args.common)?;
    let digits = setup.prec.digits();
    let eps = setup.prec.real_from_decimal(&args.eps)?;
    let (phi0, phi1) = resolve_initial_data(&args.ic, &setup.lo, &eps, setup.prec)?;
    let problem = IVProblem::new(
        setup.expr.clone(),
        &setup.lo,
        &setup.hi,
        &eps,
        phi0,
        phi1,
        DEFAULT_POSITIVITY_GRID,
        setup.prec,
    )?;

    let table_n_max = match args.n {
        Some(n) => n,
        None => args.n_max,
    };
    let table = PhaseTable::build(
        &setup.expr,
        &setup.lo,
        &setup.hi,
        table_n_max,
        args.common.cheb_degree,
        setup.prec,
    )?;
    table.require_resolved()?;

    let selected_n = match args.n {
        Some(n) => n,
        None => {
            let report = truncation::least_term_n(&table, &eps, false)?;
            report.n_selected()
        }
    };

    let solution = WKBSolution::new(&table, &problem, selected_n)?;
    let xs = uniform_grid(&setup.lo, &setup.hi, args.grid_points, setup.prec)?;
    let rows = xs
        .par_iter()
        .map(|x| {
            let (phi, eps_dphi) = solution.evaluate_with_derivative(x)?;
            Ok(vec![
                fmt_real(x, digits),
                fmt_real(phi.re(), digits),
                fmt_real(phi.im(), digits),
                fmt_real(eps_dphi.re(), digits),
                fmt_real(eps_dphi.im(), digits),
            ])
        })
        .collect::<Result<Vec<_>>>()?;

    let mut header = header_common(&args.common, "solve");
    header.push(("eps".into(), args.eps.clone()));
    header_initial_data(&args.ic, &mut header);
    match args.n {
        Some(n) => header.push(("N".into(), n.to_string())),
        None => {
            header.push(("auto_N".into(), "least-term".into()));
            header.push(("n_max".into(), args.n_max.to_string()));
        }
    }
    header.push(("selected_N".into(), selected_n.to_string()));
    header.push(("grid_points".into(), args.grid_points.to_string()));

    write_csv(
        &args.common.output,
        &header,
        &["x", "re_phi", "im_phi", "re_eps_dphi", "im_eps_dphi"],
        &rows,
    )
}

fn cmd_norms(args: &NormsArgs) -> Result<()> {
    let setup = common_setup(&args.common)?;
    let digits = setup.prec.digits();
    let bits = setup.prec.bits();
    // Validate positivity up front so a bad coefficient reports the same
    // diagnostic the solver commands give.
    setup
        .expr
        .validate_positivity(&setup.lo, &setup.hi, DEFAULT_POSITIVITY_GRID, setup.prec)?;
    let table = PhaseTable::build(
        &setup.expr,
        &setup.lo,
        &setup.hi,
        args.n_max,
        args.common.cheb_degree,
        setup.prec,
    )?;
    table.require_resolved()?;

    // Conjectured factorial-over-power envelope sqrt(3) * K2^n * n^n with
    // the fitted growth constant K2 = 10/37 for the linear coefficient.
    let sqrt3 = Float::with_val(bits, 3u32).sqrt();
    let k2 = Float::with_val(bits, 10u32) / 37u32;
    let mut rows = Vec::with_capacity(args.n_max + 1);
    for n in 0..=args.n_max {
        let bound = if n == 0 {
            sqrt3.clone()
        } else {
            let ln_n = Float::with_val(bits, n as u32).ln();
            let ln_k2 = Float::with_val(bits, &k2).ln();
            let exponent = Float::with_val(bits, &ln_k2 + &ln_n) * (n as u32);
            Float::with_val(bits, &exponent.exp() * &sqrt3)
        };
        rows.push(vec![
            n.to_string(),
            fmt_real(table.sup_norm(n)?, digits),
            fmt_real(&bound, digits),
        ]);
    }

    let mut header = header_common(&args.common, "norms");
    header.push(("n_max".into(), args.n_max.to_string()));

    write_csv(
        &args.common.output,
        &header,
        &["n", "sup_norm_Snprime", "bound_sqrt3_K2n_nn"],
        &rows,
    )
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let setup = common_setup(&args.common)?;
    let digits = setup.prec.digits();
    if args.n_list.is_empty() {
        return Err(Error::Unsupported {
            detail: "N-list must contain at least one order".into(),
        });
    }
    let table_n_max = *args.n_list.iter().max().expect("nonempty");
    let eps_list = geometric_sweep(&args.sweep, setup.prec)?;
    let xs = cheb_grid_ascending(&setup.lo, &setup.hi, args.grid_points, setup.prec)?;

    // The phase table is epsilon-independent; build it once and share it
    // across the whole sweep.
    let table = PhaseTable::build(
        &setup.expr,
        &setup.lo,
        &setup.hi,
        table_n_max,
        args.common.cheb_degree,
        setup.prec,
    )?;
    table.require_resolved()?;

    let per_eps = eps_list
        .par_iter()
        .map(|eps| {
            let (phi0, phi1) = resolve_initial_data(&args.ic, &setup.lo, eps, setup.prec)?;
            let problem = IVProblem::new(
                setup.expr.clone(),
                &setup.lo,
                &setup.hi,
                eps,
                phi0,
                phi1,
                DEFAULT_POSITIVITY_GRID,
                setup.prec,
            )?;
            let reference = run_oracle(args.oracle, &args.oracle_tol, &problem, &xs)?;
            let curve = truncation::error_curve(&problem, &table, &reference)?;
            let mut rows = Vec::with_capacity(args.n_list.len());
            for &n in &args.n_list {
                rows.push(vec![
                    fmt_real(eps, digits),
                    n.to_string(),
                    fmt_real(&curve[n], digits),
                ]);
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<String>> = per_eps.into_iter().flatten().collect();

    let mut header = header_common(&args.common, "sweep");
    header.push(("eps_start".into(), args.sweep.eps_start.clone()));
    header.push(("eps_stop".into(), args.sweep.eps_stop.clone()));
    header.push(("eps_count".into(), args.sweep.eps_count.to_string()));
    header_initial_data(&args.ic, &mut header);
    let n_list_text = args
        .n_list
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",");
    header.push(("N_list".into(), n_list_text));
    header.push(("oracle".into(), oracle_name(args.oracle).into()));
    if args.oracle == OracleChoice::BruteForce {
        header.push(("oracle_tol".into(), args.oracle_tol.clone()));
    }
    header.push(("grid_points".into(), args.grid_points.to_string()));

    write_csv(
        &args.common.output,
        &header,
        &["eps", "N", "sup_error"],
        &rows,
    )
}

fn cmd_nopt(args: &NoptArgs) -> Result<()> {
    let setup = common_setup(&args.common)?;
    let digits = setup.prec.digits();
    let bits = setup.prec.bits();
    let eps_list = geometric_sweep(&args.sweep, setup.prec)?;
    let xs = cheb_grid_ascending(&setup.lo, &setup.hi, args.grid_points, setup.prec)?;

    let table = PhaseTable::build(
        &setup.expr,
        &setup.lo,
        &setup.hi,
        args.n_max,
        args.common.cheb_degree,
        setup.prec,
    )?;
    table.require_resolved()?;

    let rows = eps_list
        .par_iter()
        .map(|eps| {
            let (phi0, phi1) = resolve_initial_data(&args.ic, &setup.lo, eps, setup.prec)?;
            let problem = IVProblem::new(
                setup.expr.clone(),
                &setup.lo,
                &setup.hi,
                eps,
                phi0,
                phi1,
                DEFAULT_POSITIVITY_GRID,
                setup.prec,
            )?;
            let reference = run_oracle(args.oracle, &args.oracle_tol, &problem, &xs)?;
            let report = truncation::oracle_optimal_n(&problem, &table, &reference)?;
            debug_assert!(matches!(report.mode(), SelectionMode::OracleMeasured));
            if report.boundary_hit() {
                return Err(Error::BoundaryArgmin { n_max: args.n_max });
            }
            // Superasymptotic envelope exp(-6/(5 eps)) / (5 eps^2) for the
            // linear-coefficient problem on [1,2].
            let five_eps = Float::with_val(bits, eps * 5u32);
            let arg = -Float::with_val(bits, 6u32 / &five_eps);
            let envelope = arg.exp() / (Float::with_val(bits, eps * &five_eps));
            Ok(vec![
                fmt_real(eps, digits),
                report.n_selected().to_string(),
                fmt_real(report.selected_score(), digits),
                fmt_real(&envelope, digits),
            ])
        })
        .collect::<Result<Vec<_>>>()?;

    let mut header = header_common(&args.common, "nopt");
    header.push(("eps_start".into(), args.sweep.eps_start.clone()));
    header.push(("eps_stop".into(), args.sweep.eps_stop.clone()));
    header.push(("eps_count".into(), args.sweep.eps_count.to_string()));
    header_initial_data(&args.ic, &mut header);
    header.push(("n_max".into(), args.n_max.to_string()));
    header.push(("oracle".into(), oracle_name(args.oracle).into()));
    if args.oracle == OracleChoice::BruteForce {
        header.push(("oracle_tol".into(), args.oracle_tol.clone()));
    }
    header.push(("grid_points".into(), args.grid_points.to_string()));

    write_csv(
        &args.common.output,
        &header,
        &["eps", "N_opt", "optimal_error", "envelope"],
        &rows,
    )
}
