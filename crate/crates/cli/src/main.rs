//! `psicoord`: command-line front end for the psicoord library.
//!
//! Machine-readable output goes to stdout, diagnostics to stderr.
//! Exit codes: 64 usage, 65 unreadable or malformed input, 70 domain error;
//! `check` also uses 0 inside, 2 outside, 3 boundary, 4 incomplete certificate.

use std::fmt::{Display, Write as _};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use psicoord::format::sig12;
use psicoord::hexagon::{degeneration_table, tangent_law_residual};
use psicoord::io::{degeneration_csv, parse_complex, parse_metric, parse_psi, psi_json};
use psicoord::paths::{enumerate_fundamental_cycles_with, enumerate_fundamental_paths_with};
use psicoord::polytope::DEFAULT_MEMBERSHIP_TOL;
use psicoord::psi::mass_both;
use psicoord::solver::invert_within;
use psicoord::{
    build_complex, build_polytope, forward_map, invert, EnumerationOptions, HexGeometry,
    IdealTriangulation, JacobianMode, Lambda, PolytopeSystem, Scenario, SolveError, SolveOptions,
    SolveReport, Traversal, Verdict,
};

const EXIT_USAGE: u8 = 64;
const EXIT_INPUT: u8 = 65;
const EXIT_DOMAIN: u8 = 70;

#[derive(Parser)]
#[command(
    name = "psicoord",
    version,
    about = "Edge invariants of ideally triangulated hyperbolic surfaces with boundary"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Angles θ, r-coordinates and tangent-law residual of one hexagon.
    Hex(HexArgs),
    /// Forward map: edge lengths to the ψ_λ vector, as JSON.
    Psi(PsiArgs),
    /// Inequality system (H-representation) bounding the image of the forward map.
    Polytope(PolytopeArgs),
    /// Classify a ψ vector against the inequality system.
    Check(CheckArgs),
    /// Recover edge lengths from a ψ vector.
    Solve(SolveArgs),
    /// List fundamental edge paths (or cycles) as multiplicity vectors with a witness walk.
    Paths(PathsArgs),
    /// Total mass M(λ) by quadrature and by the Beta-function form.
    Mlambda(MlambdaArgs),
    /// CSV of a degenerating hexagon family.
    Probe(ProbeArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct HexInput {
    /// Side lengths l1,l2,l3.
    #[arg(
        long = "l",
        value_delimiter = ',',
        num_args = 1,
        value_name = "L1,L2,L3"
    )]
    lengths: Option<Vec<f64>>,
    /// Opposite sides θ1,θ2,θ3 instead of lengths.
    #[arg(long, value_delimiter = ',', num_args = 1, value_name = "T1,T2,T3")]
    theta: Option<Vec<f64>>,
}

#[derive(Args)]
struct HexArgs {
    #[command(flatten)]
    input: HexInput,
}

#[derive(Args)]
struct LambdaArg {
    /// The exponent λ (any finite decimal).
    #[arg(long, allow_hyphen_values = true)]
    lambda: f64,
}

#[derive(Args)]
struct EnumArgs {
    /// Search-step budget for path and cycle enumeration.
    #[arg(long, default_value_t = psicoord::paths::DEFAULT_CAP)]
    cap: usize,
    /// Allow a walk to leave a hexagon through the edge it entered by.
    #[arg(long)]
    allow_backtrack: bool,
}

impl EnumArgs {
    fn options(&self) -> EnumerationOptions {
        EnumerationOptions {
            cap: self.cap,
            traversal: if self.allow_backtrack {
                Traversal::AllowBacktrack
            } else {
                Traversal::NoBacktrack
            },
        }
    }
}

#[derive(Args)]
struct PsiArgs {
    /// Triangulation file (JSON).
    #[arg(long)]
    complex: PathBuf,
    /// Metric file `{"lengths": [...]}`.
    #[arg(long)]
    metric: PathBuf,
    #[command(flatten)]
    lambda: LambdaArg,
}

#[derive(Args)]
struct PolytopeArgs {
    #[arg(long)]
    complex: PathBuf,
    #[command(flatten)]
    lambda: LambdaArg,
    #[command(flatten)]
    enumeration: EnumArgs,
    /// Drop inequalities that are exact multiples of another.
    #[arg(long)]
    minimize: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, required_unless_present = "system")]
    complex: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "system")]
    lambda: Option<f64>,
    /// Read a previously exported H-representation instead of generating one.
    #[arg(long, conflicts_with_all = ["complex", "lambda"])]
    system: Option<PathBuf>,
    /// ψ file `{"psi": [...]}`.
    #[arg(long)]
    target: PathBuf,
    /// Margins within ±tol (after dividing by the coefficient norm) count as boundary.
    #[arg(long, default_value_t = DEFAULT_MEMBERSHIP_TOL)]
    tol: f64,
    #[command(flatten)]
    enumeration: EnumArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum JacobianArg {
    Analytic,
    FiniteDifference,
    CrossCheck,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    complex: PathBuf,
    #[command(flatten)]
    lambda: LambdaArg,
    #[arg(long)]
    target: PathBuf,
    /// Starting metric file; all lengths 1 when absent.
    #[arg(long)]
    start: Option<PathBuf>,
    /// Write the full report, including the iteration trace, as JSON.
    #[arg(long)]
    report_json: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    max_iterations: usize,
    /// Convergence threshold on the ∞-norm residual.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = JacobianArg::Analytic)]
    jacobian: JacobianArg,
    /// Skip the membership check on the target.
    #[arg(long)]
    no_check: bool,
    #[command(flatten)]
    enumeration: EnumArgs,
}

#[derive(Args)]
struct PathsArgs {
    #[arg(long)]
    complex: PathBuf,
    /// List closed cycles instead of paths.
    #[arg(long)]
    cycles: bool,
    #[command(flatten)]
    enumeration: EnumArgs,
}

#[derive(Args)]
struct MlambdaArgs {
    #[command(flatten)]
    lambda: LambdaArg,
}

#[derive(Args)]
struct ProbeArgs {
    /// i_to_zero, one_to_inf, two_to_inf or three_to_inf.
    #[arg(long)]
    scenario: Scenario,
    /// Comma list `t1,t2,...` or geometric `start:stop:count`.
    #[arg(long, value_parser = parse_grid)]
    grid: Grid,
    /// Values of the lengths that stay fixed, in order (default 1).
    #[arg(long, value_delimiter = ',', num_args = 1)]
    fixed: Vec<f64>,
}

#[derive(Clone)]
struct Grid(Vec<f64>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    if let [a, b, n] = s.split(':').collect::<Vec<_>>()[..] {
        let (a, b) = (num(a)?, num(b)?);
        let n: usize = n.trim().parse().map_err(|e| format!("{n:?}: {e}"))?;
        if n < 2 || !(a > 0.0 && b > 0.0) {
            return Err("geometric grid needs positive ends and at least 2 points".into());
        }
        let ratio = (b / a).powf(1.0 / (n - 1) as f64);
        let mut grid: Vec<f64> = (0..n).map(|i| a * ratio.powi(i as i32)).collect();
        grid[n - 1] = b;
        return Ok(Grid(grid));
    }
    s.split(',').map(num).collect::<Result<_, _>>().map(Grid)
}

enum Failure {
    Usage(String),
    Input(String),
    Domain(String),
}

fn input<E: Display>(path: &Path) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", path.display()))
}

fn domain<E: std::fmt::Debug + Display>(e: E) -> Failure {
    // the Debug form starts with the variant name
    let dbg = format!("{e:?}");
    let name: String = dbg.chars().take_while(|c| c.is_alphanumeric()).collect();
    Failure::Domain(format!("{name}: {e}"))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(input(path))
}

fn load_complex(path: &Path) -> Result<IdealTriangulation, Failure> {
    let spec = parse_complex(&read(path)?).map_err(input(path))?;
    build_complex(&spec).map_err(domain)
}

fn lambda(v: f64) -> Result<Lambda, Failure> {
    Lambda::new(v).map_err(domain)
}

fn row(values: &[f64]) -> String {
    values
        .iter()
        .map(|&x| sig12(x))
        .collect::<Vec<_>>()
        .join(" ")
}

fn hex(args: HexArgs, out: &mut String) -> Result<u8, Failure> {
    let three = |v: Vec<f64>| -> Result<[f64; 3], Failure> {
        v.try_into()
            .map_err(|v: Vec<f64>| Failure::Usage(format!("expected 3 values, got {}", v.len())))
    };
    let g = match (args.input.lengths, args.input.theta) {
        (Some(l), _) => HexGeometry::from_lengths(three(l)?),
        (_, Some(t)) => HexGeometry::from_theta(three(t)?),
        _ => unreachable!("clap requires one input"),
    }
    .map_err(domain)?;
    writeln!(out, "l {}", row(&g.l)).unwrap();
    writeln!(out, "theta {}", row(&g.theta)).unwrap();
    writeln!(out, "r {}", row(&g.r)).unwrap();
    writeln!(out, "tangent_residual {:.3e}", tangent_law_residual(&g)).unwrap();
    Ok(0)
}

fn psi(args: PsiArgs, out: &mut String) -> Result<u8, Failure> {
    let c = load_complex(&args.complex)?;
    let m = parse_metric(&read(&args.metric)?).map_err(input(&args.metric))?;
    let z = forward_map(&c, &m, lambda(args.lambda.lambda)?).map_err(domain)?;
    writeln!(out, "{}", psi_json(&z)).unwrap();
    Ok(0)
}

fn system_for(c: &IdealTriangulation, l: Lambda, e: &EnumArgs) -> PolytopeSystem {
    let system = build_polytope(c, l, &e.options());
    if system.truncated {
        eprintln!(
            "warning: enumeration hit the cap of {}; the system is incomplete",
            e.cap
        );
    }
    system
}

fn polytope(args: PolytopeArgs, out: &mut String) -> Result<u8, Failure> {
    let c = load_complex(&args.complex)?;
    let mut system = system_for(&c, lambda(args.lambda.lambda)?, &args.enumeration);
    if args.minimize {
        system = system.minimize();
    }
    write!(out, "{}", system.export_hrep()).unwrap();
    Ok(0)
}

fn check(args: CheckArgs, out: &mut String) -> Result<u8, Failure> {
    let system = match (&args.system, &args.complex, args.lambda) {
        (Some(path), _, _) => PolytopeSystem::parse_hrep(&read(path)?).map_err(input(path))?,
        (None, Some(path), Some(l)) => {
            system_for(&load_complex(path)?, lambda(l)?, &args.enumeration)
        }
        _ => unreachable!("clap requires a system source"),
    };
    let z = parse_psi(&read(&args.target)?).map_err(input(&args.target))?;
    let m = system.check_membership(&z, args.tol).map_err(domain)?;
    writeln!(out, "verdict {}", m.verdict.as_str()).unwrap();
    writeln!(out, "incomplete_certificate {}", m.incomplete_certificate).unwrap();
    writeln!(out, "min_margin {:.6e}", m.min_margin).unwrap();
    for &i in &m.violated {
        writeln!(out, "violated {}", system.inequalities[i].hrep_line()).unwrap();
    }
    for &i in &m.active {
        writeln!(out, "active {}", system.inequalities[i].hrep_line()).unwrap();
    }
    Ok(match m.verdict {
        Verdict::Outside => 2,
        _ if m.incomplete_certificate => 4,
        Verdict::Boundary => 3,
        Verdict::Inside => 0,
    })
}

fn print_report(r: &SolveReport, out: &mut String) {
    writeln!(out, "converged {}", r.converged).unwrap();
    writeln!(out, "iterations {}", r.iterations).unwrap();
    writeln!(out, "final_residual {:.6e}", r.final_residual).unwrap();
    writeln!(out, "lengths {}", row(r.metric.lengths())).unwrap();
}

fn solve(args: SolveArgs, out: &mut String) -> Result<u8, Failure> {
    let c = load_complex(&args.complex)?;
    let l = lambda(args.lambda.lambda)?;
    let z = parse_psi(&read(&args.target)?).map_err(input(&args.target))?;
    let initial = match &args.start {
        Some(p) => Some(parse_metric(&read(p)?).map_err(input(p))?),
        None => None,
    };
    let opts = SolveOptions {
        max_iterations: args.max_iterations,
        residual_tolerance: args.tol,
        jacobian_mode: match args.jacobian {
            JacobianArg::Analytic => JacobianMode::Analytic,
            JacobianArg::FiniteDifference => JacobianMode::FiniteDifference,
            JacobianArg::CrossCheck => JacobianMode::CrossCheck,
        },
        require_membership: !args.no_check,
        initial,
        enumeration: args.enumeration.options(),
        ..SolveOptions::default()
    };
    let result = if args.no_check {
        invert(&c, &z, l, &opts)
    } else {
        invert_within(&c, &system_for(&c, l, &args.enumeration), &z, l, &opts)
    };
    let report = match result {
        Ok(r) => r,
        Err(SolveError::NoConvergence(r)) => {
            print_report(&r, out);
            write_report(args.report_json.as_deref(), &r)?;
            return Err(domain(SolveError::NoConvergence(r)));
        }
        Err(e) => return Err(domain(e)),
    };
    print_report(&report, out);
    write_report(args.report_json.as_deref(), &report)?;
    Ok(0)
}

fn write_report(path: Option<&Path>, r: &SolveReport) -> Result<(), Failure> {
    if let Some(path) = path {
        let json = serde_json::to_string_pretty(r).expect("report serializes");
        fs::write(path, json + "\n").map_err(input(path))?;
    }
    Ok(())
}

fn paths(args: PathsArgs, out: &mut String) -> Result<u8, Failure> {
    let c = load_complex(&args.complex)?;
    let opts = args.enumeration.options();
    let e = if args.cycles {
        enumerate_fundamental_cycles_with(&c, &opts)
    } else {
        enumerate_fundamental_paths_with(&c, &opts)
    };
    if e.truncated {
        writeln!(out, "# truncated").unwrap();
        eprintln!("warning: enumeration hit the cap of {}", opts.cap);
    }
    for p in &e.items {
        let v = p.multiplicities(c.edge_count());
        let v: Vec<String> = v.iter().map(u8::to_string).collect();
        writeln!(out, "{} # {p}", v.join(" ")).unwrap();
    }
    Ok(0)
}

fn mlambda(args: MlambdaArgs, out: &mut String) -> Result<u8, Failure> {
    let m = mass_both(lambda(args.lambda.lambda)?);
    writeln!(out, "{:.12} {:.12}", m.quadrature, m.beta).unwrap();
    Ok(0)
}

fn probe(args: ProbeArgs, out: &mut String) -> Result<u8, Failure> {
    let rows = degeneration_table(args.scenario, &args.grid.0, &args.fixed).map_err(domain)?;
    write!(out, "{}", degeneration_csv(&rows)).unwrap();
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut out = String::new();
    let outcome = match cli.command {
        Command::Hex(a) => hex(a, &mut out),
        Command::Psi(a) => psi(a, &mut out),
        Command::Polytope(a) => polytope(a, &mut out),
        Command::Check(a) => check(a, &mut out),
        Command::Solve(a) => solve(a, &mut out),
        Command::Paths(a) => paths(a, &mut out),
        Command::Mlambda(a) => mlambda(a, &mut out),
        Command::Probe(a) => probe(a, &mut out),
    };
    // a closed pipe downstream is not an error
    let _ = io::stdout().lock().write_all(out.as_bytes());
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DOMAIN)
        }
    }
}
