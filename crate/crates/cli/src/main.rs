use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use reesolve_core::basicobj::invariant_disagreements;
use reesolve_core::blowup::transform_marked;
use reesolve_core::parse::parse_rat;
use reesolve_core::rees::diff_closure;
use reesolve_core::resolution::{certify_leaves, check_monotone, origin};
use reesolve_core::singular::{contains_point, default_grid, ord_at, sing_ideal, sing_is_empty_on};
use reesolve_core::{
    fmt_rat, resolve, traces_equal, CenterSpec, Error, Limits, Membership, Outcome, PointQ, Problem, ResolveOptions,
};

#[derive(Parser)]
#[command(name = "reesolve", version, about = "Rees algebras, their invariants and constructive resolution")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Print the parsed problem file(s) in canonical form and exit.
    #[arg(long, global = true)]
    dump: bool,
    #[command(flatten)]
    opts: Common,
}

#[derive(Args)]
struct Common {
    /// Maximal number of chart operations in a resolution.
    #[arg(long, global = true, default_value_t = 200)]
    max_steps: usize,
    /// Degree cap for Gröbner computations.
    #[arg(long, global = true, default_value_t = Limits::default().max_degree)]
    max_degree: u32,
    /// Integer box radius of the sampling grid.
    #[arg(long, global = true, default_value_t = 2)]
    grid_radius: i64,
    /// Extra sample points, one `a,b,...` per line.
    #[arg(long, global = true)]
    candidates: Option<PathBuf>,
    /// Seed for the random part of the sampling grid.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Order of the algebra at points.
    Ord {
        file: PathBuf,
        /// Comma-separated coordinates; defaults to the file's points or the origin.
        #[arg(long)]
        point: Vec<String>,
    },
    /// Defining ideal of the singular locus and a grid summary.
    Sing { file: PathBuf },
    /// Generators of the differential closure.
    Diffclose { file: PathBuf },
    /// Blows up a coordinate center and prints every chart.
    Transform {
        file: PathBuf,
        /// Comma-separated variable names of the center.
        #[arg(long)]
        center: String,
    },
    /// Runs the resolution driver and prints the JSON trace.
    Resolve {
        file: PathBuf,
        /// Resolve sibling charts concurrently.
        #[arg(long)]
        parallel: bool,
        /// Check monotonicity, exceptional exponents and leaf certificates.
        #[arg(long)]
        verify: bool,
    },
    /// Resolves two problems and compares traces and invariants.
    CheckEquiv {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        parallel: bool,
    },
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok = 0,
    VerifyFailed = 1,
    Parse = 2,
    Limit = 3,
    Unsupported = 4,
}

struct Failure(Status, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse { .. } => Status::Parse,
            Error::LimitExceeded(_) => Status::Limit,
            Error::Unsupported(_) | Error::NonGraph(_) => Status::Unsupported,
            _ => Status::VerifyFailed,
        };
        Failure(status, e.to_string())
    }
}

type Run = std::result::Result<Status, Failure>;

fn load(path: &Path) -> std::result::Result<Problem, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure(Status::Parse, format!("{}: {e}", path.display())))?;
    Problem::parse(&text).map_err(|e| Failure(Status::Parse, format!("{}: {e}", path.display())))
}

fn parse_point(text: &str, dim: usize) -> std::result::Result<PointQ, Failure> {
    let t = text.trim().trim_start_matches('(').trim_end_matches(')');
    let p: Option<PointQ> = t.split(',').map(parse_rat).collect();
    match p {
        Some(p) if p.len() == dim => Ok(p),
        _ => Err(Failure(Status::Parse, format!("bad point '{text}' (need {dim} rational coordinates)"))),
    }
}

fn candidates(opts: &Common, dim: usize) -> std::result::Result<Vec<PointQ>, Failure> {
    let Some(path) = &opts.candidates else { return Ok(Vec::new()) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure(Status::Parse, format!("{}: {e}", path.display())))?;
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| parse_point(l, dim))
        .collect()
}

fn show_point(p: &[reesolve_core::Rat]) -> String {
    format!("({})", p.iter().map(fmt_rat).collect::<Vec<_>>().join(", "))
}

/// The sampling grid plus file points and candidates, without repeats.
fn sample_points(opts: &Common, dim: usize, extra: &[&PointQ]) -> std::result::Result<Vec<PointQ>, Failure> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let all = default_grid(dim, opts.grid_radius, opts.seed).into_iter().chain(extra.iter().map(|&q| q.clone()));
    for q in all.chain(candidates(opts, dim)?) {
        if seen.insert(q.clone()) {
            out.push(q);
        }
    }
    Ok(out)
}

fn resolve_options(opts: &Common, parallel: bool) -> ResolveOptions {
    let limits = Limits { max_degree: opts.max_degree, ..Limits::default() };
    ResolveOptions { max_steps: opts.max_steps, limits, parallel }
}

fn outcome_status(o: Outcome) -> Status {
    match o {
        Outcome::Resolved => Status::Ok,
        Outcome::LimitExceeded => Status::Limit,
        Outcome::UnsupportedGeometry => Status::Unsupported,
    }
}

fn cmd_ord(p: &Problem, points: &[String], opts: &Common) -> Run {
    let g = p.algebra()?;
    let mut pts = points.iter().map(|s| parse_point(s, p.dim())).collect::<std::result::Result<Vec<_>, _>>()?;
    if pts.is_empty() {
        pts = p.points.clone();
        pts.extend(candidates(opts, p.dim())?);
    }
    if pts.is_empty() {
        pts.push(origin(p.dim()));
    }
    if pts.len() == 1 {
        println!("{}", fmt_rat(&ord_at(&g, &pts[0])?));
    } else {
        for q in &pts {
            println!("{}: {}", show_point(q), fmt_rat(&ord_at(&g, q)?));
        }
    }
    Ok(Status::Ok)
}

fn cmd_sing(p: &Problem, opts: &Common) -> Run {
    let g = p.algebra()?;
    let ideal = sing_ideal(&g);
    println!("sing ideal:");
    for f in ideal.gens() {
        println!("  {}", f.display_with(&p.names));
    }
    let grid = sample_points(opts, p.dim(), &p.points.iter().collect::<Vec<_>>())?;
    let mut hits = Vec::new();
    for q in &grid {
        if contains_point(&g, q)? {
            hits.push(q);
        }
    }
    println!("grid: {} of {} sample points in Sing", hits.len(), grid.len());
    for q in &hits {
        println!("  {}", show_point(q));
    }
    let limits = Limits { max_degree: opts.max_degree, ..Limits::default() };
    let empty = match sing_is_empty_on(&g, &[], limits) {
        Membership::Member => "yes",
        Membership::NotMember => "no",
        Membership::Undecided => "undecided",
    };
    println!("empty: {empty}");
    Ok(Status::Ok)
}

fn cmd_diffclose(p: &Problem) -> Run {
    for (f, n) in diff_closure(&p.algebra()?).gens() {
        println!("({}, {n})", f.display_with(&p.names));
    }
    Ok(Status::Ok)
}

fn cmd_transform(p: &Problem, center: &str) -> Run {
    let vars = center
        .split(',')
        .map(|v| {
            p.names
                .iter()
                .position(|n| n == v.trim())
                .ok_or_else(|| Failure(Status::Parse, format!("unknown variable '{}' in center", v.trim())))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let c = CenterSpec::new(vars)?;
    let root = p.marked()?;
    for (k, kid) in transform_marked(&root, &c)?.iter().enumerate() {
        if k > 0 {
            println!();
        }
        let chart = kid.chart();
        println!("# chart {}", chart.id);
        if let Some((_, sub)) = &chart.parent {
            let parts: Vec<String> = sub
                .iter()
                .zip(&p.names)
                .map(|(s, n)| format!("{n} -> {}", s.display_with(&chart.names)))
                .collect();
            println!("# {}", parts.join(", "));
        }
        print!("{}", Problem::from_marked(kid).dump());
    }
    Ok(Status::Ok)
}

fn cmd_resolve(p: &Problem, opts: &Common, parallel: bool, verify: bool) -> Run {
    let o = resolve_options(opts, parallel);
    let trace = resolve(p.marked()?, &o);
    println!("{}", trace.to_json());
    if let Some(msg) = &trace.report.message {
        eprintln!("{msg}");
    }
    if verify {
        let mut ok = true;
        if let Err(e) = check_monotone(&trace) {
            eprintln!("monotonicity: FAIL ({e})");
            ok = false;
        } else {
            eprintln!("monotonicity: ok");
        }
        let bad: Vec<_> = trace.report.transweak.iter().filter(|(_, c)| c.bookkept != c.recomputed).collect();
        for (_, c) in &bad {
            eprintln!("exceptional exponent at {}: bookkept {} recomputed {}", c.chart, c.bookkept, c.recomputed);
        }
        eprintln!("exceptional exponents: {} checked, {} mismatched", trace.report.transweak.len(), bad.len());
        ok &= bad.is_empty();
        if trace.outcome == Outcome::Resolved {
            let cert = certify_leaves(&trace, o.limits);
            eprintln!("leaf certificates: {cert:?}");
            match cert {
                Membership::Member => {}
                Membership::NotMember => ok = false,
                Membership::Undecided => return Ok(Status::Limit),
            }
        }
        if !ok {
            return Ok(Status::VerifyFailed);
        }
    }
    Ok(outcome_status(trace.outcome))
}

fn cmd_check_equiv(a: &Problem, b: &Problem, opts: &Common, parallel: bool) -> Run {
    if a.names != b.names {
        return Err(Failure(Status::VerifyFailed, "the problems declare different variables".into()));
    }
    let o = resolve_options(opts, parallel);
    let (ma, mb) = (a.marked()?, b.marked()?);
    let grid = sample_points(opts, a.dim(), &a.points.iter().chain(&b.points).collect::<Vec<_>>())?;
    let disagreements = invariant_disagreements(&ma, &mb, &grid)?;
    let (ta, tb) = (resolve(ma, &o), resolve(mb, &o));
    for d in &disagreements {
        println!("invariants: {d}");
    }
    let n = ta.num_operations();
    let steps = if n == 1 { "step" } else { "steps" };
    if !traces_equal(&ta, &tb) {
        let at = ta.steps.iter().zip(&tb.steps).position(|(x, y)| x != y).unwrap_or(ta.steps.len().min(tb.steps.len()));
        println!("NOT EQUIVALENT: traces differ at step {at}");
        return Ok(Status::VerifyFailed);
    }
    if !disagreements.is_empty() {
        println!("NOT EQUIVALENT: traces identical ({n} {steps}) but {} invariant disagreements", disagreements.len());
        return Ok(Status::VerifyFailed);
    }
    match ta.outcome {
        Outcome::Resolved => println!("EQUIVALENT: traces identical ({n} {steps})"),
        other => {
            let o = serde_json::to_string(&other).unwrap_or_default();
            println!("EQUIVALENT: traces identical ({n} {steps}, outcome {})", o.trim_matches('"'));
        }
    }
    Ok(outcome_status(ta.outcome))
}

fn run(cli: &Cli) -> Run {
    let files: Vec<&PathBuf> = match &cli.cmd {
        Cmd::Ord { file, .. }
        | Cmd::Sing { file }
        | Cmd::Diffclose { file }
        | Cmd::Transform { file, .. }
        | Cmd::Resolve { file, .. } => vec![file],
        Cmd::CheckEquiv { first, second, .. } => vec![first, second],
    };
    let problems = files.iter().map(|f| load(f)).collect::<std::result::Result<Vec<_>, _>>()?;
    if cli.dump {
        for (k, p) in problems.iter().enumerate() {
            if k > 0 {
                println!();
            }
            print!("{}", p.dump());
        }
        return Ok(Status::Ok);
    }
    let p = &problems[0];
    let opts = &cli.opts;
    match &cli.cmd {
        Cmd::Ord { point, .. } => cmd_ord(p, point, opts),
        Cmd::Sing { .. } => cmd_sing(p, opts),
        Cmd::Diffclose { .. } => cmd_diffclose(p),
        Cmd::Transform { center, .. } => cmd_transform(p, center),
        Cmd::Resolve { parallel, verify, .. } => cmd_resolve(p, opts, *parallel, *verify),
        Cmd::CheckEquiv { parallel, .. } => cmd_check_equiv(p, &problems[1], opts, *parallel),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match run(&cli) {
        Ok(s) => s,
        Err(Failure(s, msg)) => {
            eprintln!("error: {msg}");
            s
        }
    };
    ExitCode::from(status as u8)
}
