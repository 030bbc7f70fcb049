use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use convexma::approx::{convergence_study, default_tests, ConvexEvaluator};
use convexma::corpus::{default_corpus, CorpusEntry};
use convexma::io::{JsonArtifact, PolytopeRepr};
use convexma::measure::{ma_measure, mixed_ma, subdifferential, toric_degree, DegreeReport};
use convexma::pa::PAConvexFunction;
use convexma::poly::PiecewisePolynomial;
use convexma::rational::{parse_rational, Rational, RationalPoint};
use convexma::solver1d::{solve_1d, verify_regularity, Anchor};
use convexma::verify::{checks, format_table, Context};
use convexma::{Error, Polytope};

mod output;

use output::{measure_csv, degree_csv, study_csv, write_atomic};

#[derive(Parser)]
#[command(name = "convexma", version, about = "Exact Monge-Ampere measures of piecewise-affine convex functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the result here (atomically) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Monge-Ampere measure of a PA convex function.
    Ma { input: PathBuf },
    /// Mixed Monge-Ampere measure of n functions on a common domain.
    Mixed {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Subdifferential at an interior point.
    Subdiff {
        input: PathBuf,
        /// Comma-separated coordinates, e.g. `0,1/2`.
        #[arg(long)]
        at: String,
    },
    /// Toric degree at one interior vertex, or at every atom when `--at` is omitted.
    Degree {
        input: PathBuf,
        #[arg(long)]
        at: Option<String>,
        #[arg(long, default_value_t = 1)]
        deg_s: u64,
    },
    /// Grid approximation study of a convex function (PA or quadratic input).
    Approx {
        input: PathBuf,
        /// Single grid step, e.g. `1/8`.
        #[arg(long, conflicts_with = "steps")]
        step: Option<String>,
        /// Comma-separated decreasing steps, e.g. `1/4,1/8,1/16`.
        #[arg(long)]
        steps: Option<String>,
    },
    /// Solve deg_s * phi'' = f for a piecewise polynomial density f.
    Solve1d {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        deg_s: u64,
        /// `x,v,s`: phi(x) = v and phi'(x) = s. Defaults to the left end with zero value and slope.
        #[arg(long)]
        anchor: Option<String>,
    },
    /// Run the invariant suite over a corpus directory (default: built-in corpus).
    Verify {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
    },
}

/// Failure classes mapped to exit codes.
enum Failure {
    Parse(String),
    Precondition(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Precondition(_) => 3,
            Failure::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Precondition(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => Failure::Parse(e.to_string()),
            Error::Internal(_) | Error::Overflow => Failure::Internal(e.to_string()),
            _ => Failure::Precondition(e.to_string()),
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn load<T: JsonArtifact>(path: &Path) -> Res<T> {
    T::from_json(&read(path)?).map_err(|e| match Failure::from(e) {
        Failure::Parse(m) => Failure::Parse(format!("{}: {m}", path.display())),
        f => f,
    })
}

fn parse_list(s: &str) -> Res<Vec<Rational>> {
    s.split(',').map(|t| parse_rational(t).map_err(|e| Failure::Parse(e.to_string()))).collect()
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadraticInput {
    domain: PolytopeRepr,
    /// Symmetric matrix of `x -> 1/2 x^T Q x + <b, x> + c`.
    q: Vec<Vec<String>>,
    #[serde(default)]
    b: Option<Vec<String>>,
    #[serde(default)]
    c: Option<String>,
}

/// A PA function file, or `{"domain", "q", "b", "c"}` for a quadratic.
fn load_convex(path: &Path) -> Res<ConvexEvaluator> {
    let text = read(path)?;
    if let Ok(h) = PAConvexFunction::from_json(&text) {
        return Ok(ConvexEvaluator::from_pa(h));
    }
    let q: QuadraticInput = serde_json::from_str(&text)
        .map_err(|e| Failure::Parse(format!("{}: neither a PA function nor a quadratic: {e}", path.display())))?;
    let domain = Polytope::from_repr(q.domain)?;
    let n = domain.ambient_dim();
    let matrix: Vec<Vec<Rational>> =
        q.q.iter().map(|row| row.iter().map(|s| parse_rational(s)).collect()).collect::<Result<_, _>>()?;
    if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
        return Err(Failure::Precondition(format!("q must be {n} x {n}")));
    }
    let b = match q.b {
        Some(b) => b.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?,
        None => vec![Rational::from_integer(0.into()); n],
    };
    if b.len() != n {
        return Err(Failure::Precondition(format!("b must have {n} entries")));
    }
    let c = q.c.map(|s| parse_rational(&s)).transpose()?.unwrap_or_else(|| Rational::from_integer(0.into()));
    Ok(ConvexEvaluator::quadratic(domain, matrix, b, c))
}

fn emit(cli: &Cli, body: &str) -> Res<()> {
    match &cli.out {
        Some(p) => write_atomic(p, body.as_bytes()).map_err(|e| Failure::Precondition(format!("{}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn json_only(cli: &Cli, what: &str) -> Res<()> {
    if cli.format == Format::Csv {
        return Err(Failure::Precondition(format!("{what} has no CSV form")));
    }
    Ok(())
}

fn degree_json(reports: &[DegreeReport]) -> String {
    let reprs: Vec<_> = reports.iter().map(|r| r.to_repr()).collect();
    let mut s = serde_json::to_string_pretty(&reprs).expect("serializable");
    s.push('\n');
    s
}

fn threads() -> usize {
    std::env::var("MA_POLYTOPE_THREADS").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(0)
}

fn load_corpus(dir: &Path) -> Res<Vec<CorpusEntry>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Failure::Parse(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::Precondition(format!("{}: no .json files", dir.display())));
    }
    files
        .iter()
        .map(|p| {
            Ok(CorpusEntry {
                name: p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
                h: load(p)?,
            })
        })
        .collect()
}

fn run(cli: &Cli) -> Res<()> {
    match &cli.command {
        Command::Ma { input } => {
            let h: PAConvexFunction = load(input)?;
            let mu = ma_measure(&h)?;
            emit(cli, &if cli.format == Format::Csv { measure_csv(&mu) } else { mu.to_json() })
        }
        Command::Mixed { inputs } => {
            let hs = inputs.iter().map(|p| load(p)).collect::<Res<Vec<PAConvexFunction>>>()?;
            let mu = mixed_ma(&hs)?;
            emit(cli, &if cli.format == Format::Csv { measure_csv(&mu) } else { mu.to_json() })
        }
        Command::Subdiff { input, at } => {
            json_only(cli, "a subdifferential")?;
            let x = RationalPoint::new(parse_list(at)?);
            let h: PAConvexFunction = load(input)?;
            emit(cli, &subdifferential(&h, &x)?.to_json())
        }
        Command::Degree { input, at, deg_s } => {
            let at = at.as_deref().map(parse_list).transpose()?;
            let h: PAConvexFunction = load(input)?;
            let reports = match at {
                Some(u) => vec![toric_degree(&h, &RationalPoint::new(u), *deg_s)?],
                None => ma_measure(&h)?
                    .atoms()
                    .iter()
                    .map(|(u, _)| toric_degree(&h, u, *deg_s))
                    .collect::<Result<Vec<_>, _>>()?,
            };
            let body = match (cli.format, reports.as_slice()) {
                (Format::Csv, _) => degree_csv(&reports),
                (Format::Json, [one]) if at_given(&cli.command) => one.to_json(),
                _ => degree_json(&reports),
            };
            emit(cli, &body)
        }
        Command::Approx { input, step, steps } => {
            let steps = match (step, steps) {
                (Some(s), None) => parse_list(s)?,
                (None, Some(s)) => parse_list(s)?,
                _ => return Err(Failure::Precondition("give --step or --steps".into())),
            };
            let f = load_convex(input)?;
            let report = convergence_study(&f, &steps, &default_tests(f.domain()))?;
            if cli.format == Format::Csv {
                if let Some(out) = &cli.out {
                    let sidecar = out.with_extension("json");
                    write_atomic(&sidecar, report.to_json().as_bytes())
                        .map_err(|e| Failure::Precondition(format!("{}: {e}", sidecar.display())))?;
                }
                emit(cli, &study_csv(&report))
            } else {
                emit(cli, &report.to_json())
            }
        }
        Command::Solve1d { input, deg_s, anchor } => {
            json_only(cli, "a 1D solution")?;
            let f: PiecewisePolynomial = load(input)?;
            let anchor = match anchor {
                Some(a) => match parse_list(a)?.as_slice() {
                    [x, v, s] => Anchor::new(x.clone(), v.clone(), s.clone()),
                    _ => return Err(Failure::Parse(format!("anchor {a:?} needs three values x,v,s"))),
                },
                None => Anchor::new(f.start().clone(), Rational::from_integer(0.into()), Rational::from_integer(0.into())),
            };
            let sol = solve_1d(&f, *deg_s, &anchor)?;
            let report = verify_regularity(&sol, &f);
            eprint!("phi =\n{}", sol.phi);
            eprintln!("regularity: {}", if report.all_pass() { "all checks pass" } else { "FAILED" });
            if !report.all_pass() {
                return Err(Failure::Internal(format!("{report:?}")));
            }
            emit(cli, &sol.phi.to_json())
        }
        Command::Verify { corpus, seed } => {
            let entries = match corpus {
                Some(dir) => load_corpus(dir)?,
                None => default_corpus(),
            };
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads())
                .build()
                .map_err(|e| Failure::Internal(e.to_string()))?;
            let reports = pool.install(|| {
                use rayon::prelude::*;
                let ctx = Context::new(&entries, *seed)?;
                let all = checks();
                Ok::<_, Error>(all.par_iter().map(|c| c.run(&ctx)).collect::<Vec<_>>())
            })?;
            let table = format_table(&reports);
            emit(cli, &table)?;
            if reports.iter().all(|r| r.outcome.passed()) {
                Ok(())
            } else {
                Err(Failure::Internal("invariant checks failed".into()))
            }
        }
    }
}

fn at_given(c: &Command) -> bool {
    matches!(c, Command::Degree { at: Some(_), .. })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
