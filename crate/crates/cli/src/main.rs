//! `histroute`: generate histograms, build routing schemes, route packets
//! and verify schemes against BFS.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use histroute::engine::{
    bfs_all, default_hop_limit, run_route, verify, PairSelection, RoutingScheme, VerifyOptions,
};
use histroute::polygon::{generate, parse_polygon, Histogram, Kind};
use histroute::scheme_double::DoubleScheme;
use histroute::scheme_simple::SimpleScheme;
use histroute::visibility::VisibilityGraph;
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(
    name = "histroute",
    version,
    about = "Compact routing in histogram visibility graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a random histogram in polygon text format.
    Gen {
        #[arg(long, value_enum)]
        kind: SchemeKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that a polygon file describes a valid histogram.
    Validate { file: PathBuf },
    /// Build a routing scheme and write its text dump.
    Build {
        file: PathBuf,
        #[arg(long, value_enum)]
        scheme: SchemeKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Route one packet. FILE may be a polygon or a scheme dump.
    Route {
        file: PathBuf,
        #[arg(long, value_enum)]
        scheme: SchemeKind,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        /// Print the visited vertices.
        #[arg(long)]
        trace: bool,
    },
    /// Route many pairs and compare with BFS. FILE may be a polygon or a
    /// scheme dump.
    Verify {
        file: PathBuf,
        #[arg(long, value_enum)]
        scheme: SchemeKind,
        /// `all`, or a number of ordered pairs to sample.
        #[arg(long, default_value = "all")]
        pairs: Pairs,
        /// Write per-pair results as CSV.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeKind {
    Simple,
    Double,
}

impl From<SchemeKind> for Kind {
    fn from(k: SchemeKind) -> Self {
        match k {
            SchemeKind::Simple => Kind::Simple,
            SchemeKind::Double => Kind::Double,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Pairs {
    All,
    Sample(usize),
}

impl FromStr for Pairs {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(Pairs::All);
        }
        s.parse()
            .map(Pairs::Sample)
            .map_err(|_| format!("expected `all` or a pair count, got `{s}`"))
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {message}", path.display())]
    Input { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn input(path: &Path, e: impl ToString) -> CliError {
    CliError::Input {
        path: path.to_owned(),
        message: e.to_string(),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_polygon(path: &Path) -> Result<Histogram, CliError> {
    parse_polygon(&read(path)?).map_err(|e| input(path, e))
}

enum Loaded {
    Simple(SimpleScheme),
    Double(DoubleScheme),
}

fn build(path: &Path, h: &Histogram, kind: SchemeKind) -> Result<Loaded, CliError> {
    if h.kind() != Kind::from(kind) {
        return Err(CliError::Usage(format!(
            "{}: a {} histogram needs the {} scheme",
            path.display(),
            h.kind(),
            h.kind()
        )));
    }
    Ok(match kind {
        SchemeKind::Simple => Loaded::Simple(SimpleScheme::build(h).map_err(|e| input(path, e))?),
        SchemeKind::Double => Loaded::Double(DoubleScheme::build(h).map_err(|e| input(path, e))?),
    })
}

/// Loads a scheme from a dump (first word `scheme`) or builds it from a
/// polygon file.
fn load_scheme(path: &Path, kind: SchemeKind) -> Result<Loaded, CliError> {
    let text = read(path)?;
    let mut words = text.split_whitespace();
    if words.next() != Some("scheme") {
        let h = parse_polygon(&text).map_err(|e| input(path, e))?;
        return build(path, &h, kind);
    }
    let dumped = words.next().unwrap_or("");
    let expected = Kind::from(kind).to_string();
    if dumped != expected {
        return Err(CliError::Usage(format!(
            "{}: dump holds a {dumped} scheme, not {expected}",
            path.display()
        )));
    }
    Ok(match kind {
        SchemeKind::Simple => {
            Loaded::Simple(SimpleScheme::parse_dump(&text).map_err(|e| input(path, e))?)
        }
        SchemeKind::Double => {
            Loaded::Double(DoubleScheme::parse_dump(&text).map_err(|e| input(path, e))?)
        }
    })
}

fn size_summary<S: RoutingScheme>(scheme: &S, max_header: usize) -> String {
    let n = scheme.n();
    let label = (0..n).map(|v| scheme.label_bits(v)).max().unwrap_or(0);
    let table = (0..n).map(|v| scheme.table_bits(v)).max().unwrap_or(0);
    format!("n={n}\nlabBits={label}\ntabBits={table}\nhdrBits={max_header}\n")
}

fn route_one<S: RoutingScheme>(
    scheme: &S,
    graph: &VisibilityGraph,
    from: usize,
    to: usize,
    trace: bool,
) -> Result<(), CliError> {
    let n = scheme.n();
    if from >= n || to >= n {
        return Err(CliError::Usage(format!("vertex ids must be below {n}")));
    }
    let route = run_route(scheme, graph, from, to, default_hop_limit(n))
        .map_err(|e| CliError::Failed(e.to_string()))?;
    if trace {
        let ids: Vec<String> = route.trace.iter().map(usize::to_string).collect();
        println!("{}", ids.join(" "));
    }
    println!("routed={} bfs={}", route.hops(), bfs_all(graph, from)[to]);
    Ok(())
}

fn verify_scheme<S: RoutingScheme>(
    scheme: &S,
    graph: &VisibilityGraph,
    bound: usize,
    pairs: Pairs,
    seed: u64,
    report: Option<&Path>,
) -> Result<(), CliError> {
    let base = if bound == 1 {
        VerifyOptions::exact()
    } else {
        VerifyOptions::stretch_two()
    };
    let opts = VerifyOptions {
        pairs: match pairs {
            Pairs::All => PairSelection::All,
            Pairs::Sample(count) => PairSelection::Sample { count, seed },
        },
        keep_records: report.is_some(),
        ..base
    };
    let result = verify(scheme, graph, &opts);
    print!("{}", result.summary());
    if let Some(path) = report {
        let io_err = |source| CliError::Io {
            path: path.to_owned(),
            source,
        };
        let file = fs::File::create(path).map_err(io_err)?;
        result.write_csv(io::BufWriter::new(file)).map_err(io_err)?;
    }
    for f in result.failures.iter().take(10) {
        eprintln!("failure: {f}");
    }
    if result.passed() {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "{} pairs failed",
            result.failures.len()
        )))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen { kind, n, seed, out } => {
            let h = generate(kind.into(), n, seed).map_err(|e| CliError::Usage(e.to_string()))?;
            write_or_print(out.as_deref(), &h.to_text())
        }
        Command::Validate { file } => {
            let h = load_polygon(&file)?;
            println!("valid {} histogram, n={}", h.kind(), h.n());
            Ok(())
        }
        Command::Build { file, scheme, out } => {
            let h = load_polygon(&file)?;
            let (dump, sizes) = match build(&file, &h, scheme)? {
                Loaded::Simple(s) => (s.dump(), size_summary(&s, 0)),
                Loaded::Double(s) => {
                    let header = s.header_bits(&Some(s.label(0).point()));
                    (s.dump(), size_summary(&s, header))
                }
            };
            match out {
                Some(path) => {
                    write_or_print(Some(&path), &dump)?;
                    print!("{sizes}");
                }
                None => {
                    print!("{dump}");
                    eprint!("{sizes}");
                }
            }
            Ok(())
        }
        Command::Route {
            file,
            scheme,
            from,
            to,
            trace,
        } => match load_scheme(&file, scheme)? {
            Loaded::Simple(s) => route_one(&s, &s.graph(), from, to, trace),
            Loaded::Double(s) => route_one(&s, &s.graph(), from, to, trace),
        },
        Command::Verify {
            file,
            scheme,
            pairs,
            report,
            seed,
        } => match load_scheme(&file, scheme)? {
            Loaded::Simple(s) => verify_scheme(&s, &s.graph(), 1, pairs, seed, report.as_deref()),
            Loaded::Double(s) => verify_scheme(&s, &s.graph(), 2, pairs, seed, report.as_deref()),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
