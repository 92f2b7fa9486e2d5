use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use satlab::chart::{self, ChartSpec, Table};
use satlab::cnf::CnfFormula;
use satlab::config::{Distribution, GeneratorParams, SweepConfig};
use satlab::gen::Gamma;
use satlab::net::{self, ClausalGraph, NetworkMetrics};
use satlab::rng::Seed;
use satlab::solver::{solve, SolverLimits, Status};
use satlab::sudoku::{self, SudokuGrid};
use satlab::sweep;

const EXIT_UNSAT: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "satlab",
    version,
    about = "Random SAT instances, a DPLL solver, and clausal network analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random CNF instance in DIMACS format
    Gen(GenArgs),
    /// Solve a DIMACS instance
    Solve(SolveArgs),
    /// Clausal network metrics of a DIMACS instance
    Graph(GraphArgs),
    /// Run a constrainedness sweep and write CSV
    Sweep(Box<SweepArgs>),
    /// Encode or solve a 9x9 Sudoku
    #[command(subcommand)]
    Sudoku(SudokuCommand),
    /// Render an SVG chart from a CSV
    Plot(PlotArgs),
}

fn parse_dist(s: &str) -> Result<Distribution, String> {
    s.parse()
        .map_err(|_| format!("unknown distribution `{s}` (uniform, rich, nbhd)"))
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_parser = parse_dist)]
    dist: Distribution,
    #[arg(long)]
    vars: u32,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    gamma: Gamma,
    #[arg(long)]
    copies: Option<u32>,
    #[arg(long)]
    bucket: Option<u32>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    path: PathBuf,
    /// Wall-clock limit in milliseconds (0 = none)
    #[arg(long, default_value_t = 0)]
    timeout: u64,
    /// Backtrack limit (0 = none)
    #[arg(long, default_value_t = 0)]
    max_backtracks: u64,
    /// Print the satisfying assignment as signed literals
    #[arg(long)]
    model: bool,
}

#[derive(Args)]
struct GraphArgs {
    path: PathBuf,
    /// Print a centrality histogram CSV with this many bins instead of the metrics line
    #[arg(long)]
    histogram: Option<usize>,
    /// With --histogram, also print the metrics line to stderr
    #[arg(long)]
    metrics: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// key = value file; flags below override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    vars: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    copies: Option<String>,
    #[arg(long)]
    bucket: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    gamma_start: Option<String>,
    #[arg(long)]
    gamma_stop: Option<String>,
    #[arg(long)]
    gamma_step: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    timeout_ms: Option<String>,
    #[arg(long)]
    max_backtracks: Option<String>,
    /// true or false
    #[arg(long)]
    metrics: Option<String>,
    /// wall or off
    #[arg(long)]
    timing: Option<String>,
    #[arg(long)]
    workers: Option<String>,
}

impl SweepArgs {
    fn overrides(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("dist", &self.dist),
            ("vars", &self.vars),
            ("k", &self.k),
            ("copies", &self.copies),
            ("bucket", &self.bucket),
            ("p", &self.p),
            ("gamma_start", &self.gamma_start),
            ("gamma_stop", &self.gamma_stop),
            ("gamma_step", &self.gamma_step),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("timeout_ms", &self.timeout_ms),
            ("max_backtracks", &self.max_backtracks),
            ("metrics", &self.metrics),
            ("timing", &self.timing),
            ("workers", &self.workers),
        ]
    }
}

#[derive(Subcommand)]
enum SudokuCommand {
    /// Write the CNF encoding of a grid
    Encode {
        grid: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve a grid and print the completed board
    Solve { grid: PathBuf },
}

#[derive(Args)]
struct PlotArgs {
    csv: PathBuf,
    #[arg(long, default_value = "gamma")]
    x: String,
    /// Comma-separated y columns (at most 3); omit for a bin_lo,bin_hi,count histogram
    #[arg(long, value_delimiter = ',')]
    y: Vec<String>,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, default_value = "")]
    title: String,
    #[arg(long)]
    log_y: bool,
}

/// Message for stderr plus the exit code.
struct Failure(u8, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(err: E) -> Self {
        Failure(EXIT_INPUT, err.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", p.display())))
        }
        None => stdout(text),
    }
}

/// A closed pipe (as with `| head`) is not an error.
fn stdout(text: &str) -> Result<(), Failure> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
            Err(Failure(EXIT_INPUT, format!("stdout: {e}")))
        }
        _ => Ok(()),
    }
}

fn read_formula(path: &Path) -> Result<CnfFormula, Failure> {
    CnfFormula::parse_dimacs(&read(path)?)
        .map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn status_code(status: Status) -> u8 {
    match status {
        Status::Sat => 0,
        Status::Unsat => EXIT_UNSAT,
        Status::Timeout => EXIT_TIMEOUT,
    }
}

fn cmd_gen(args: GenArgs) -> Result<u8, Failure> {
    let params = GeneratorParams {
        dist: Some(args.dist),
        vars: Some(args.vars),
        k: args.k,
        gamma: Some(args.gamma),
        copies: args.copies,
        bucket: args.bucket,
        p: args.p,
    };
    let formula = params.build()?.generate(Seed(args.seed))?;
    write_out(args.output.as_deref(), &formula.to_dimacs())?;
    Ok(0)
}

fn cmd_solve(args: SolveArgs) -> Result<u8, Failure> {
    let formula = read_formula(&args.path)?;
    let limits = SolverLimits {
        timeout: Duration::from_millis(args.timeout),
        max_backtracks: args.max_backtracks,
    };
    let result = solve(&formula, limits);
    let mut out = format!(
        "status={} backtracks={} decisions={} elapsed_ms={:.3}\n",
        result.status,
        result.backtracks,
        result.decisions,
        result.elapsed.as_secs_f64() * 1e3
    );
    if args.model {
        if let Some(model) = &result.model {
            let lits: Vec<String> = model.lits().map(|l| l.to_string()).collect();
            out.push_str(&lits.join(" "));
            out.push('\n');
        }
    }
    stdout(&out)?;
    Ok(status_code(result.status))
}

fn cmd_graph(args: GraphArgs) -> Result<u8, Failure> {
    let g = ClausalGraph::from_formula(&read_formula(&args.path)?);
    let metrics = NetworkMetrics::compute(&g);
    if metrics.proximity.is_none() {
        eprintln!(
            "warning: proximity ratio undefined (mean degree {:.6}, {} edges)",
            metrics.mean_degree, metrics.edges
        );
    }
    match args.histogram {
        Some(bins) => {
            let centrality = metrics.centrality.as_ref().ok_or_else(|| {
                Failure(
                    EXIT_INPUT,
                    "centrality histogram needs a graph with edges".into(),
                )
            })?;
            stdout(&net::centrality_histogram(&centrality.values, bins)?.to_csv())?;
            if args.metrics {
                eprintln!("{}", metrics.summary_line());
            }
        }
        None => stdout(&format!("{}\n", metrics.summary_line()))?,
    }
    Ok(0)
}

fn cmd_sweep(args: SweepArgs) -> Result<u8, Failure> {
    let base = match &args.config {
        Some(path) => SweepConfig::parse(&read(path)?)?,
        None => SweepConfig::default(),
    };
    let mut flags = SweepConfig::default();
    for (key, raw) in args.overrides() {
        if let Some(raw) = raw {
            flags.set(key, raw)?;
        }
    }
    let spec = base.merge(flags).build()?;
    let rows = sweep::run_sweep(&spec)?;
    write_out(Some(&args.output), &sweep::to_csv(&rows))?;
    if let Ok(gamma) = sweep::crossover_estimate(&rows) {
        eprintln!("crossover gamma={gamma:.4}");
    }
    Ok(0)
}

fn cmd_sudoku(command: SudokuCommand) -> Result<u8, Failure> {
    match command {
        SudokuCommand::Encode { grid, output } => {
            let grid = SudokuGrid::parse(&read(&grid)?)?;
            write_out(output.as_deref(), &sudoku::encode(&grid).to_dimacs())?;
            Ok(0)
        }
        SudokuCommand::Solve { grid } => {
            let grid = SudokuGrid::parse(&read(&grid)?)?;
            let (solution, result) = sudoku::solve_grid(&grid, SolverLimits::UNLIMITED)?;
            match solution {
                Some(solved) => {
                    stdout(&solved.to_string())?;
                    Ok(0)
                }
                None => {
                    eprintln!("puzzle has no solution ({})", result.status);
                    Ok(status_code(result.status))
                }
            }
        }
    }
}

fn cmd_plot(args: PlotArgs) -> Result<u8, Failure> {
    let table = Table::parse(&read(&args.csv)?)?;
    let svg = if args.y.is_empty() && table.is_histogram() {
        chart::histogram_chart(&table, &args.title)?
    } else {
        let spec = ChartSpec {
            x: args.x,
            y: args.y,
            title: args.title,
            log_y: args.log_y,
        };
        chart::line_chart(&table, &spec)?
    };
    write_out(Some(&args.output), &svg)?;
    Ok(0)
}

fn main() -> ExitCode {
    let outcome = match Cli::parse().command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Graph(args) => cmd_graph(args),
        Command::Sweep(args) => cmd_sweep(*args),
        Command::Sudoku(command) => cmd_sudoku(command),
        Command::Plot(args) => cmd_plot(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
