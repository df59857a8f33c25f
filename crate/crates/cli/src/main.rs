use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use riesz_circle::bifurcation::{sweep, sweep_row};
use riesz_circle::classify::{s3_crossover, s3_crossover_bisection};
use riesz_circle::export::{
    equilibria_csv, equilibria_json, format_number, landscape_csv, landscape_json, search_json,
    sweep_csv, sweep_json, sweep_svg,
};
use riesz_circle::landscape::evaluate_grid;
use riesz_circle::nsearch::{multistart, n5_crossover};
use riesz_circle::{Error, RieszParam};

const EXIT_USAGE: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

/// Riesz s-energy equilibria of particles on the unit circle.
#[derive(Parser, Debug)]
#[command(name = "riesz", version, about, allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlotFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CrossoverKind {
    /// Equilateral against antipodal, three particles.
    S3,
    /// Antipodal split against the 1:2:2 triangle, five particles.
    N5,
}

fn parse_s(text: &str) -> Result<RieszParam, String> {
    text.parse::<RieszParam>().map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// All three-particle equilibria at one exponent.
    #[command(allow_negative_numbers = true)]
    Equilibria {
        /// Riesz exponent (`s3` for the crossover value).
        #[arg(long, value_parser = parse_s)]
        s: RieszParam,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
    },
    /// Classified equilibria on a uniform grid of exponents.
    #[command(allow_negative_numbers = true)]
    Bifurcate {
        #[arg(long, value_parser = parse_s)]
        s_min: RieszParam,
        #[arg(long, value_parser = parse_s)]
        s_max: RieszParam,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: PlotFormat,
    },
    /// Mean pair energy over the triangle of inscribed angles.
    #[command(allow_negative_numbers = true)]
    Landscape {
        #[arg(long, value_parser = parse_s)]
        s: RieszParam,
        /// Grid points per axis (at least 8).
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
    },
    /// Seeded multistart search for stationary N-particle configurations.
    #[command(allow_negative_numbers = true)]
    Search {
        /// Number of particles.
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_s)]
        s: RieszParam,
        #[arg(long, default_value_t = 100)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: SearchFormat,
    },
    /// Exponent at which two optimal configurations exchange.
    #[command(allow_negative_numbers = true)]
    Crossover {
        #[arg(value_enum)]
        kind: CrossoverKind,
        /// Bracket width at which bisection stops.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SearchFormat {
    Json,
}

enum Failure {
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("RIESZ_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Usage(format!("RIESZ_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn crossover_output(
    kind: CrossoverKind,
    value: f64,
    width: f64,
    closed: Option<f64>,
    format: TableFormat,
) -> String {
    let name = match kind {
        CrossoverKind::S3 => "s3",
        CrossoverKind::N5 => "n5",
    };
    match format {
        TableFormat::Csv => format!(
            "#schema=crossover/1\nkind,value,bracket_width,closed_form\n{name},{},{},{}\n",
            format_number(value),
            format_number(width),
            closed.map(format_number).unwrap_or_default()
        ),
        TableFormat::Json => {
            format!("{}\n", crossover_json(name, value, width, closed))
        }
    }
}

/// Flat document; floats use the shortest round-trip representation.
fn crossover_json(name: &str, value: f64, width: f64, closed: Option<f64>) -> String {
    let closed = closed.map(|c| format!("{c:?}")).unwrap_or_else(|| "null".into());
    format!(
        "{{\n  \"schema\": \"crossover/1\",\n  \"kind\": \"{name}\",\n  \"value\": {value:?},\n  \"bracket_width\": {width:?},\n  \"closed_form\": {closed}\n}}"
    )
}

fn run(cli: Cli) -> Result<(String, Option<String>), Failure> {
    configure_threads()?;
    let out = match cli.command {
        Command::Equilibria { s, format } => {
            let row = sweep_row(s);
            match format {
                TableFormat::Csv => equilibria_csv(&row)?,
                TableFormat::Json => equilibria_json(&row)?,
            }
        }
        Command::Bifurcate {
            s_min,
            s_max,
            steps,
            format,
        } => {
            let rows = sweep(s_min.s(), s_max.s(), steps)?;
            match format {
                PlotFormat::Csv => sweep_csv(&rows)?,
                PlotFormat::Json => sweep_json(&rows)?,
                PlotFormat::Svg => sweep_svg(&rows),
            }
        }
        Command::Landscape { s, n, format } => {
            let grid = evaluate_grid(s, n)?;
            match format {
                TableFormat::Csv => landscape_csv(&grid)?,
                TableFormat::Json => landscape_json(&grid)?,
            }
        }
        Command::Search {
            n,
            s,
            starts,
            seed,
            format: SearchFormat::Json,
        } => {
            let report = multistart(s, n, starts, seed)?;
            let text = search_json(&report)?;
            if !report.failures.is_empty() {
                let msg = format!(
                    "{} of {} descent runs did not converge",
                    report.failures.len(),
                    report.starts
                );
                return Ok((text, Some(msg)));
            }
            text
        }
        Command::Crossover { kind, tol, format } => {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
            }
            let (root, closed) = match kind {
                CrossoverKind::S3 => (s3_crossover_bisection(tol)?, Some(s3_crossover())),
                CrossoverKind::N5 => (n5_crossover(tol)?, None),
            };
            crossover_output(kind, root.x, root.width, closed, format)
        }
    };
    Ok((out, None))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, warning)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::FAILURE;
            }
            match warning {
                Some(w) => {
                    eprintln!("warning: {w}");
                    ExitCode::from(EXIT_PARTIAL)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
