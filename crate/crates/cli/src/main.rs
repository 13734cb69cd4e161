mod commands;
mod output;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gi_core::params::DEFAULT_TOL;
use num_complex::Complex64;
use serde::Serialize;

use output::{envelope, Failure, Outcome};

/// Worker-count cap for the parallel grid sweeps.
const THREADS_VAR: &str = "GI_ADMISSIBILITY_THREADS";

#[derive(Parser)]
#[command(name = "gi-admissibility", version, about = "Admissibility classifier and verifier for GI-equation boundary data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Case label, family membership and obstruction verdict of a triple.
    Classify {
        #[command(flatten)]
        triple: TripleArgs,
        /// Also run the two-resolution geometric obstruction test.
        #[arg(long)]
        geometry: bool,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Contour Im Ω = 0, regions, cuts and branch points as CSV and SVG.
    Contour {
        #[command(flatten)]
        triple: TripleArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Run verification suites with pass/fail thresholds.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, value_enum)]
        solution: Option<Solution>,
        /// Multiply the solution profile by this factor, turning it into a
        /// non-solution that the profile suites must reject.
        #[arg(long, allow_hyphen_values = true)]
        perturb: Option<f64>,
        #[command(flatten)]
        triple: TripleArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Spectral functions s(k), S(k) and the global relation at given or sampled k.
    Scatter {
        #[arg(long, value_enum)]
        solution: Option<Solution>,
        #[command(flatten)]
        triple: TripleArgs,
        /// Spectral point "re,im"; repeat for several. Without any, points
        /// are sampled from the closure of D1.
        #[arg(long = "k", value_parser = parse_complex, allow_hyphen_values = true)]
        points: Vec<Complex64>,
        /// Number of sampled points when no --k is given.
        #[arg(long, default_value_t = 10)]
        samples: usize,
        /// Sampling radius for the sampled points.
        #[arg(long, default_value_t = 3.0)]
        radius: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Classification, geometry, contour and verification in one document.
    Report {
        #[arg(long, value_enum)]
        solution: Option<Solution>,
        #[command(flatten)]
        triple: TripleArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone, Serialize)]
pub struct TripleArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    /// Neumann value "re,im".
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub c: Option<Complex64>,
}

#[derive(Args, Clone, Serialize)]
pub struct GridArgs {
    /// Half-width R of the square [-R, R]² in the k-plane; defaults to a box
    /// that contains every root of Ω² with margin.
    #[arg(long)]
    pub bounds: Option<f64>,
    /// Grid cells per axis.
    #[arg(long)]
    pub resolution: Option<usize>,
}

#[derive(Args, Clone, Serialize)]
pub struct Common {
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for written artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Identities,
    Pde,
    Lax,
    GlobalRelation,
    All,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solution {
    Soliton,
    PlaneWave,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected \"re,im\", got {s:?}"))?;
    let part = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    Ok(Complex64::new(part(re)?, part(im)?))
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::input(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::input(format!("cannot configure {n} worker threads: {e}")))
}

fn describe(command: &Command) -> (&'static str, serde_json::Value, Format) {
    use serde_json::json;
    match command {
        Command::Classify { triple, geometry, grid, common } => (
            "classify",
            json!({ "triple": triple, "geometry": geometry, "grid": grid, "options": common }),
            common.format,
        ),
        Command::Contour { triple, grid, common } => {
            ("contour", json!({ "triple": triple, "grid": grid, "options": common }), common.format)
        }
        Command::Verify { suite, solution, perturb, triple, common } => (
            "verify",
            json!({ "suite": suite, "solution": solution, "perturb": perturb, "triple": triple, "options": common }),
            common.format,
        ),
        Command::Scatter { solution, triple, points, samples, radius, common } => (
            "scatter",
            json!({
                "solution": solution, "triple": triple, "k": points,
                "samples": samples, "radius": radius, "options": common,
            }),
            common.format,
        ),
        Command::Report { solution, triple, grid, common } => (
            "report",
            json!({ "solution": solution, "triple": triple, "grid": grid, "options": common }),
            common.format,
        ),
    }
}

fn dispatch(command: &Command) -> Result<Outcome, Failure> {
    match command {
        Command::Classify { triple, geometry, grid, common } => commands::classify(triple, *geometry, grid, common),
        Command::Contour { triple, grid, common } => commands::contour(triple, grid, common),
        Command::Verify { suite, solution, perturb, triple, common } => {
            commands::verify(*suite, *solution, *perturb, triple, common)
        }
        Command::Scatter { solution, triple, points, samples, radius, common } => {
            commands::scatter(*solution, triple, points, *samples, *radius, common)
        }
        Command::Report { solution, triple, grid, common } => commands::report(*solution, triple, grid, common),
    }
}

fn main() -> ExitCode {
    // clap's own exit status for bad flags is 2, which here means an
    // ambiguous case; malformed input exits with 1 instead.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { output::EXIT_INPUT } else { output::EXIT_OK });
        }
    };
    let (name, input, format) = describe(&cli.command);
    let outcome = configure_threads()
        .and_then(|()| dispatch(&cli.command))
        .unwrap_or_else(|f| Outcome::with_failure(serde_json::Value::Null, f));
    if let Some(e) = &outcome.error {
        eprintln!("gi-admissibility {name}: {e}");
    }
    // A closed stdout (e.g. piped into `head`) is not an error of the run.
    let mut stdout = std::io::stdout().lock();
    let _ = match (&outcome.raw, format) {
        (Some(text), Format::Csv | Format::Svg) if outcome.code == output::EXIT_OK => stdout.write_all(text.as_bytes()),
        _ => {
            let doc = serde_json::to_string_pretty(&envelope(name, input, &outcome)).expect("JSON values serialize");
            writeln!(stdout, "{doc}")
        }
    };
    ExitCode::from(outcome.code)
}
