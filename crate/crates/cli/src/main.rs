//! The `realclock` command: runs one experiment config and writes its
//! artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use realclock::Error;
use realclock_cli::config::{self, ExperimentKind};
use realclock_cli::output;
use realclock_cli::runner;
use realclock_cli::svg;

#[derive(Parser)]
#[command(name = "realclock", version, about = "Quantum evolution under realistic clocks: batch experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory receiving artifacts whose paths the config leaves unset.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Overrides the config's random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Also renders an SVG plot of the result series.
    #[arg(long)]
    svg: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Real-clock evolution of a small quantum system.
    Evolve(RunArgs),
    /// Central spin dephasing in a spin bath, with and without clock errors.
    Zurek(RunArgs),
    /// Spin interference chamber: global product observable under damping.
    Chamber(RunArgs),
    /// Signal-versus-noise-floor verdict for distinguishing damped evolution.
    Undecide(RunArgs),
    /// Probability of an outcome conditioned on a quantum clock's reading.
    Conditional(RunArgs),
    /// One experiment repeated over a range of a single parameter.
    Sweep(RunArgs),
}

impl Command {
    fn split(&self) -> (ExperimentKind, &RunArgs) {
        match self {
            Self::Evolve(a) => (ExperimentKind::Evolve, a),
            Self::Zurek(a) => (ExperimentKind::Zurek, a),
            Self::Chamber(a) => (ExperimentKind::Chamber, a),
            Self::Undecide(a) => (ExperimentKind::Undecide, a),
            Self::Conditional(a) => (ExperimentKind::Conditional, a),
            Self::Sweep(a) => (ExperimentKind::Sweep, a),
        }
    }
}

fn write_artifact(path: &Path, contents: &str) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| config::config_err(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    fs::write(path, contents)
        .map_err(|e| config::config_err(format!("cannot write {}: {e}", path.display())))
}

fn execute(kind: ExperimentKind, args: &RunArgs) -> Result<(), Error> {
    let mut loaded = config::load_config(&args.config)?;
    if loaded.raw.experiment != kind {
        return Err(config::config_err(format!(
            "config declares experiment {}, but the {kind} subcommand was invoked",
            loaded.raw.experiment
        )));
    }
    loaded.override_seed(args.seed);

    let started = Instant::now();
    let outcome = runner::run(&loaded)?;
    outcome.validate()?;
    let wall_clock_ms = started.elapsed().as_millis();

    let out_dir = args.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let spec = loaded.raw.output.clone().unwrap_or_default();
    let default_in = |ext: &str| out_dir.join(format!("{kind}.{ext}"));
    let csv_path = spec.csv_path.unwrap_or_else(|| default_in("csv"));
    let json_path = spec.json_path.unwrap_or_else(|| default_in("json"));

    write_artifact(&csv_path, &output::render_csv(&outcome, &loaded))?;
    println!("wrote {}", csv_path.display());

    let report = output::report_json(&outcome, &loaded, wall_clock_ms);
    let mut json_text = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Numerical(format!("report serialization failed: {e}")))?;
    json_text.push('\n');
    write_artifact(&json_path, &json_text)?;
    println!("wrote {}", json_path.display());

    if args.svg || spec.svg_path.is_some() {
        let svg_path = spec.svg_path.unwrap_or_else(|| default_in("svg"));
        let title = format!("{kind} ({} points)", outcome.grid.len());
        let drawing = svg::emit_svg(&title, &outcome.grid_label, &outcome.grid, &outcome.series)?;
        write_artifact(&svg_path, &drawing)?;
        println!("wrote {}", svg_path.display());
    }
    Ok(())
}

fn failure_code(err: &Error) -> (u8, &'static str) {
    match err {
        Error::Invalid(_) => (2, "E_CONFIG"),
        Error::Numerical(_) => (3, "E_NUMERICAL"),
        Error::Capacity(_) => (4, "E_CAPACITY"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    match execute(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (code, label) = failure_code(&err);
            let message = err.to_string().replace('\n', "; ");
            eprintln!("error[{label}]: {message}");
            ExitCode::from(code)
        }
    }
}
