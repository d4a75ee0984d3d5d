use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use incbound::pipeline::{bound, run_scenario, simulate, Simulation};
use incbound::sweep::{sweep, write_csv, SweepAxis};
use incbound::verify::{run_suite, Suite, VerifyOptions};
use incbound::{HarnessError, HarnessResult, ScenarioConfig};

#[derive(Parser)]
#[command(name = "incbound", version, about = "Volume fraction bounds from three boundary measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and measure a scenario; writes the response file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Grid override, `N` or `NxNxN`.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Evaluate bounds from a response file.
    Bound {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Simulate and bound in one step.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run an acceptance suite: algebra, pde, determinism or all.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Repeat a scenario over one axis and write a CSV table.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// grid, radius or contrast.
        #[arg(long)]
        axis: String,
        /// Comma-separated values; axis defaults otherwise.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn parse_grid(s: &str) -> HarnessResult<[usize; 3]> {
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| HarnessError::Usage(format!("bad --grid '{s}', expected N or NxNxN")))?;
    match nums.as_slice() {
        [n] => Ok([*n; 3]),
        [a, b, c] => Ok([*a, *b, *c]),
        _ => Err(HarnessError::Usage(format!("bad --grid '{s}', expected N or NxNxN"))),
    }
}

fn load_config(path: &Path, grid: Option<&str>, threads: Option<usize>) -> HarnessResult<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(path)?;
    if let Some(g) = grid {
        cfg = cfg.with_grid(parse_grid(g)?)?;
    }
    if threads.is_some() {
        cfg.solver.threads = threads;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(output: Option<&Path>, text: &str) -> HarnessResult<()> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| HarnessError::Io(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> HarnessResult<()> {
    match cli.command {
        Command::Simulate { config, output, grid, threads } => {
            let cfg = load_config(&config, grid.as_deref(), threads)?;
            let sim = simulate(&cfg)?;
            emit(output.as_deref(), &serde_json::to_string_pretty(&sim)?)
        }
        Command::Bound { input, output } => {
            let text = std::fs::read_to_string(&input).map_err(|e| HarnessError::Io(format!("{}: {e}", input.display())))?;
            let sim: Simulation =
                serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("response file: {e}")))?;
            let rep = bound(&sim)?;
            emit(output.as_deref(), &rep.to_json())?;
            rep.check()
        }
        Command::Run { config, output, grid, threads } => {
            let mut cfg = load_config(&config, grid.as_deref(), threads)?;
            if output.is_some() {
                cfg.output.report = output;
            }
            let to_stdout = cfg.output.report.is_none();
            let rep = run_scenario(&cfg)?;
            if to_stdout {
                println!("{}", rep.to_json());
            }
            rep.check()
        }
        Command::Verify { suite, output, threads } => {
            let suite: Suite = suite.parse()?;
            if threads == Some(0) {
                return Err(HarnessError::Usage("--threads must be at least 1".into()));
            }
            let res = run_suite(suite, &VerifyOptions { threads })?;
            for c in &res.checks {
                eprintln!("{} {}: {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.id, c.name, c.detail);
            }
            emit(output.as_deref(), &res.to_json())?;
            match res.failures().as_slice() {
                [] => Ok(()),
                f => Err(HarnessError::Verification(f.iter().map(|c| c.id.as_str()).collect::<Vec<_>>().join(", "))),
            }
        }
        Command::Sweep { config, axis, values, output, threads } => {
            let axis: SweepAxis = axis.parse()?;
            let cfg = load_config(&config, None, threads)?;
            let values = values.unwrap_or_else(|| axis.default_values());
            let rows = sweep(&cfg, axis, &values);
            match output {
                Some(p) => {
                    let f = std::fs::File::create(&p).map_err(|e| HarnessError::Io(format!("{}: {e}", p.display())))?;
                    write_csv(f, &rows)
                }
                None => write_csv(std::io::stdout().lock(), &rows),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("incbound: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
