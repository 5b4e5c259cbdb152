use std::env;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rescycle_cli::config::{parse_criterion, resolve_out_dir, OUT_ENV};
use rescycle_cli::{commands, CliError, Format, Output, Result, RunConfig};

/// Simulation and bifurcation analysis of a production/capital/energy
/// growth model.
#[derive(Debug, Parser)]
#[command(name = "rescycle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (TOML).
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,

    /// Output directory. Overrides output.directory and $RESCYCLE_OUT.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,

    /// Comma-separated output formats. Overrides output.formats.
    #[arg(long, global = true, value_delimiter = ',')]
    format: Option<Vec<Format>>,

    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the configured field and classify its long-time behaviour.
    Simulate,
    /// Equilibria, eigenvalues and stability classes.
    FixedPoints,
    /// One-parameter bifurcation scan.
    Sweep,
    /// Investment/saving curves and requirement checks.
    Kaldor,
    /// Locate a critical parameter value by bisection.
    Bisect {
        /// trace-zero-at-branch[:baseline|lower|middle|upper],
        /// discriminant-zero or cycle-exists.
        #[arg(long)]
        criterion: Option<String>,
    },
    /// Neoclassical growth statics and simulation.
    Solow,
}

fn run(cli: Cli) -> Result<()> {
    let path = cli
        .config
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let cfg = RunConfig::load(&path)?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let dir = resolve_out_dir(cli.out.as_deref(), &cfg.output, env::var_os(OUT_ENV));
    let formats = cli.format.unwrap_or_else(|| cfg.output.formats.clone());
    let mut out = Output::new(dir, formats);

    let outcome = match cli.command {
        Command::Simulate | Command::Solow => {
            let summary = if matches!(cli.command, Command::Solow) {
                commands::solow(&cfg, &mut out)
            } else {
                commands::simulate(&cfg, &mut out)
            };
            summary.map(|s| {
                let state = s.attractor.state.map(|x| format!(" at {x:?}")).unwrap_or_default();
                let cycle = s
                    .cycle
                    .map(|c| format!(", cycle period {:.4}, mean Y {:.4}", c.period, c.y_mean))
                    .unwrap_or_default();
                format!("{}{state}{cycle}", s.attractor.kind)
            })
        }
        Command::FixedPoints => commands::fixed_points(&cfg, &mut out).map(|r| {
            let list: Vec<String> = r
                .fixed_points
                .iter()
                .map(|f| format!("Y={:.6} ({})", f.y(), f.classification))
                .collect();
            format!("{} fixed point(s): {}", list.len(), list.join(", "))
        }),
        Command::Sweep => {
            commands::run_sweep(&cfg, &mut out).map(|r| format!("{} sweep rows", r.rows.len()))
        }
        Command::Kaldor => commands::kaldor(&cfg, &mut out).map(|s| {
            let verdicts: Vec<String> = s
                .reports
                .iter()
                .map(|r| format!("{} {}", r.kind, if r.passes() { "passes" } else { "fails" }))
                .collect();
            verdicts.join(", ")
        }),
        Command::Bisect { criterion } => {
            let criterion = criterion.as_deref().map(parse_criterion).transpose()?;
            commands::bisect(&cfg, criterion, &mut out)
                .map(|r| format!("{} = {} ({})", r.control, r.value, r.criterion.name()))
        }
    };
    for p in out.written() {
        println!("wrote {}", p.display());
    }
    println!("{}", outcome?);
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rescycle: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
