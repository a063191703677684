use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use tomflow_cli::{parse_scenario, run, write_artifacts, CliError, Kind};

#[derive(Parser)]
#[command(name = "tomflow", version, about = "Third-order traffic model solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 0 lets rayon decide.
    #[arg(long, global = true, env = "TOMFLOW_THREADS", default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Exact Riemann solution profiles.
    Riemann,
    /// Finite-volume evolution.
    Fvm,
    /// Car-following simulation and reconstruction.
    Micro,
    /// Stability and sub-characteristic tables.
    Analyze,
    /// Relaxation-time sweep.
    Sweep,
    /// Parse and validate, then print the normalized scenario.
    Check,
}

impl Command {
    fn kind(self) -> Option<Kind> {
        match self {
            Command::Riemann => Some(Kind::Riemann),
            Command::Fvm => Some(Kind::Fvm),
            Command::Micro => Some(Kind::Micro),
            Command::Analyze => Some(Kind::Analyze),
            Command::Sweep => Some(Kind::Sweep),
            Command::Check => None,
        }
    }
}

fn validation(field: &str, message: impl Into<String>) -> CliError {
    CliError::Validation {
        field: field.into(),
        message: message.into(),
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let path = cli.config.as_deref().ok_or_else(|| validation("--config", "a scenario file is required"))?;
    let (sc, text) = parse_scenario(path)?;
    let Some(kind) = cli.command.kind() else {
        print!("{}", sc.to_normalized());
        return Ok(());
    };
    if sc.kind != kind {
        return Err(validation(
            "kind",
            format!("scenario is `{}` but the `{}` command was given", sc.kind.name(), kind.name()),
        ));
    }
    let out = match (&cli.out, &sc.output.dir) {
        (Some(o), _) => o.clone(),
        (None, Some(d)) => Path::new(d).to_path_buf(),
        (None, None) => return Err(validation("output.dir", "no output directory; pass --out")),
    };
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| validation("--threads", e.to_string()))?;
    }
    log::info!("running {} scenario from {}", kind.name(), path.display());
    let art = run(&sc)?;
    write_artifacts(&out, &art, &text)?;
    log::info!("wrote {} files to {}", art.files.len() + 1, out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.structured());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
