use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use vrelax_cli::doctor::{self, DoctorOptions, GRID_MAX};
use vrelax_cli::{execute, load_config, presets, CliError, Command, Overrides};
use vrelax_core::angular::HalfInt;
use vrelax_core::environment::DEFAULT_QUAD_ORDER;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Kmatrix,
    Rates,
    Superop,
    Evolve,
    Steady,
    Doctor,
}

/// Relaxation and stimulated-transition operators for degenerate V-type atoms.
#[derive(Parser, Debug)]
#[command(name = "vrelax", version, after_help = presets_help())]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// Scenario file (INI).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario; a config file given alongside overrides it key by key.
    #[arg(long)]
    preset: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override one key, e.g. `--set environment.n_mean=2`; an empty value removes the key.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    sets: Vec<String>,
    /// Planar-cavity reflectivity; switches the modifier to a cavity.
    #[arg(long)]
    r: Option<f64>,
    /// Worker threads for sweeps.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, hide = true, default_value_t = DEFAULT_QUAD_ORDER)]
    doctor_quad_order: usize,
    #[arg(long, hide = true)]
    grid_cap: Option<HalfInt>,
}

fn presets_help() -> String {
    let mut s = String::from("Presets:\n");
    for p in presets::PRESETS {
        s.push_str(&format!("  {:<18} {}\n", p.name, p.summary));
    }
    s
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn run(args: &Args) -> Result<(), CliError> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| {
                CliError::Config(vrelax_cli::ConfigError::bare(format!("--threads: {e}")))
            })?;
    }
    let command = match args.command {
        Cmd::Doctor => {
            let opts = DoctorOptions {
                quad_order: args.doctor_quad_order,
                grid_cap: args.grid_cap.unwrap_or(GRID_MAX),
            };
            let report = doctor::run(&opts);
            emit(&report.render(), args.out.as_ref())?;
            return match report.first_failure() {
                Some(c) => Err(CliError::Check(c.name.clone())),
                None => Ok(()),
            };
        }
        Cmd::Kmatrix => Command::Kmatrix,
        Cmd::Rates => Command::Rates,
        Cmd::Superop => Command::Superop,
        Cmd::Evolve => Command::Evolve,
        Cmd::Steady => Command::Steady,
    };
    let overrides = Overrides {
        sets: args.sets.clone(),
        reflectivity: args.r,
    };
    let cfg = load_config(args.config.as_deref(), args.preset.as_deref(), &overrides)?;
    log::debug!("resolved configuration:\n{}", cfg.to_ini());
    let text = execute(command, &cfg)?;
    emit(&text, args.out.as_ref())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vrelax: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
