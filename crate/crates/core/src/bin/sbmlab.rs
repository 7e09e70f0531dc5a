//! Thin CLI over the experiment runner.  The library (and its
//! examples) is the primary interface; this binary exists for config
//! driven batch runs.
//!
//! Exit codes: 0 success, 2 config/schema error, 3 numerical abort
//! (diagnostics written next to the run artifacts).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use sbmlab::config::{preset, Config};
use sbmlab::error::Error;
use sbmlab::runner::{run, ExperimentKind};

#[derive(Parser)]
#[command(
    name = "sbmlab",
    about = "Super-Brownian SPDE laboratory: log-Laplace duality experiments"
)]
struct Cli {
    /// Experiment: pde | dual | branching | spde | sde | duality | cozero
    subcommand: String,

    /// Config file (TOML); see configs/ for the schema.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Built-in preset name (e.g. h0-smoke, duality-full, spde-default).
    #[arg(long)]
    preset: Option<String>,

    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,

    /// Path count override.
    #[arg(long)]
    paths: Option<usize>,

    /// Output directory (default `runs/`).
    #[arg(long, default_value = "runs")]
    out_dir: PathBuf,

    /// Dotted-path config overrides, e.g. --override grid.N=321
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.exit_code() == 3 {
                let diag = serde_json::json!({ "error": e.to_string() });
                let _ = fs::create_dir_all(&cli.out_dir);
                let _ = fs::write(
                    cli.out_dir.join("diagnostics.json"),
                    serde_json::to_string_pretty(&diag).unwrap(),
                );
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> sbmlab::Result<()> {
    let kind: ExperimentKind = cli.subcommand.parse()?;

    let text = match (&cli.config, &cli.preset) {
        (Some(path), _) => fs::read_to_string(path)?,
        (None, Some(name)) => preset(name)
            .ok_or_else(|| Error::config("--preset", format!("unknown preset `{name}`")))?
            .to_string(),
        (None, None) => {
            let fallback = format!("{}-default", kind.name());
            preset(&fallback)
                .or_else(|| preset("h0-smoke"))
                .ok_or_else(|| Error::config("--config", "no config or preset given"))?
                .to_string()
        }
    };

    let mut overrides: Vec<(String, String)> = Vec::new();
    for ov in &cli.overrides {
        let (k, v) = ov
            .split_once('=')
            .ok_or_else(|| Error::config("--override", format!("`{ov}` is not KEY=VALUE")))?;
        overrides.push((k.to_string(), v.to_string()));
    }
    if let Some(seed) = cli.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    if let Some(paths) = cli.paths {
        overrides.push(("mc.paths".into(), paths.to_string()));
    }

    let cfg = Config::from_toml(&text, &overrides)?;
    let out = run(&cfg, kind, &cli.out_dir)?;
    println!("run dir: {}", out.dir.display());
    println!("{}", serde_json::to_string_pretty(&out.report).unwrap());
    Ok(())
}
