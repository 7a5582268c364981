//! Command-line experiment runner.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cavity_pointer::config::ExperimentConfig;
use cavity_pointer::error::Error;
use cavity_pointer::runner;
use cavity_pointer::svg::{emit_svg, PlotSpec};
use cavity_pointer::table::Table;

#[derive(Parser)]
#[command(
    name = "cavity-pointer",
    about = "Decoherence of a photon-number measurement by a composite moving mirror",
    version
)]
struct Cli {
    /// TOML experiment configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the CSV here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Also render an SVG line plot (fig3 and sweep).
    #[arg(long, global = true)]
    svg: Option<PathBuf>,

    /// Worker threads; results are identical for any value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for the oracle's random draws.
    #[arg(long, global = true, default_value_t = 20260810)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the effective model derived from the laboratory description.
    Model,
    /// Decay-curve family over the configured mode counts.
    Fig3,
    /// Sweep t, the mode count, the packet width or the pointer width.
    Sweep,
    /// Run the grid-oracle verification suite (exit 2 on any failure).
    Oracle,
    /// Reduced density matrix table at the configured time.
    Density,
    /// Phase-spread table at the configured time.
    Phase,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    match &cli.config {
        Some(path) => ExperimentConfig::from_file(path),
        None => {
            let config = ExperimentConfig::default();
            config.validate()?;
            Ok(config)
        }
    }
}

fn write_table(cli: &Cli, config: &ExperimentConfig, table: &Table) -> Result<(), Error> {
    let csv_path = cli
        .out
        .clone()
        .or_else(|| config.outputs.csv.as_ref().map(PathBuf::from));
    match csv_path {
        Some(path) => table.write_csv(&path)?,
        None => print!("{}", table.to_csv()),
    }
    Ok(())
}

fn write_svg_if_requested(
    cli: &Cli,
    config: &ExperimentConfig,
    table: &Table,
    spec: PlotSpec,
) -> Result<(), Error> {
    let svg_path = cli
        .svg
        .clone()
        .or_else(|| config.outputs.svg.as_ref().map(PathBuf::from));
    if let Some(path) = svg_path {
        std::fs::write(&path, emit_svg(table, &spec)?)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let config = load_config(cli)?;
    match cli.command {
        Command::Model => {
            let table = runner::run_model(&config)?;
            write_table(cli, &config, &table)?;
        }
        Command::Fig3 => {
            let table = runner::run_fig3(&config)?;
            write_table(cli, &config, &table)?;
            write_svg_if_requested(
                cli,
                &config,
                &table,
                PlotSpec {
                    title: "decoherence factor decay".to_string(),
                    x_column: "t".to_string(),
                    y_column: "f_abs".to_string(),
                    series_column: Some("n_modes".to_string()),
                    log_y: false,
                },
            )?;
        }
        Command::Sweep => {
            let table = runner::run_sweep(&config)?;
            write_table(cli, &config, &table)?;
            write_svg_if_requested(
                cli,
                &config,
                &table,
                PlotSpec {
                    title: format!("sweep over {}", config.sweep.variable.label()),
                    x_column: config.sweep.variable.label().to_string(),
                    y_column: "f_abs".to_string(),
                    series_column: None,
                    log_y: false,
                },
            )?;
        }
        Command::Oracle => {
            let (table, failures) = runner::run_oracle_suite(&config, cli.seed)?;
            write_table(cli, &config, &table)?;
            if failures > 0 {
                eprintln!("oracle suite: {failures} check(s) failed");
                return Ok(2);
            }
        }
        Command::Density => {
            let table = runner::run_density(&config)?;
            write_table(cli, &config, &table)?;
        }
        Command::Phase => {
            let table = runner::run_phase(&config)?;
            write_table(cli, &config, &table)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    // exit 1 on any argument problem; 2 stays reserved for oracle failures
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.exit_code() == 0 { 0 } else { 1 });
        }
    };

    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: could not configure {threads} threads: {e}");
            return ExitCode::from(1);
        }
    }

    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
