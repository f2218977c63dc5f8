use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use ca3d::experiment::{
    emit_plot_data, run_single, run_spacing_sweep, run_uav_count_sweep, save_single, spacing_rows_csv,
    timing_csv, uav_rows_csv, write_file, ExperimentConfig, Scheme, SweepTable,
};
use ca3d::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sweep {
    /// Two UAVs at varying horizontal spacing.
    Spacing,
    /// Schemes against the number of UAVs.
    Uavs,
    /// One scheme, one UAV count, first seed.
    Single,
}

/// Run deployment experiments from a TOML config and write CSV output.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Cli {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum)]
    sweep: Sweep,
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated seed list overriding the config.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Schemes overriding the config (ca3d, greedy, random, fixed).
    #[arg(long, value_delimiter = ',')]
    scheme: Option<Vec<String>>,
}

enum Failure {
    Config(Error),
    Cells(usize),
    Other(Error),
}

fn load(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::from_file(&cli.config)?;
    if let Some(seeds) = &cli.seeds {
        cfg = cfg.with_seeds(seeds.clone())?;
    }
    if let Some(names) = &cli.scheme {
        let schemes = names.iter().map(|s| s.parse::<Scheme>()).collect::<Result<Vec<_>, _>>()?;
        cfg = cfg.with_schemes(schemes);
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = load(cli).map_err(Failure::Config)?;
    std::fs::create_dir_all(&cli.out).map_err(|e| Failure::Other(Error::Io {
        path: cli.out.clone(),
        source: e,
    }))?;
    let out: &Path = &cli.out;
    let classify = |e: Error| match e {
        Error::Config(_) => Failure::Config(e),
        other => Failure::Other(other),
    };
    match cli.sweep {
        Sweep::Spacing => {
            let rows = run_spacing_sweep(&cfg).map_err(classify)?;
            let path = write_file(out.join("spacing.csv"), &spacing_rows_csv(&rows)).map_err(Failure::Other)?;
            log::info!("wrote {}", path.display());
            emit_plot_data(SweepTable::Spacing(&rows), out).map_err(Failure::Other)?;
            Ok(())
        }
        Sweep::Uavs => {
            let rows = run_uav_count_sweep(&cfg).map_err(classify)?;
            write_file(out.join("uavs.csv"), &uav_rows_csv(&rows)).map_err(Failure::Other)?;
            write_file(out.join("uavs_timing.csv"), &timing_csv(&rows)).map_err(Failure::Other)?;
            emit_plot_data(SweepTable::Uavs(&rows), out).map_err(Failure::Other)?;
            let failed = rows.iter().filter(|r| r.result.is_err()).count();
            if failed > 0 {
                return Err(Failure::Cells(failed));
            }
            Ok(())
        }
        Sweep::Single => {
            let single = run_single(&cfg).map_err(classify)?;
            save_single(&single, out.join("single.json")).map_err(Failure::Other)?;
            if let Some(trace) = &single.trace {
                write_file(out.join("trace.csv"), &trace.to_csv()).map_err(Failure::Other)?;
            }
            println!("scheme={} m={} seed={}", single.scheme, single.m, single.seed);
            println!("{}", ca3d::EvaluationReport::CSV_HEADER);
            println!("{}", single.initial_report.csv_row());
            println!("{}", single.report.csv_row());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Cells(n)) => {
            eprintln!("error: {n} cell(s) failed; see the status column");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
