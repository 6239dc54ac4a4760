use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fleetsim_cli::{load_config, run_batch, write_csv, BatchOptions, ExperimentConfig};
use fleetsim_core::maps::{benchmark_map, BENCHMARK_MAPS};
use fleetsim_core::{PlannerRegistry, TimingMode};

#[derive(Debug, Parser)]
#[command(name = "fleetsim", version, about = "Lifelong AGV fleet simulator")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the built-in benchmark maps as .map files.
    Maps {
        /// Output directory (defaults to the map directory).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "FLEETSIM_MAP_DIR")]
        map_dir: Option<PathBuf>,
    },
    /// Print the expanded configuration as TOML and exit.
    Show(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Experiment file (TOML).
    #[arg(long, conflicts_with = "setup")]
    config: Option<PathBuf>,
    /// Row of the setup table (1 to 19).
    #[arg(long)]
    setup: Option<u8>,
    /// Benchmark name or map file.
    #[arg(long)]
    map: Option<String>,
    /// Agent counts; one batch entry per value.
    #[arg(long, value_delimiter = ',')]
    agents: Vec<usize>,
    /// Repetitions per entry; seeds run from the config seed upward.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// Simulated seconds per run.
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    /// Write the line-delimited event log of every run here.
    #[arg(long)]
    events_out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    parallel: usize,
    #[arg(long, value_parser = parse_timing)]
    timing: Option<TimingMode>,
    /// Report measured host seconds in the CSV instead of 0.
    #[arg(long)]
    wall_clock: bool,
    /// Directory searched for map files.
    #[arg(long, env = "FLEETSIM_MAP_DIR")]
    map_dir: Option<PathBuf>,
}

fn parse_timing(s: &str) -> Result<TimingMode, String> {
    match s {
        "budget" => Ok(TimingMode::Budget),
        "wallclock" => Ok(TimingMode::Wallclock),
        other => Err(format!("expected `budget` or `wallclock`, got `{other}`")),
    }
}

fn base_config(args: &RunArgs) -> Result<ExperimentConfig, String> {
    let mut c = match (&args.config, args.setup) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            load_config(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        (None, Some(s)) => ExperimentConfig::from_preset(s).map_err(|e| e.to_string())?,
        (None, None) => ExperimentConfig::default(),
    };
    if let Some(m) = &args.map {
        c.map = m.clone();
    }
    if let Some(d) = args.duration {
        c.duration = d;
    }
    if let Some(t) = args.timing {
        c.timing = t;
    }
    c.validate().map_err(|e| e.to_string())?;
    Ok(c)
}

fn expand(args: &RunArgs) -> Result<Vec<ExperimentConfig>, String> {
    let base = base_config(args)?;
    if args.agents.is_empty() {
        return Ok(vec![base]);
    }
    Ok(args
        .agents
        .iter()
        .map(|&k| ExperimentConfig {
            agents: k,
            ..base.clone()
        })
        .collect())
}

fn run(args: &RunArgs) -> Result<bool, String> {
    let configs = expand(args)?;
    let opts = BatchOptions {
        map_dir: args.map_dir.as_deref(),
        record_events: args.events_out.is_some(),
        parallelism: args.parallel,
    };
    let records = run_batch(&configs, args.seeds, &opts, &PlannerRegistry::new());
    let mut rows: Vec<_> = records.iter().map(|r| r.row.clone()).collect();
    if !args.wall_clock {
        for r in &mut rows {
            r.wall_clock = 0.0;
        }
    }
    let file = File::create(&args.out).map_err(|e| format!("{}: {e}", args.out.display()))?;
    write_csv(&rows, BufWriter::new(file)).map_err(|e| e.to_string())?;
    if let Some(path) = &args.events_out {
        let mut w = BufWriter::new(File::create(path).map_err(|e| format!("{}: {e}", path.display()))?);
        for r in &records {
            let row = &r.row;
            writeln!(w, "# setup={} map={} agents={} seed={}", row.setup, row.map, row.agents, row.seed)
                .map_err(|e| e.to_string())?;
            if let Some(m) = &r.metrics {
                m.write_events(&mut w).map_err(|e| e.to_string())?;
            }
        }
        w.flush().map_err(|e| e.to_string())?;
    }
    let failed = rows.iter().filter(|r| !r.error.is_empty()).count();
    for r in rows.iter().filter(|r| !r.error.is_empty()) {
        eprintln!("run failed: setup {} map {} agents {} seed {}: {}", r.setup, r.map, r.agents, r.seed, r.error);
    }
    eprintln!("{} runs, {} failed, results in {}", rows.len(), failed, args.out.display());
    Ok(failed == 0)
}

fn write_maps(out: Option<PathBuf>, map_dir: Option<PathBuf>) -> Result<(), String> {
    let dir = out.or(map_dir).unwrap_or_else(|| PathBuf::from("maps"));
    std::fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    for name in BENCHMARK_MAPS {
        let map = benchmark_map(name).expect("listed benchmark");
        let path = dir.join(format!("{name}.map"));
        std::fs::write(&path, map.to_map_string()).map_err(|e| format!("{}: {e}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Some(Command::Maps { out, map_dir }) => write_maps(out, map_dir).map(|_| true),
        Some(Command::Show(args)) => base_config(&args).map(|c| {
            let _ = io::stdout().write_all(c.to_toml().as_bytes());
            true
        }),
        None => run(&cli.run),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
