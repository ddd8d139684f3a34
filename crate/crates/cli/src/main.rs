use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use isacjam_cli::experiment::{run_design, run_evaluate, run_experiment};
use isacjam_cli::{load_config, preset, preset_names, Overrides, ScenarioConfig, WorkbenchError, WorkbenchResult};

/// Anti-jamming ISAC waveform and mismatched-filter design workbench.
#[derive(Debug, Parser)]
#[command(name = "isacjam", version)]
struct Cli {
    /// RNG seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, overriding the config's `output`.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Preset the config is layered on, overriding the file's `preset`.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// `key=value` applied after the config file; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the solver and save the waveform, filter and trace.
    Design { config: PathBuf },
    /// Metrics of the waveform and filter saved by `design`.
    Evaluate { config: PathBuf },
    /// Run the config's experiment and write its CSV files.
    Experiment { config: PathBuf },
    /// List the available presets.
    Presets,
}

impl Cli {
    fn load(&self, path: &Path) -> WorkbenchResult<ScenarioConfig> {
        load_config(
            path,
            &Overrides {
                preset: self.preset.clone(),
                seed: self.seed,
                output: self.out_dir.as_ref().map(|p| p.display().to_string()),
                values: self.overrides.clone(),
            },
        )
    }
}

fn report(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn run(cli: &Cli) -> WorkbenchResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(WorkbenchError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| WorkbenchError::Config(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Presets => {
            for (name, about) in preset_names() {
                let cfg = preset(name)?;
                println!("{name:<12} L={:<4} {:<17} {about}", cfg.length, cfg.experiment.name());
            }
        }
        Command::Design { config } => {
            let cfg = cli.load(config)?;
            let (design, files) = run_design(&cfg, Path::new(&cfg.output))?;
            let t = &design.trace;
            println!(
                "{} iterations, converged: {}, final gap {:e}",
                t.iterations(),
                t.converged,
                t.final_gap()
            );
            report(&files);
        }
        Command::Evaluate { config } => {
            let cfg = cli.load(config)?;
            let (m, files) = run_evaluate(&cfg, Path::new(&cfg.output))?;
            println!(
                "PSLR {:.2} dB, LPG {:.2} dB, jamming peak {:.2} dB, PAPR {:.3}",
                m.pslr_db, m.lpg_db, m.jam_peak_db, m.papr
            );
            report(&files);
        }
        Command::Experiment { config } => {
            let cfg = cli.load(config)?;
            report(&run_experiment(&cfg, Path::new(&cfg.output))?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("isacjam: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
