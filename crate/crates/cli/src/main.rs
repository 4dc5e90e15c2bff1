use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nanolase::engine::{simulate_with, SimConfig};
use nanolase_cli::config::{load_config, preset, ConfigError, RunConfig, PRESETS};
use nanolase_cli::sweep::plan;
use nanolase_cli::{execute, output_dir, parse_methods, OUT_ENV};

const CONFIG_ERROR: u8 = 1;
const RUNTIME_ERROR: u8 = 2;

/// Stochastic nanolaser noise simulator. All rates are in 1/ps.
#[derive(Parser)]
#[command(name = "nanolase", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a configuration file.
    Run {
        config: PathBuf,
        /// Output directory.
        #[arg(long, env = OUT_ENV)]
        out: Option<PathBuf>,
        /// Base seed, overriding `simulation.base_seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; defaults to the available cores.
        #[arg(long)]
        threads: Option<usize>,
        /// Comma-separated subset of sta, me, analytic, meanfield.
        #[arg(long)]
        methods: Option<String>,
        #[arg(long)]
        no_plots: bool,
    },
    /// Validate a configuration and print it with defaults filled in.
    Check { config: PathBuf },
    /// List the built-in configurations, or print one.
    Presets { name: Option<String> },
    /// Write a single trajectory `t_ps,re_e,im_e,n_a,n_e` as CSV.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// End time in ps; derived from the expected linewidth when absent.
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        sample_dt: Option<f64>,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(CONFIG_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(CONFIG_ERROR)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(RUNTIME_ERROR)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run {
            config,
            out,
            seed,
            threads,
            methods,
            no_plots,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.simulation.base_seed = seed;
            }
            if let Some(list) = methods {
                cfg.methods = parse_methods(&list).map_err(Failure::Config)?;
            }
            if no_plots {
                cfg.output.plots = false;
            }
            cfg.validate()?;
            if let Some(n) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| Failure::Runtime(e.to_string()))?;
            }
            let dir = output_dir(&cfg, out.as_deref());
            let summary = execute(&cfg, &dir).map_err(|e| Failure::Runtime(e.to_string()))?;
            let failed = summary.result.rows.iter().filter(|r| r.status.starts_with("error")).count();
            println!(
                "{} rows written to {} ({} failed), {} plots",
                summary.result.rows.len(),
                summary.table.display(),
                failed,
                summary.plots.len()
            );
            Ok(())
        }
        Command::Check { config } => {
            let cfg = load_config(&config)?;
            print!("{}", cfg.to_toml());
            Ok(())
        }
        Command::Presets { name } => match name {
            None => {
                for name in PRESETS {
                    println!("{name}");
                }
                Ok(())
            }
            Some(name) => {
                let cfg = preset(&name).ok_or_else(|| {
                    Failure::Config(format!("unknown preset `{name}` (known: {})", PRESETS.join(", ")))
                })?;
                print!("{}", cfg.to_toml());
                Ok(())
            }
        },
        Command::Simulate {
            config,
            seed,
            t_end,
            sample_dt,
            out,
        } => {
            let cfg: RunConfig = load_config(&config)?;
            let mut sim = cfg.simulation.clone();
            sim.n_traj = 1;
            sim.t_end = t_end.or(sim.t_end);
            sim.sample_dt = sample_dt.or(sim.sample_dt);
            let runtime = |e: nanolase::Error| Failure::Runtime(e.to_string());
            let p = plan(&cfg.laser, &sim).map_err(runtime)?;
            let sim_cfg: SimConfig = p.sim;
            if sim_cfg.t_end <= sim_cfg.burn_in {
                return Err(Failure::Config("t_end must exceed the burn-in".into()));
            }
            if sim_cfg.sample_count() > sim.max_samples {
                return Err(Failure::Config(format!(
                    "{} samples exceed simulation.max_samples = {}",
                    sim_cfg.sample_count(),
                    sim.max_samples
                )));
            }
            let traj = simulate_with(&cfg.laser, seed.unwrap_or(sim.base_seed), &sim_cfg).map_err(runtime)?;
            match out {
                Some(path) => {
                    let f = std::fs::File::create(&path)
                        .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
                    traj.write_csv(std::io::BufWriter::new(f)).map_err(runtime)?;
                }
                None => traj.write_csv(std::io::stdout().lock()).map_err(runtime)?,
            }
            Ok(())
        }
    }
}
