//! Batch front end for the nanolaser simulator: TOML run configurations,
//! pump and emitter sweeps over several methods, CSV tables and SVG plots.

pub mod config;
pub mod plots;
pub mod sweep;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use config::{Method, RunConfig};
use sweep::SweepResult;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "NANOLASE_OUT";
pub const DEFAULT_OUT: &str = "nanolase-out";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {message}")]
    Output { path: PathBuf, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_owned(),
        source,
    }
}

fn out_err<E: std::fmt::Display>(path: &Path) -> impl FnOnce(E) -> RunError + '_ {
    move |e| RunError::Output {
        path: path.to_owned(),
        message: e.to_string(),
    }
}

/// Output directory: the explicit choice, then the config, then
/// `$NANOLASE_OUT`, then [`DEFAULT_OUT`].
pub fn output_dir(cfg: &RunConfig, explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_owned)
        .or_else(|| cfg.output.dir.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

#[derive(Debug)]
pub struct RunSummary {
    pub result: SweepResult,
    pub table: PathBuf,
    pub plots: Vec<PathBuf>,
}

/// Runs the sweep and writes into `dir`:
///
/// * `config.toml`: the effective configuration
/// * `sweep.csv`: one row per (point, method)
/// * `coherence/point_NNN_<method>_{g1,spectrum}.csv`
/// * `plots/`: SVG figures with paired CSVs, unless plots are disabled or no
///   method is enabled
pub fn execute(cfg: &RunConfig, dir: &Path) -> Result<RunSummary, RunError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let echo = dir.join("config.toml");
    std::fs::write(&echo, cfg.to_toml()).map_err(io_err(&echo))?;

    let result = sweep::sweep(cfg);

    let table = dir.join("sweep.csv");
    let file = File::create(&table).map_err(io_err(&table))?;
    sweep::write_rows(BufWriter::new(file), &result.rows).map_err(out_err(&table))?;

    if !result.coherence.is_empty() {
        let cdir = dir.join("coherence");
        std::fs::create_dir_all(&cdir).map_err(io_err(&cdir))?;
        for c in &result.coherence {
            let stem = format!("point_{:03}_{}", c.point, c.method.label());
            let path = cdir.join(format!("{stem}_g1.csv"));
            let f = File::create(&path).map_err(io_err(&path))?;
            nanolase::export::write_g1(BufWriter::new(f), &c.g1).map_err(out_err(&path))?;
            let path = cdir.join(format!("{stem}_spectrum.csv"));
            let f = File::create(&path).map_err(io_err(&path))?;
            nanolase::export::write_spectrum(BufWriter::new(f), &c.spectrum).map_err(out_err(&path))?;
        }
    }

    let mut plots = Vec::new();
    if cfg.output.plots && !cfg.methods.is_empty() {
        let pdir = dir.join("plots");
        let axis = cfg.sweep.as_ref().map(|s| s.axis).unwrap_or_default();
        plots = plots::emit_plots(&pdir, &result, axis).map_err(out_err(&pdir))?;
    }
    Ok(RunSummary { result, table, plots })
}

/// Parses a comma-separated method list; an empty string gives no methods.
pub fn parse_methods(list: &str) -> Result<Vec<Method>, String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| Method::parse(s).ok_or_else(|| format!("unknown method `{s}` (expected sta, me, analytic, meanfield)")))
        .collect()
}
