//! The `hatm` command line.
//!
//! Every command loads a model (built-in preset, JSON model config, or a
//! previously exported series), runs one computation, writes one artifact
//! and prints a one-line summary. Exit status is 0 on success, 1 for
//! configuration errors and 2 for numerical failures.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::diagnostics::{
    compare_rows, detect_plateau, hbar_curve, linspace, optimal_hbar, residual_grid,
    residual_objective, rk_reference, uniform_grid, ResidualEvaluator, DEFAULT_REL_SLOPE_TOL,
};
use crate::engine::{solve, telescoping_check, DeformationSeries};
use crate::error::{Error, Result, MAX_ORDER};
use crate::export::{comparison_csv, curve_csv, residual_csv, series_from_json, series_to_json};
use crate::model::{load_system, preset, QuadraticOdeSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Run the recurrence and write the series JSON.
    Solve,
    /// Sample partial sums over ħ at fixed t and write `hbar,value` CSV.
    HbarCurve,
    /// Write the residual functions over a t range as CSV.
    Residual,
    /// Pick the ħ minimizing the integrated squared residual.
    OptimalHbar,
    /// Compare against the Runge–Kutta reference and write CSV.
    Compare,
    /// Check the telescoping identity of the order components.
    Telescope,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::HbarCurve => "hbar-curve",
            Command::Residual => "residual",
            Command::OptimalHbar => "optimal-hbar",
            Command::Compare => "compare",
            Command::Telescope => "telescope",
        }
    }

    fn extension(self) -> &'static str {
        match self {
            Command::HbarCurve | Command::Residual | Command::Compare => "csv",
            _ => "json",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "hatm",
    version,
    about = "Homotopy analysis transform method for quadratic ODE systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: Options,
}

#[derive(Debug, clap::Args)]
struct Options {
    /// Built-in model (`hiv-cd8`).
    #[arg(long, global = true, conflicts_with_all = ["model", "series"])]
    preset: Option<String>,

    /// JSON model-config file.
    #[arg(long, global = true, conflicts_with = "series")]
    model: Option<PathBuf>,

    /// Previously exported series JSON (replaces --preset/--model and -N).
    #[arg(long, global = true)]
    series: Option<PathBuf>,

    /// Series order N.
    #[arg(
        short = 'N',
        long = "order",
        global = true,
        allow_negative_numbers = true
    )]
    order: Option<i64>,

    /// Convergence-control parameter.
    #[arg(long, global = true, allow_negative_numbers = true)]
    hbar: Option<f64>,

    /// Fixed time for ħ-curves.
    #[arg(long = "t", global = true, allow_negative_numbers = true)]
    t: Option<f64>,

    /// Time range `lo:hi`.
    #[arg(long = "t-range", global = true, allow_hyphen_values = true)]
    t_range: Option<String>,

    /// ħ grid `lo:hi:step`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid: Option<String>,

    /// Number of t samples for residual grids.
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Restrict ħ-curves to one state (by name).
    #[arg(long, global = true)]
    state: Option<String>,

    /// Plateau slope tolerance relative to the curve scale.
    #[arg(long = "rel-slope-tol", global = true)]
    rel_slope_tol: Option<f64>,

    /// Oracle relative tolerance.
    #[arg(long = "rel-tol", global = true)]
    rel_tol: Option<f64>,

    /// Oracle absolute tolerance.
    #[arg(long = "abs-tol", global = true)]
    abs_tol: Option<f64>,

    /// Output path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

/// Where the model comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelSource {
    Preset(String),
    ConfigFile(PathBuf),
    SeriesFile(PathBuf),
}

/// A validated command invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub source: ModelSource,
    pub order: usize,
    pub hbar: f64,
    pub t_fixed: f64,
    pub t_range: (f64, f64),
    pub grid: (f64, f64, f64),
    pub samples: usize,
    pub state: Option<String>,
    pub rel_slope_tol: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub out: PathBuf,
}

impl RunConfig {
    /// Defaults used when a flag is absent.
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            source: ModelSource::Preset("hiv-cd8".into()),
            order: 5,
            hbar: -0.8,
            t_fixed: 1.0,
            t_range: (0.0, 1.0),
            grid: (-1.5, 0.0, 0.01),
            samples: 201,
            state: None,
            rel_slope_tol: DEFAULT_REL_SLOPE_TOL,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            out: PathBuf::from(format!("hatm-{}.{}", command.name(), command.extension())),
        }
    }

    fn from_cli(cli: Cli) -> Result<Self> {
        let o = cli.opts;
        let mut cfg = RunConfig::new(cli.command);
        cfg.source = match (o.preset, o.model, o.series) {
            (Some(p), None, None) => ModelSource::Preset(p),
            (None, Some(m), None) => ModelSource::ConfigFile(m),
            (None, None, Some(s)) => ModelSource::SeriesFile(s),
            (None, None, None) => cfg.source,
            _ => return Err(bad("use only one of --preset, --model, --series")),
        };
        if let Some(n) = o.order {
            if n < 0 || n > MAX_ORDER as i64 {
                return Err(Error::OrderOutOfRange(n));
            }
            cfg.order = n as usize;
        }
        if let Some(h) = o.hbar {
            cfg.hbar = h;
        }
        if let Some(t) = o.t {
            cfg.t_fixed = t;
        }
        if let Some(r) = o.t_range {
            let v = parse_reals(&r, 2, "--t-range")?;
            cfg.t_range = (v[0], v[1]);
        }
        if let Some(g) = o.grid {
            let v = parse_reals(&g, 3, "--grid")?;
            cfg.grid = (v[0], v[1], v[2]);
        }
        if let Some(s) = o.samples {
            cfg.samples = s;
        }
        cfg.state = o.state;
        if let Some(v) = o.rel_slope_tol {
            cfg.rel_slope_tol = v;
        }
        if let Some(v) = o.rel_tol {
            cfg.rel_tol = v;
        }
        if let Some(v) = o.abs_tol {
            cfg.abs_tol = v;
        }
        if let Some(p) = o.out {
            cfg.out = p;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order > MAX_ORDER {
            return Err(Error::OrderOutOfRange(self.order as i64));
        }
        let finite = [self.hbar, self.t_fixed, self.t_range.0, self.t_range.1]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(bad("non-finite numeric flag"));
        }
        if !(self.t_range.0 < self.t_range.1) || self.t_range.0 < 0.0 {
            return Err(bad("--t-range must satisfy 0 <= lo < hi"));
        }
        uniform_grid(self.grid.0, self.grid.1, self.grid.2)?;
        if self.samples < 2 {
            return Err(bad("--samples must be at least 2"));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(bad("--rel-tol and --abs-tol must be > 0"));
        }
        if !(self.rel_slope_tol > 0.0) {
            return Err(bad("--rel-slope-tol must be > 0"));
        }
        Ok(())
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn parse_reals(text: &str, n: usize, flag: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != n {
        return Err(bad(format!(
            "{flag} expects {n} ':'-separated reals, got {text:?}"
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("{flag}: cannot parse {p:?} as a real")))
        })
        .collect()
}

fn load_model(path: &Path) -> Result<QuadraticOdeSystem> {
    load_system(&std::fs::read_to_string(path)?)
}

fn load_series(cfg: &RunConfig) -> Result<DeformationSeries> {
    match &cfg.source {
        ModelSource::Preset(name) => solve(&preset(name)?, cfg.order),
        ModelSource::ConfigFile(path) => solve(&load_model(path)?, cfg.order),
        ModelSource::SeriesFile(path) => series_from_json(&std::fs::read_to_string(path)?),
    }
}

/// Inserts `_suffix` before the extension of `path`.
fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{suffix}"),
    };
    path.with_file_name(name)
}

#[derive(Serialize)]
struct OptimalHbarReport {
    order: usize,
    hbar: f64,
    objective: f64,
    t_range: [f64; 2],
    grid: [f64; 3],
}

#[derive(Serialize)]
struct TelescopeReport {
    order: usize,
    max_defect: f64,
}

/// Executes a validated configuration and returns the summary line.
pub fn run(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    let series = load_series(cfg)?;
    let sys = series.system();
    let n = series.order();
    let out = &cfg.out;
    let cmd = cfg.command.name();
    let mut summary = String::new();

    match cfg.command {
        Command::Solve => {
            write(out, &series_to_json(&series))?;
            let _ = write!(summary, "{cmd} N={n} hbar=symbolic out={}", out.display());
        }
        Command::HbarCurve => {
            let grid = uniform_grid(cfg.grid.0, cfg.grid.1, cfg.grid.2)?;
            let states: Vec<usize> = match &cfg.state {
                Some(name) => vec![sys
                    .index_of(name)
                    .ok_or_else(|| bad(format!("--state: unknown state {name:?}")))?],
                None => (0..sys.dim()).collect(),
            };
            let mut written = Vec::new();
            let mut plateaus = Vec::new();
            for &i in &states {
                let curve = hbar_curve(&series, i, cfg.t_fixed, &grid)?;
                let path = if states.len() == 1 {
                    out.clone()
                } else {
                    suffixed(out, &sys.names()[i])
                };
                write(&path, &curve_csv(&curve))?;
                let plateau = if curve.len() >= 3 {
                    detect_plateau(&curve, cfg.rel_slope_tol)?
                } else {
                    None
                };
                plateaus.push(match plateau {
                    Some(iv) => format!("{}:[{},{}]", sys.names()[i], iv.lo, iv.hi),
                    None => format!("{}:none", sys.names()[i]),
                });
                written.push(path.display().to_string());
            }
            let _ = write!(
                summary,
                "{cmd} N={n} hbar={}:{}:{} t={} plateaus={} out={}",
                cfg.grid.0,
                cfg.grid.1,
                cfg.grid.2,
                cfg.t_fixed,
                plateaus.join(","),
                written.join(",")
            );
        }
        Command::Residual => {
            let ts = linspace(cfg.t_range.0, cfg.t_range.1, cfg.samples)?;
            let grid = residual_grid(&series, cfg.hbar, &ts)?;
            write(out, &residual_csv(&grid, sys.names()))?;
            let _ = write!(
                summary,
                "{cmd} N={n} hbar={} out={}",
                cfg.hbar,
                out.display()
            );
        }
        Command::OptimalHbar => {
            let grid = uniform_grid(cfg.grid.0, cfg.grid.1, cfg.grid.2)?;
            let (lo, hi) = cfg.t_range;
            let best = optimal_hbar(&series, &grid, lo, hi)?;
            let objective = residual_objective(&ResidualEvaluator::new(&series), best, lo, hi)?;
            let report = OptimalHbarReport {
                order: n,
                hbar: best,
                objective,
                t_range: [lo, hi],
                grid: [cfg.grid.0, cfg.grid.1, cfg.grid.2],
            };
            write(out, &to_json(&report))?;
            let _ = write!(summary, "{cmd} N={n} hbar={best} out={}", out.display());
        }
        Command::Compare => {
            let (lo, hi) = cfg.t_range;
            let oracle = rk_reference(sys, hi, cfg.rel_tol, cfg.abs_tol)?;
            let rows = compare_rows(&series, cfg.hbar, &oracle, lo, hi)?;
            write(out, &comparison_csv(&rows, sys.names()))?;
            let worst = rows.iter().map(|r| r.rel_err).fold(0.0, f64::max);
            let _ = write!(
                summary,
                "{cmd} N={n} hbar={} max_rel_err={worst:e} out={}",
                cfg.hbar,
                out.display()
            );
        }
        Command::Telescope => {
            let defect = telescoping_check(&series);
            let report = TelescopeReport {
                order: n,
                max_defect: defect,
            };
            write(out, &to_json(&report))?;
            let _ = write!(
                summary,
                "{cmd} N={n} hbar=symbolic max_defect={defect:e} out={}",
                out.display()
            );
        }
    }
    Ok(summary)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(Error::from)
}

/// Parses `args` (including the program name), runs, prints, and returns
/// the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    let msg = e.to_string();
                    let first = msg.lines().next().unwrap_or("invalid arguments");
                    eprintln!("{first}");
                    1
                }
            };
        }
    };
    let outcome = RunConfig::from_cli(cli).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig> {
        let cli = Cli::try_parse_from(std::iter::once("hatm").chain(args.iter().copied()))
            .map_err(|e| bad(e.to_string()))?;
        RunConfig::from_cli(cli)
    }

    #[test]
    fn defaults() {
        let cfg = parse(&["residual"]).unwrap();
        assert_eq!(cfg.hbar, -0.8);
        assert_eq!(cfg.order, 5);
        assert_eq!(cfg.t_range, (0.0, 1.0));
        assert_eq!(cfg.out, PathBuf::from("hatm-residual.csv"));
    }

    #[test]
    fn negative_order_rejected() {
        let err = parse(&["solve", "-N", "-3"]).unwrap_err();
        assert!(err.to_string().contains("N must be in [0, 30]"), "{err}");
        assert!(parse(&["solve", "--order", "31"]).is_err());
    }

    #[test]
    fn negative_ranges_parse() {
        let cfg = parse(&["hbar-curve", "--grid", "-1.5:-0.1:0.05", "--hbar", "-1"]).unwrap();
        assert_eq!(cfg.grid, (-1.5, -0.1, 0.05));
        assert_eq!(cfg.hbar, -1.0);
        assert!(parse(&["hbar-curve", "--grid", "-1.5:0"]).is_err());
        assert!(parse(&["residual", "--t-range", "1:0"]).is_err());
    }

    #[test]
    fn conflicting_sources() {
        assert!(parse(&["solve", "--preset", "hiv-cd8", "--model", "m.json"]).is_err());
    }

    #[test]
    fn suffix_paths() {
        assert_eq!(
            suffixed(Path::new("out/c.csv"), "T"),
            PathBuf::from("out/c_T.csv")
        );
        assert_eq!(suffixed(Path::new("c"), "Za"), PathBuf::from("c_Za"));
    }
}
