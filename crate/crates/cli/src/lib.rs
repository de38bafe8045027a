//! Command-line scenario runner for qubit dynamics and their classical reductions.
//!
//! A run writes a per-time-step CSV and a JSON summary of divisibility
//! verdicts; a sweep writes one CSV row of verdicts per parameter value.

pub mod config;
pub mod scenario;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use rayon::prelude::*;
use serde::Serialize;

use config::{parse_number, ParamValue, Scenario, ScenarioConfig, SweepSpec};
use scenario::{analyse, build, Analysis, Series, Summary};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 2,
            CliError::Config(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qreduce", version, about = "Divisibility and information-flow diagnostics for qubit dynamics")]
pub struct Args {
    /// JSON scenario config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub scenario: Option<Scenario>,
    /// Scenario parameter, repeatable (e.g. `C=1.64`, `preset=eternal`).
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    #[arg(long, value_parser = parse_number)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Polar angle of the reference basis; accepts forms like `pi/2`.
    #[arg(long, value_parser = parse_number)]
    pub chi: Option<f64>,
    /// Azimuth of the reference basis.
    #[arg(long, value_parser = parse_number)]
    pub xi: Option<f64>,
    /// Prior of the state pair.
    #[arg(long, value_parser = parse_number)]
    pub mu: Option<f64>,
    /// Divisibility tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// `key:start:stop:count`, one run per value.
    #[arg(long, value_name = "KEY:START:STOP:COUNT")]
    pub sweep: Option<String>,
    /// Skip the basis scan.
    #[arg(long)]
    pub no_witness: bool,
}

/// Merges the config file and the flags.
pub fn resolve_config(args: &Args) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let mut cfg = ScenarioConfig::from_json(&text)?;
            if let Some(s) = args.scenario {
                cfg.scenario = s;
            }
            cfg
        }
        None => ScenarioConfig::new(args.scenario.ok_or_else(|| CliError::Config("either --scenario or --config is required".into()))?),
    };
    for raw in &args.params {
        let (key, value) = raw.split_once('=').ok_or_else(|| CliError::Config(format!("--param expects KEY=VALUE, got `{raw}`")))?;
        cfg.params.insert(key.trim().to_string(), ParamValue::parse(value));
    }
    if let Some(t) = args.t_max {
        cfg.grid.t_max = t;
    }
    if let Some(n) = args.steps {
        cfg.grid.steps = n;
    }
    if let Some(x) = args.chi {
        cfg.basis.chi = x;
    }
    if let Some(x) = args.xi {
        cfg.basis.xi = x;
    }
    if let Some(x) = args.mu {
        cfg.states.mu = x;
    }
    if let Some(x) = args.tol {
        cfg.tolerances.divisibility = x;
    }
    if let Some(dir) = &args.out_dir {
        cfg.output.dir = dir.clone();
    }
    if args.no_witness {
        cfg.witness = false;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Builds and analyses one scenario.
pub fn evaluate(cfg: &ScenarioConfig) -> Result<Analysis, CliError> {
    let dynamics = build(cfg)?;
    analyse(cfg, &dynamics)
}

/// Shortest round-trip form; exponent notation for very small or large values.
fn number(v: f64) -> String {
    if v == 0.0 || (1e-4..1e15).contains(&v.abs()) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Empty for missing or non-finite values.
fn field(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => number(v),
        _ => String::new(),
    }
}

pub const TRAJECTORY_COLUMNS: [&str; 12] = ["t", "T00", "f_t", "det_T", "Iq", "Icl", "Ccoh", "Cl1_p", "Cl1_q", "eigmin_K", "p_div_margin", "cp_div_margin"];

pub fn write_trajectory(path: &Path, s: &Series) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(TRAJECTORY_COLUMNS).map_err(csv_error)?;
    for k in 0..s.times.len() {
        let (cp, cq) = s.info.coherences[k];
        let row = [
            Some(s.times[k]),
            Some(s.t00[k]),
            s.f[k],
            Some(s.det[k]),
            Some(s.info.i_quantum[k]),
            Some(s.info.i_classical[k]),
            Some(s.info.coherent[k]),
            Some(cp),
            Some(cq),
            Some(s.eigmin_k[k]),
            Some(s.p_margin[k]),
            Some(s.cp_margin[k]),
        ];
        w.write_record(row.map(field)).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

pub fn write_summary(path: &Path, summary: &Summary) -> Result<(), CliError> {
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, summary).map_err(|e| CliError::Io(e.into()))?;
    writeln!(f)?;
    Ok(())
}

/// Single run: writes the trajectory and the summary.
pub fn run(cfg: &ScenarioConfig) -> Result<Analysis, CliError> {
    let analysis = evaluate(cfg)?;
    fs::create_dir_all(&cfg.output.dir)?;
    write_trajectory(&cfg.output.dir.join(&cfg.output.trajectory), &analysis.series)?;
    write_summary(&cfg.output.dir.join(&cfg.output.summary), &analysis.summary)?;
    if analysis.summary.singular_points == analysis.series.times.len() {
        return Err(CliError::Numerical("the classical process is singular at every grid point".into()));
    }
    Ok(analysis)
}

/// One row of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub quantum_p_div: Option<bool>,
    pub quantum_p_div_margin: Option<f64>,
    pub quantum_cp_div: Option<bool>,
    pub quantum_cp_div_margin: Option<f64>,
    pub classical_p_div: Option<bool>,
    pub max_f_t: Option<f64>,
    /// Largest `|f_t|`, zero when the classical process is frozen.
    pub max_abs_f_t: Option<f64>,
    pub invertible: bool,
    pub quantum_revivals: usize,
    pub classical_revivals: usize,
}

pub const SWEEP_COLUMNS: [&str; 11] = [
    "value",
    "quantum_p_div",
    "quantum_p_div_margin",
    "quantum_cp_div",
    "quantum_cp_div_margin",
    "classical_p_div",
    "max_f_t",
    "max_abs_f_t",
    "invertible",
    "quantum_revivals",
    "classical_revivals",
];

pub fn sweep(cfg: &ScenarioConfig, spec: &SweepSpec) -> Result<Vec<SweepRow>, CliError> {
    let mut base = cfg.clone();
    base.witness = false;
    let configs = spec
        .values()
        .into_iter()
        .map(|v| {
            let mut c = base.clone();
            c.set(&spec.key, v)?;
            c.validate()?;
            Ok((v, c))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let rows = configs
        .into_par_iter()
        .map(|(value, c)| {
            let a = evaluate(&c)?;
            let s = &a.summary;
            Ok(SweepRow {
                value,
                quantum_p_div: s.quantum_p_div.map(|v| v.holds),
                quantum_p_div_margin: s.quantum_p_div.map(|v| v.margin),
                quantum_cp_div: s.quantum_cp_div.map(|v| v.holds),
                quantum_cp_div_margin: s.quantum_cp_div.map(|v| v.margin),
                classical_p_div: s.classical_p_div.map(|v| v.holds),
                max_f_t: s.max_f_t,
                max_abs_f_t: a.series.f.iter().flatten().map(|f| f.abs()).reduce(f64::max),
                invertible: s.invertible,
                quantum_revivals: s.revivals.quantum.len(),
                classical_revivals: s.revivals.classical.len(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    fs::create_dir_all(&cfg.output.dir)?;
    let mut w = csv::Writer::from_path(cfg.output.dir.join(&cfg.output.sweep)).map_err(csv_error)?;
    w.write_record(SWEEP_COLUMNS).map_err(csv_error)?;
    let flag = |b: Option<bool>| b.map_or(String::new(), |b| b.to_string());
    for r in &rows {
        w.write_record([
            number(r.value),
            flag(r.quantum_p_div),
            field(r.quantum_p_div_margin),
            flag(r.quantum_cp_div),
            field(r.quantum_cp_div_margin),
            flag(r.classical_p_div),
            field(r.max_f_t),
            field(r.max_abs_f_t),
            r.invertible.to_string(),
            r.quantum_revivals.to_string(),
            r.classical_revivals.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(rows)
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = resolve_config(&args).and_then(|cfg| match &args.sweep {
        Some(raw) => {
            let spec = SweepSpec::parse(raw)?;
            let rows = sweep(&cfg, &spec)?;
            println!("{} sweep values of `{}` written to {}", rows.len(), spec.key, cfg.output.dir.join(&cfg.output.sweep).display());
            Ok(())
        }
        None => {
            let a = run(&cfg)?;
            print_verdicts(&a.summary);
            Ok(())
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn print_verdicts(s: &Summary) {
    let show = |v: Option<bool>| v.map_or("n/a", |b| if b { "yes" } else { "no" });
    println!("quantum P-divisible:   {}", show(s.quantum_p_div.map(|v| v.holds)));
    println!("quantum CP-divisible:  {}", show(s.quantum_cp_div.map(|v| v.holds)));
    println!("classical P-divisible: {} ({})", show(s.classical_p_div.map(|v| v.holds)), s.classical_method);
    match s.max_f_t {
        Some(f) => println!("max f_t:               {f:.6}"),
        None => println!("max f_t:               n/a"),
    }
    println!("invertible:            {} ({} singular points)", show(Some(s.invertible)), s.singular_points);
}
