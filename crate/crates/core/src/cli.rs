//! Command-line front end: `ballistic run` and `ballistic validate`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{comment_block, Command, ConfigError, ExperimentConfig};
use crate::lattice::Dims;
use crate::oracle;
use crate::percolation::fit::FitResult;
use crate::percolation::sweeps::{self, PointResult};
use crate::percolation::threshold::{estimate_from_points, threshold_points};
use crate::percolation::PercolationError;
use crate::resources::{self, ResourceError, SizePoint, SourceSpec};

#[derive(Parser, Debug)]
#[command(name = "ballistic", version, about = "Percolation experiments on ballistically fused cluster states")]
pub struct Cli {
    #[command(subcommand)]
    pub action: Action,
}

#[derive(Subcommand, Debug)]
pub enum Action {
    /// Run the experiment named by the config's `command`.
    Run(RunArgs),
    /// Check a config (or the config embedded in a result file) and print it
    /// with all defaults filled in.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Worker threads; defaults to all cores.
    #[arg(long, env = "BALLISTIC_WORKERS")]
    pub workers: Option<usize>,
    /// Output directory, overriding the config's `out`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Format of the per-point data file. Fit summaries are always JSON.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Runtime(String),
    #[error("fit failed: {0}")]
    Fit(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Fit(_) => 3,
        }
    }
}

impl From<PercolationError> for CliError {
    fn from(e: PercolationError) -> Self {
        match e {
            PercolationError::Fit(m) => CliError::Fit(m),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<ResourceError> for CliError {
    fn from(e: ResourceError) -> Self {
        match e {
            ResourceError::Percolation(p) => p.into(),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let res = match cli.action {
        Action::Validate { config } => validate(&config).map(|text| print!("{text}")),
        Action::Run(args) => run(&args).map(|files| {
            for f in files {
                println!("{}", f.display());
            }
        }),
    };
    match res {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Resolved config as TOML, or the validation error.
pub fn validate(path: &Path) -> Result<String, CliError> {
    let cfg = ExperimentConfig::load(path)?;
    cfg.validate()?;
    let cfg = cfg.resolve();
    cfg.validate()?;
    Ok(cfg.to_toml())
}

/// Runs the configured experiment and returns the artifact paths.
pub fn run(args: &RunArgs) -> Result<Vec<PathBuf>, CliError> {
    let cfg = ExperimentConfig::load(&args.config)?;
    cfg.validate()?;
    let cfg = cfg.resolve();
    cfg.validate()?;
    let out = args.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("results"));
    fs::create_dir_all(&out).map_err(|e| io_err(&out, e))?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.workers {
        pool = pool.num_threads(n.max(1));
    }
    let pool = pool.build().map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut w = Writer { cfg: &cfg, dir: out, format: args.format, written: Vec::new() };
    pool.install(|| execute(&cfg, &mut w))?;
    Ok(w.written)
}

struct Writer<'a> {
    cfg: &'a ExperimentConfig,
    dir: PathBuf,
    format: Format,
    written: Vec<PathBuf>,
}

impl Writer<'_> {
    fn write(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(|e| io_err(&path, e))?;
        log::info!("wrote {}", path.display());
        self.written.push(path);
        Ok(())
    }

    fn points(&mut self, stem: &str, rows: &[PointResult]) -> Result<(), CliError> {
        match self.format {
            Format::Csv => {
                let body = points_csv(&self.cfg.to_toml(), rows);
                self.write(&format!("{stem}.csv"), &body)
            }
            Format::Json => {
                let rows: Vec<Value> = rows.iter().map(point_json).collect();
                self.json(&format!("{stem}_points"), json!({ "rows": rows }))
            }
        }
    }

    /// Writes `{stem}.json` with the command, seed and config merged in.
    fn json(&mut self, stem: &str, body: Value) -> Result<(), CliError> {
        let mut doc = json!({
            "command": self.cfg.command.name(),
            "seed": self.cfg.seed,
            "config": self.cfg.to_toml(),
        });
        if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
            d.extend(b);
        }
        let text = serde_json::to_string_pretty(&doc).expect("json");
        self.write(&format!("{stem}.json"), &(text + "\n"))
    }
}

pub fn points_csv(config_toml: &str, rows: &[PointResult]) -> String {
    let mut out = comment_block(config_toml);
    out.push_str(PointResult::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

fn point_json(r: &PointResult) -> Value {
    json!({
        "p": r.p, "p_loss": r.p_loss,
        "lx": r.dims.lx, "ly": r.dims.ly, "lz": r.dims.lz,
        "mode": r.mode, "n_runs": r.stats.n_runs, "n_spanning": r.stats.n_spanning,
        "pi": r.stats.pi_hat, "ci_lo": r.stats.ci95.0, "ci_hi": r.stats.ci95.1, "seed": r.seed,
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn fit_json(f: &FitResult) -> Value {
    json!({ "amplitude": f.amplitude, "decay_length": f.decay_length, "residual_ss": f.residual })
}

fn execute(cfg: &ExperimentConfig, w: &mut Writer) -> Result<(), CliError> {
    let seed = cfg.seed();
    let n = cfg.n_runs;
    let g = &cfg.grids;
    let need = |v: &Option<Vec<f64>>| v.clone().expect("resolved");
    match cfg.command {
        Command::Threshold | Command::Calibrate => {
            let sizes = g.sizes.clone().expect("resolved");
            let grid = need(&g.p);
            let model = cfg.model(Dims::cube(sizes[0]));
            let points = threshold_points(&model, &sizes, &grid, n, seed)?;
            w.points(cfg.command.name(), &points)?;
            let est = estimate_from_points(&grid, &sizes, points)?;
            w.json(
                &format!("{}_fit", cfg.command.name()),
                json!({
                    "p_c": est.p_c,
                    "spread": est.spread,
                    "pairwise_crossings": est.pairwise_crossings,
                    "interpolated_p_c": est.interpolated_p_c,
                    "interpolated_crossings": est.interpolated_crossings,
                    "fits": est.fits.iter().map(|(l, f)| json!({
                        "L": l, "b0": f.b0, "b1": f.b1, "midpoint": f.midpoint(),
                        "iterations": f.iterations, "deviance": f.deviance,
                    })).collect::<Vec<_>>(),
                }),
            )?;
        }
        Command::Pi => {
            let model = cfg.model(Dims::cube(25));
            let rows = sweeps::pi_sweep(&model, &need(&g.p), n, seed)?;
            w.points("pi", &rows)?;
        }
        Command::Channel => {
            let model = cfg.model(Dims::cube(1));
            let lengths = g.lengths.clone().expect("resolved");
            let mut all = Vec::new();
            let mut per_l = Vec::new();
            for &l in g.cross_sections.as_ref().expect("resolved") {
                let pts = sweeps::channel_points(&model, l, &lengths, n, seed)?;
                all.extend(pts.iter().copied());
                per_l.push((l, pts));
            }
            w.points("channel", &all)?;
            let mut fits = Vec::new();
            for (l, pts) in per_l {
                let r = sweeps::channel_fit(l, pts)?;
                fits.push(r);
            }
            let lambda = |l: usize| fits.iter().find(|r| r.cross_section == l).map(|r| r.fit.decay_length);
            let increasing = fits.windows(2).all(|p| p[1].fit.decay_length > p[0].fit.decay_length);
            w.json(
                "channel_fit",
                json!({
                    "fits": fits.iter().map(|r| json!({
                        "L": r.cross_section,
                        "fit": fit_json(&r.fit),
                        "length_at_90": r.length_at_90,
                        "qubits_at_90": r.qubits_at_90,
                    })).collect::<Vec<_>>(),
                    "decay_length_increasing": increasing,
                    "ratio_6_over_4": lambda(6).zip(lambda(4)).map(|(a, b)| a / b),
                    "quadratic_ratio_6_over_4": 2.25,
                }),
            )?;
        }
        Command::Loss | Command::Heralded => {
            let model = cfg.model(Dims::cube(25));
            let r = sweeps::loss_sweep(&model, &need(&g.p_loss), cfg.loss.mode, n, seed)?;
            w.points(cfg.command.name(), &r.points)?;
            w.json(
                &format!("{}_fit", cfg.command.name()),
                json!({ "tolerance": r.tolerance, "censored": r.censored, "level": 0.9 }),
            )?;
        }
        Command::Renorm => {
            let model = cfg.model(Dims::cube(1));
            let k = g.block.expect("resolved");
            let r = sweeps::renormalized_channel(&model, k, g.blocks.as_ref().expect("resolved"), n, seed)?;
            w.points("renorm", &r.points)?;
            w.json(
                "renorm_fit",
                json!({
                    "block": k,
                    "fit": r.fit.as_ref().map(fit_json),
                    "blocks_at_90": r.blocks_at_90,
                    "sites_at_90": r.sites_at_90,
                    "qubits_at_90": r.qubits_at_90,
                }),
            )?;
            if r.fit.is_none() {
                return Err(CliError::Fit("fewer than 3 block counts with Π < 0.99".into()));
            }
        }
        Command::Resources => {
            let mode = cfg.resources.count_mode;
            let s3 = SourceSpec::ghz3();
            let s4 = SourceSpec::ghz4();
            w.json(
                "resources",
                json!({
                    "shape": to_value(&cfg.resources.shape),
                    "lattice": to_value(&resources::lattice_resources(cfg.resources.shape)),
                    "repeats_ghz3": to_value(&resources::multiplex_repeats(&s3)?),
                    "repeats_ghz4": to_value(&resources::multiplex_repeats(&s4)?),
                    "count_mode": mode,
                    "bell_pairs_per_ghz3": resources::bell_pairs_per_ghz(&s3, mode)?,
                    "bell_pairs_per_ghz4": resources::bell_pairs_per_ghz(&s4, mode)?,
                    "ghz_success_prob": (2..=8).map(|n| Ok(json!({ "n": n, "p": resources::ghz_success_prob(n)? })))
                        .collect::<Result<Vec<_>, ResourceError>>()?,
                    "ghz3_attempt_prob": resources::GHZ3_ATTEMPT_PROB,
                }),
            )?;
        }
        Command::Compare => {
            let theirs_path = cfg.resources.competitor.as_ref().expect("validated");
            let read = |p: &Path| fs::read_to_string(p).map_err(|e| io_err(p, e));
            let theirs = resources::parse_size_points(&read(theirs_path)?)?;
            let ours = match &cfg.resources.ours {
                Some(p) => resources::parse_size_points(&read(p)?)?,
                None => {
                    let model = cfg.model(Dims::cube(1));
                    let cap = g.max_blocks.expect("resolved");
                    let mut pts = Vec::new();
                    for &k in g.k_values.as_ref().expect("resolved") {
                        log::info!("compare: searching block count for k={k}");
                        let l = resources::max_l_at_half(&model, k, cap, n, seed)?;
                        pts.push(SizePoint { l: l as u64, k: k as u64 });
                    }
                    pts
                }
            };
            let mut ours_csv = comment_block(&cfg.to_toml());
            ours_csv.push_str(&resources::size_points_csv(&ours));
            w.write("ours_l_k.csv", &ours_csv)?;
            let rows = resources::scheme_comparison(&ours, &theirs, cfg.resources.count_mode)?;
            let mut body = comment_block(&cfg.to_toml());
            body.push_str(&resources::comparison_csv(&rows));
            w.write("compare.csv", &body)?;
        }
        Command::OracleCheck => {
            let reports = oracle::check_all(&cfg.gate, cfg.oracle.random_cases, seed);
            let passed = reports.iter().all(|r| r.passed());
            for r in &reports {
                log::info!("oracle {}: {} cases, {} failures", r.group, r.cases, r.failures.len());
            }
            w.json("oracle_check", json!({ "passed": passed, "groups": to_value(&reports) }))?;
            if !passed {
                return Err(CliError::Runtime("rule model disagrees with the tableau oracle".into()));
            }
        }
    }
    Ok(())
}
