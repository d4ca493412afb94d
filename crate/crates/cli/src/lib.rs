//! Command-line driver for the coverage planning engine.

pub mod config;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};
use hexcover_core::baselines::{hex_site_set, load_site_set, ppp_outage, BaselineOptions, BaselineResult, Window};
use hexcover_core::format::sig9;
use hexcover_core::interference::{cache_file_name, fit_bounds_with, load_or_fit, DEFAULT_TIERS};
use hexcover_core::lattice::{hexagon_area, interferer_positions};
use hexcover_core::simulator::{par_realizations, summarize, Scenario};
use hexcover_core::{full_report_with, Error, OutageReport, Reuse, ScMode, SweepRow};

pub use config::{keys_help, RunConfig, KEYS};

#[derive(Parser, Debug)]
#[command(name = "hexcover", version, about = "Coverage planning for two-layer hexagonal networks")]
pub struct Cli {
    /// Config file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the config `seed` key.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file (fit, analyze, baseline, sweep) or directory (simulate, place).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Config override, `key=value`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fit the interference polynomials and write the cache record.
    Fit {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Analytic outage report.
    Analyze {
        /// Sweep C0 over 0.5..3 in steps of 0.25.
        #[arg(long)]
        c0_sweep: bool,
    },
    /// Monte Carlo outage, placement and residual outage.
    Simulate {
        /// Overrides the config `sc_mode`.
        #[arg(long)]
        mode: Option<String>,
        /// Number of realizations whose full maps are written.
        #[arg(long, default_value_t = 1)]
        maps: usize,
    },
    /// Small-cell placement for one realization.
    Place {
        #[arg(long, default_value_t = 0)]
        realization: usize,
    },
    /// PPP or site-file baseline.
    Baseline {
        #[command(subcommand)]
        kind: BaselineKind,
    },
    /// Table over the cartesian product of `--vary` values.
    Sweep {
        /// `key=v1,v2,...`; repeatable.
        #[arg(long, value_name = "KEY=V1,V2")]
        vary: Vec<String>,
        /// Analytic report rows instead of simulation rows.
        #[arg(long)]
        analytic: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum BaselineKind {
    /// Poisson layout, lattice-matched density unless configured.
    Ppp {
        /// Also report the hexagonal lattice of the same density.
        #[arg(long)]
        compare_lattice: bool,
    },
    /// Sites from an `id,latitude_deg,longitude_deg` file.
    Sites {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        lat: Option<f64>,
        #[arg(long)]
        lon: Option<f64>,
    },
}

/// Failure with its exit status: 2 for usage errors, 1 otherwise.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 2, msg: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) | Error::Parse { .. } => 2,
            _ => 1,
        };
        Failure { code, msg: e.to_string() }
    }
}

type CmdResult = std::result::Result<(), Failure>;

pub fn command() -> clap::Command {
    Cli::command().after_help(keys_help())
}

/// Parses `args` and runs the command, returning the exit status.
pub fn run<I, T>(args: I, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match command().try_get_matches_from(args).and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.msg);
            f.code
        }
    }
}

pub fn execute(cli: &Cli, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> CmdResult {
    let mut cfg = match &cli.config {
        Some(p) => {
            if !p.exists() {
                return Err(Failure::usage(format!("config file {} does not exist", p.display())));
            }
            RunConfig::load(p)?
        }
        None => RunConfig::default(),
    };
    for o in &cli.overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("--set expects key=value, got '{o}'")))?;
        cfg.set(k.trim(), v)?;
    }
    cfg.validate()?;
    if let Some(s) = cli.seed {
        cfg.seed = Some(s);
    }
    let threads = cli.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure { code: 1, msg: e.to_string() })?;
    pool.install(|| dispatch(cli, &cfg, stdout, stderr))
}

fn require_seed(cfg: &RunConfig) -> std::result::Result<u64, Failure> {
    cfg.seed
        .ok_or_else(|| Failure::usage("this command needs a seed: pass --seed or set `seed` in the config"))
}

fn write_file(path: &Path, text: &str) -> CmdResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure { code: 1, msg: format!("{}: {e}", dir.display()) })?;
    }
    fs::write(path, text).map_err(|e| Failure { code: 1, msg: format!("{}: {e}", path.display()) })
}

fn emit(out: Option<&PathBuf>, text: &str, stdout: &mut (dyn Write + Send)) -> CmdResult {
    if let Some(p) = out {
        write_file(p, text)?;
    }
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| Failure { code: 1, msg: e.to_string() })
}

fn out_dir(cli: &Cli) -> std::result::Result<PathBuf, Failure> {
    let dir = cli
        .out
        .clone()
        .ok_or_else(|| Failure::usage("this command writes files: pass --out <dir>"))?;
    fs::create_dir_all(&dir).map_err(|e| Failure { code: 1, msg: format!("{}: {e}", dir.display()) })?;
    Ok(dir)
}

fn dispatch(cli: &Cli, cfg: &RunConfig, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> CmdResult {
    match &cli.command {
        Command::Fit { alpha, order } => cmd_fit(cli, cfg, *alpha, *order, stdout),
        Command::Analyze { c0_sweep } => cmd_analyze(cli, cfg, *c0_sweep, stdout),
        Command::Simulate { mode, maps } => cmd_simulate(cli, cfg, mode.as_deref(), *maps, stdout, stderr),
        Command::Place { realization } => cmd_place(cli, cfg, *realization, stdout),
        Command::Baseline { kind } => cmd_baseline(cli, cfg, kind, stdout),
        Command::Sweep { vary, analytic } => cmd_sweep(cli, cfg, vary, *analytic, stdout, stderr),
    }
}

fn cmd_fit(cli: &Cli, cfg: &RunConfig, alpha: Option<f64>, order: Option<usize>, stdout: &mut (dyn Write + Send)) -> CmdResult {
    let alpha = alpha.unwrap_or(cfg.params.propagation.alpha);
    let order = order.unwrap_or(cfg.poly_order);
    let layout = interferer_positions(1.0, DEFAULT_TIERS)?;
    let b = fit_bounds_with(&layout, alpha, order, cfg.fit_samples)?;
    let path = cli
        .out
        .clone()
        .unwrap_or_else(|| cfg.bounds_dir.join(cache_file_name(alpha, order, DEFAULT_TIERS)));
    write_file(&path, &b.to_record())?;
    let coeffs = |c: &[f64]| c.iter().map(|&x| sig9(x)).collect::<Vec<_>>().join(",");
    let text = format!(
        "line,coefficients\nupper,{}\nlower,{}\nfit_max_rel_error,{}\n",
        coeffs(&b.upper_coeffs),
        coeffs(&b.lower_coeffs),
        sig9(b.fit_max_rel_error)
    );
    emit(None, &text, stdout)
}

fn analytic_row(cfg: &RunConfig) -> std::result::Result<OutageReport, Failure> {
    let p = &cfg.params;
    let bounds = match p.reuse {
        Reuse::One => Some(load_or_fit(&cfg.bounds_dir, p.alpha(), cfg.poly_order, DEFAULT_TIERS, cfg.fit_samples)?),
        Reuse::Seven => None,
    };
    Ok(full_report_with(p, bounds.as_ref())?)
}

/// C0 values of the analyze sweep.
pub fn c0_sweep_values() -> Vec<f64> {
    (0..=10).map(|k| 0.5 + 0.25 * k as f64).collect()
}

fn cmd_analyze(cli: &Cli, cfg: &RunConfig, c0_sweep: bool, stdout: &mut (dyn Write + Send)) -> CmdResult {
    let mut text = OutageReport::csv_header() + "\n";
    let c0s = if c0_sweep { c0_sweep_values() } else { vec![cfg.params.c0] };
    for c0 in c0s {
        let mut c = cfg.clone();
        c.params.c0 = c0;
        text += &analytic_row(&c)?.csv_row();
        text.push('\n');
    }
    emit(cli.out.as_ref(), &text, stdout)
}

fn cmd_simulate(
    cli: &Cli,
    cfg: &RunConfig,
    mode: Option<&str>,
    maps: usize,
    stdout: &mut (dyn Write + Send),
    stderr: &mut (dyn Write + Send),
) -> CmdResult {
    let seed = require_seed(cfg)?;
    let mut sim = cfg.sim_config(seed);
    if let Some(m) = mode {
        sim.sc_mode = ScMode::parse(m)?;
    }
    let dir = out_dir(cli)?;
    let s = Scenario::new(&sim)?;
    let _ = writeln!(
        stderr,
        "simulating {} realizations, {} points, mode {}",
        sim.realizations,
        s.points.len(),
        sim.sc_mode.name()
    );
    let results = par_realizations(sim.realizations, |r| s.run_mode(r, sim.sc_mode));
    let k = ScMode::WITH_SCS.iter().position(|&m| m == sim.sc_mode);
    let mut agg = String::from("realization,outage,sc_count_weighted,residual\n");
    for r in &results {
        let residual = k.map_or(r.outage, |k| r.residual[k]);
        agg += &format!("{},{},{},{}\n", r.realization, sig9(r.outage), sig9(r.weighted_count), sig9(residual));
    }
    let row = summarize(&sim, &results);
    let summary = format!(
        "mode,realizations,seed,outage_mean,outage_std,residual_mean,sc_count_mean\n{},{},{},{},{},{},{}\n",
        sim.sc_mode.name(),
        sim.realizations,
        seed,
        sig9(row.outage_mean),
        sig9(row.outage_std),
        sig9(k.map_or(row.outage_mean, |k| row.residual_mean[k])),
        sig9(row.sc_count_mean)
    );
    let mut files = Vec::new();
    for r in 0..maps.min(sim.realizations) {
        let field = s.field(r);
        let base = s.outage_map_with(&field, r);
        let map = if sim.sc_mode == ScMode::None {
            base
        } else {
            let plan = s.place_with(&field, &base, r);
            s.residual_with(&field, &base, &plan, sim.sc_mode, r)?.0
        };
        let mut buf = Vec::new();
        map.write_csv(&mut buf).map_err(|e| Failure { code: 1, msg: e.to_string() })?;
        files.push((dir.join(format!("map_r{r}.csv")), buf));
    }
    for (path, buf) in files {
        fs::write(&path, buf).map_err(|e| Failure { code: 1, msg: format!("{}: {e}", path.display()) })?;
    }
    write_file(&dir.join("aggregate.csv"), &agg)?;
    write_file(&dir.join("summary.csv"), &summary)?;
    write_file(&dir.join("config.txt"), &cfg.to_text())?;
    let _ = writeln!(stderr, "wrote {}", dir.display());
    let _ = stdout;
    Ok(())
}

fn cmd_place(cli: &Cli, cfg: &RunConfig, realization: usize, stdout: &mut (dyn Write + Send)) -> CmdResult {
    let seed = require_seed(cfg)?;
    let dir = out_dir(cli)?;
    let s = Scenario::new(&cfg.sim_config(seed))?;
    let field = s.field(realization);
    let base = s.outage_map_with(&field, realization);
    let plan = s.place_with(&field, &base, realization);
    let mut buf = Vec::new();
    plan.write_csv(&s.tiling, &mut buf)
        .map_err(|e| Failure { code: 1, msg: e.to_string() })?;
    fs::write(dir.join(format!("placement_r{realization}.csv")), buf)
        .map_err(|e| Failure { code: 1, msg: e.to_string() })?;
    let text = format!(
        "realization,seed,rule,tiles,sc_count_weighted,outage\n{},{},{},{},{},{}\n",
        realization,
        seed,
        plan.rule.name(),
        plan.tiles.len(),
        sig9(plan.weighted_count),
        sig9(base.outage_fraction())
    );
    emit(None, &text, stdout)
}

fn baseline_options(cfg: &RunConfig, seed: u64) -> BaselineOptions {
    BaselineOptions {
        guard_m: cfg.baseline_guard_m,
        grid_step_m: cfg.baseline_grid_step_m,
        fading: cfg.baseline_fading,
        realizations: cfg.realizations,
        seed,
    }
}

const BASELINE_HEADER: &str = "model,sites,density_per_m2,outage,outage_std,mean_rop,n_sc\n";

fn baseline_row(name: &str, sites: &str, r: &BaselineResult) -> String {
    format!(
        "{},{},{},{},{},{},{}\n",
        name,
        sites,
        sig9(r.density),
        sig9(r.outage),
        sig9(r.outage_std),
        sig9(r.mean_rop),
        r.n_sc
    )
}

fn cmd_baseline(cli: &Cli, cfg: &RunConfig, kind: &BaselineKind, stdout: &mut (dyn Write + Send)) -> CmdResult {
    let seed = require_seed(cfg)?;
    let opts = baseline_options(cfg, seed);
    let window = Window::new(cfg.baseline_window_m.0, cfg.baseline_window_m.1)?;
    let p = &cfg.params;
    let mut text = String::from(BASELINE_HEADER);
    match kind {
        BaselineKind::Ppp { compare_lattice } => {
            let density = cfg.ppp_density_per_m2.unwrap_or(1.0 / hexagon_area(p.r_mc));
            let r = ppp_outage(density, window, p, &opts)?;
            text += &baseline_row("ppp", "random", &r);
            if *compare_lattice {
                let hex = hex_site_set(p.r_mc, window)?;
                let opts = BaselineOptions {
                    guard_m: Some(opts.guard(density)),
                    ..opts
                };
                let r = hexcover_core::siteset_outage(&hex, p, &opts)?;
                text += &baseline_row("hex", &hex.len().to_string(), &r);
            }
        }
        BaselineKind::Sites { file, lat, lon } => {
            let center = (lat.unwrap_or(cfg.site_center.0), lon.unwrap_or(cfg.site_center.1));
            let set = load_site_set(file, center, window).map_err(|e| match e {
                Error::Io { .. } => Failure::usage(e.to_string()),
                e => e.into(),
            })?;
            let r = hexcover_core::siteset_outage(&set, p, &opts)?;
            text += &baseline_row(&set.name, &set.len().to_string(), &r);
        }
    }
    emit(cli.out.as_ref(), &text, stdout)
}

/// Parses `key=v1,v2` arguments into the list of configs they span.
pub fn expand_vary(base: &RunConfig, vary: &[String]) -> std::result::Result<Vec<RunConfig>, Failure> {
    let mut out = vec![base.clone()];
    for v in vary {
        let (key, values) = v
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("--vary expects key=v1,v2, got '{v}'")))?;
        let mut next = Vec::new();
        for c in &out {
            for value in values.split(',').filter(|s| !s.trim().is_empty()) {
                let mut c = c.clone();
                c.set(key.trim(), value)?;
                c.validate()?;
                next.push(c);
            }
        }
        if next.is_empty() {
            return Err(Failure::usage(format!("--vary {key} has no values")));
        }
        out = next;
    }
    Ok(out)
}

fn cmd_sweep(
    cli: &Cli,
    cfg: &RunConfig,
    vary: &[String],
    analytic: bool,
    stdout: &mut (dyn Write + Send),
    stderr: &mut (dyn Write + Send),
) -> CmdResult {
    let configs = expand_vary(cfg, vary)?;
    let mut text;
    if analytic {
        text = OutageReport::csv_header() + "\n";
        for c in &configs {
            text += &analytic_row(c)?.csv_row();
            text.push('\n');
        }
    } else {
        let seed = require_seed(cfg)?;
        text = String::from(SweepRow::HEADER) + "\n";
        for (k, c) in configs.iter().enumerate() {
            let _ = writeln!(stderr, "sweep {}/{}", k + 1, configs.len());
            let row = hexcover_core::sweep(&[c.sim_config(seed)])?;
            text += &row[0].csv_row();
            text.push('\n');
        }
    }
    emit(cli.out.as_ref(), &text, stdout)
}
