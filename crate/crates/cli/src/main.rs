mod config;
mod plot;
mod report;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use powersim::engine::{self, CiKind, CiParams, InvalidPolicy, RunSettings, DEFAULT_CI_REPS, DEFAULT_N_MAX};
use powersim::{oracle, scenarios};

use config::{parse_param, CliError, CliResult, RunConfig};
use report::{Format, ListReport, OracleReport, PowerRow, PowerRows, Report, SolveReport, WidthReport};

#[derive(Parser)]
#[command(name = "powersim", version, about = "Monte Carlo power and sample-size calculations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate power at one sample size.
    Power(PointArgs),
    /// Find the smallest n reaching a target power.
    Solve(SolveArgs),
    /// Estimate power over a list of sample sizes.
    Curve(CurveArgs),
    /// Estimate the type-I error rate of a scenario's null variant.
    Calibrate(PointArgs),
    /// Distribution of confidence-interval widths.
    CiWidth(CiArgs),
    /// Closed-form power, where one exists.
    Oracle(OracleArgs),
    /// Show the scenario catalog.
    List(Output),
}

#[derive(Args)]
struct Output {
    /// TOML file supplying defaults for any flag; flags win.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, value_parser = ["json", "csv", "table"])]
    format: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Sim {
    #[arg(long)]
    scenario: Option<String>,
    /// Parameter override; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    reps: Option<usize>,
    /// Drawn from OS entropy when absent; always reported.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_parser = ["count-as-non-rejection", "exclude", "permissive"])]
    invalid_policy: Option<String>,
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    sim: Sim,
    /// Sample size (default: the scenario's reference n).
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    sim: Sim,
    #[arg(long)]
    target: Option<f64>,
    #[arg(long)]
    n_max: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    sim: Sim,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    n_list: Option<Vec<usize>>,
    /// Also write an SVG plot of the curve.
    #[arg(long, value_name = "FILE")]
    plot: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CiArgs {
    #[arg(long, value_parser = ["binom-exact", "binom-approx", "mean-known-var", "mean-t", "variance"])]
    kind: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    level: Option<f64>,
    /// Success probability for the binomial kinds.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    mean: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[command(flatten)]
    output: Output,
}

impl Sim {
    fn into_config(self) -> RunConfig {
        RunConfig {
            scenario: self.scenario,
            params: self.params.into_iter().collect(),
            alpha: self.alpha,
            reps: self.reps,
            seed: self.seed,
            workers: self.workers,
            invalid_policy: self.invalid_policy,
            ..Default::default()
        }
    }
}

impl Output {
    /// File settings overlaid by `flags` and by this struct's own flags.
    fn merge(self, flags: RunConfig) -> CliResult<RunConfig> {
        let file = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let own = RunConfig { format: self.format, out: self.out, ..Default::default() };
        Ok(file.overlay(flags).overlay(own))
    }
}

fn elapsed_ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

fn scenario(cfg: &RunConfig) -> CliResult<scenarios::Scenario> {
    let id = cfg.scenario.as_deref().ok_or_else(|| CliError::config("scenario: required (see `powersim list`)"))?;
    Ok(scenarios::find(id)?.with_params(cfg.params.iter().map(|(k, v)| (k.as_str(), *v)))?)
}

fn alpha(cfg: &RunConfig) -> CliResult<f64> {
    let a = cfg.alpha.unwrap_or(0.05);
    if a > 0.0 && a < 1.0 {
        Ok(a)
    } else {
        Err(CliError::config(format!("alpha: must lie in (0, 1), got {a}")))
    }
}

fn positive(name: &str, v: Option<usize>) -> CliResult<Option<usize>> {
    match v {
        Some(0) => Err(CliError::config(format!("{name}: must be at least 1"))),
        v => Ok(v),
    }
}

fn settings(cfg: &RunConfig, s: &scenarios::Scenario) -> CliResult<RunSettings> {
    let reps = positive("reps", cfg.reps)?.unwrap_or_else(|| s.default_reps());
    let seed = cfg.seed.unwrap_or_else(rand::random);
    let policy = match cfg.invalid_policy.as_deref() {
        None | Some("count-as-non-rejection") => InvalidPolicy::CountAsNonRejection,
        Some("exclude") => InvalidPolicy::Exclude,
        Some("permissive") => InvalidPolicy::Permissive,
        Some(other) => return Err(CliError::config(format!("invalid_policy: unknown '{other}'"))),
    };
    let mut st = RunSettings::new(alpha(cfg)?, reps, seed).policy(policy);
    if let Some(w) = positive("workers", cfg.workers)? {
        st = st.workers(w);
    }
    Ok(st)
}

/// Fields that only make sense for simulation commands.
const SIM_ONLY: [&str; 3] = ["invalid_policy", "n_max", "plot"];
const CI_ONLY: [&str; 5] = ["kind", "level", "p", "mean", "sigma"];

fn point(cfg: RunConfig, label: &'static str) -> CliResult<(Box<dyn Report>, Option<String>)> {
    cfg.reject(label, &["n_list", "target", "n_max", "plot"])?;
    cfg.reject(label, &CI_ONLY)?;
    let s = scenario(&cfg)?;
    let st = settings(&cfg, &s)?;
    let n = cfg.n.unwrap_or_else(|| s.default_n());
    let t = Instant::now();
    let (est, params) = if label == "calibrate" {
        (engine::estimate_size(&s, n, &st)?, s.null_variant().params().clone())
    } else {
        (engine::estimate_power(&s, n, &st)?, s.params().clone())
    };
    let label = if label == "calibrate" { "size" } else { "power" };
    Ok((Box::new(PowerRow::new(label, &est, &params, st.seed, elapsed_ms(t))), None))
}

fn solve(cfg: RunConfig) -> CliResult<(Box<dyn Report>, Option<String>)> {
    cfg.reject("solve", &["n", "n_list", "plot"])?;
    cfg.reject("solve", &CI_ONLY)?;
    let s = scenario(&cfg)?;
    let st = settings(&cfg, &s)?;
    let target = cfg.target.ok_or_else(|| CliError::config("target: required"))?;
    if !(target > 0.0 && target < 1.0) {
        return Err(CliError::config(format!("target: must lie in (0, 1), got {target}")));
    }
    let n_max = positive("n_max", cfg.n_max)?.unwrap_or(DEFAULT_N_MAX);
    let t = Instant::now();
    let r = engine::solve_sample_size(&s, target, &st, n_max)?;
    let ms = elapsed_ms(t);
    let row = |label, e| PowerRow::new(label, e, s.params(), st.seed, 0);
    Ok((
        Box::new(SolveReport {
            scenario: s.id().to_string(),
            params: s.params().clone(),
            target,
            alpha: st.alpha,
            reps: st.reps,
            seed: st.seed,
            n_star: r.n_star,
            confirmation: row("confirmation", &r.confirmation),
            trace: r.trace.iter().map(|e| row("trace", e)).collect(),
            elapsed_ms: ms,
        }),
        None,
    ))
}

fn curve(cfg: RunConfig) -> CliResult<(Box<dyn Report>, Option<String>)> {
    cfg.reject("curve", &["n", "target", "n_max"])?;
    cfg.reject("curve", &CI_ONLY)?;
    let s = scenario(&cfg)?;
    let st = settings(&cfg, &s)?;
    let ns = cfg.n_list.clone().ok_or_else(|| CliError::config("n_list: required"))?;
    if ns.is_empty() {
        return Err(CliError::config("n_list: must not be empty"));
    }
    let t = Instant::now();
    let est = engine::power_curve(&s, &ns, &st)?;
    let ms = elapsed_ms(t);
    let rows: Vec<PowerRow> = est.iter().map(|e| PowerRow::new("curve", e, s.params(), st.seed, ms)).collect();
    let svg = cfg.plot.as_ref().map(|_| plot::power_curve_svg(&rows, Some(0.8)));
    Ok((Box::new(PowerRows(rows)), svg))
}

fn ci_width(cfg: RunConfig) -> CliResult<(Box<dyn Report>, Option<String>)> {
    cfg.reject("ci-width", &["scenario", "params", "n_list", "target", "alpha"])?;
    cfg.reject("ci-width", &SIM_ONLY)?;
    let kind = CiKind::parse(cfg.kind.as_deref().ok_or_else(|| CliError::config("kind: required"))?)
        .map_err(|e| CliError::config(format!("kind: {e}")))?;
    let n = positive("n", cfg.n)?.ok_or_else(|| CliError::config("n: required"))?;
    let level = cfg.level.unwrap_or(0.95);
    let d = CiParams::default();
    let params = CiParams { p: cfg.p.unwrap_or(d.p), mean: cfg.mean.unwrap_or(d.mean), sigma: cfg.sigma.unwrap_or(d.sigma) };
    let reps = positive("reps", cfg.reps)?.unwrap_or(DEFAULT_CI_REPS);
    let seed = cfg.seed.unwrap_or_else(rand::random);
    let workers = positive("workers", cfg.workers)?;
    let t = Instant::now();
    let w = engine::ci_width(kind, &params, n, level, reps, seed, workers)?;
    Ok((Box::new(WidthReport::new(&w, seed, params.p, params.mean, params.sigma, elapsed_ms(t))), None))
}

fn oracle_cmd(cfg: RunConfig) -> CliResult<(Box<dyn Report>, Option<String>)> {
    cfg.reject("oracle", &["n_list", "target", "reps", "seed", "workers"])?;
    cfg.reject("oracle", &SIM_ONLY)?;
    cfg.reject("oracle", &CI_ONLY)?;
    let s = scenario(&cfg)?;
    let a = alpha(&cfg)?;
    let n = cfg.n.unwrap_or_else(|| s.default_n());
    let p = oracle::for_scenario(&s, n, a)?.ok_or_else(|| {
        CliError::config(format!("scenario: '{}' has no closed-form power (available: {})", s.id(), oracle::SCENARIOS.join(", ")))
    })?;
    Ok((
        Box::new(OracleReport { scenario: s.id().to_string(), params: s.params().clone(), n, alpha: a, power: p.power, method: p.method }),
        None,
    ))
}

fn write_file(field: &str, path: &PathBuf, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::config(format!("{field}: cannot write {}: {e}", path.display())))
}

fn run(cli: Cli) -> CliResult<()> {
    let (cfg, default_format) = match cli.command {
        Command::Power(a) => (a.output.merge(RunConfig { n: a.n, ..a.sim.into_config() })?, "power"),
        Command::Calibrate(a) => (a.output.merge(RunConfig { n: a.n, ..a.sim.into_config() })?, "calibrate"),
        Command::Solve(a) => (a.output.merge(RunConfig { target: a.target, n_max: a.n_max, ..a.sim.into_config() })?, "solve"),
        Command::Curve(a) => (a.output.merge(RunConfig { n_list: a.n_list, plot: a.plot, ..a.sim.into_config() })?, "curve"),
        Command::CiWidth(a) => {
            let flags = RunConfig {
                kind: a.kind,
                n: a.n,
                level: a.level,
                p: a.p,
                mean: a.mean,
                sigma: a.sigma,
                reps: a.reps,
                seed: a.seed,
                workers: a.workers,
                ..Default::default()
            };
            (a.output.merge(flags)?, "ci-width")
        }
        Command::Oracle(a) => {
            let flags =
                RunConfig { scenario: a.scenario, params: a.params.into_iter().collect(), n: a.n, alpha: a.alpha, ..Default::default() };
            (a.output.merge(flags)?, "oracle")
        }
        Command::List(o) => (o.merge(RunConfig::default())?, "list"),
    };
    let format = Format::parse(cfg.format.as_deref().unwrap_or(if default_format == "list" { "table" } else { "json" }))?;
    let out = cfg.out.clone();
    let plot_path = cfg.plot.clone();
    let (report, svg) = match default_format {
        "power" | "calibrate" => point(cfg, default_format)?,
        "solve" => solve(cfg)?,
        "curve" => curve(cfg)?,
        "ci-width" => ci_width(cfg)?,
        "oracle" => oracle_cmd(cfg)?,
        _ => {
            cfg.reject("list", &["scenario", "params", "n", "n_list", "target", "alpha"])?;
            let list = ListReport(scenarios::catalog().iter().map(|s| s.summary()).collect());
            (Box::new(list) as Box<dyn Report>, None)
        }
    };
    let text = report::render(report.as_ref(), format);
    if let (Some(svg), Some(path)) = (svg, plot_path) {
        write_file("plot", &path, &svg)?;
    }
    match out {
        Some(path) => write_file("out", &path, &text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Run(format!("cannot write output: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!("{}", msg.lines().next().unwrap_or("invalid arguments"));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
