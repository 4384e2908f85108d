//! Command-line front end for the POSTA-family optimizers.
//!
//! Settings come from, in increasing priority: the `--config` TOML file,
//! `--set key=value` overrides, then dedicated flags. `STAOPT_OUTPUT`
//! supplies the output directory when nothing else does.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use staopt::harness::{run_experiment, BudgetRule, ExperimentConfig, ExperimentReport, FunctionCell};
use staopt::{make, run, BenchmarkId, RunLimits, Variant, VariantConfig};

#[derive(Debug)]
enum CliError {
    /// Bad flags, config file or values; exit code 2.
    Config(String),
    /// Failure while executing; exit code 1.
    Runtime(String),
}

type CliResult<T> = Result<T, CliError>;

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Parser)]
#[command(name = "staopt", version, about = "POSTA-family optimizers and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One run of one variant on one function; prints the run record as JSON.
    Run(Flags),
    /// Repeated runs over a function x dimension x variant matrix.
    Bench(Flags),
    /// Like `bench`, with a rank-sum significance column against a reference.
    Compare(Flags),
    /// Two-dimensional F3/F7 demonstration with a fixed-start solution path.
    Demo(Flags),
}

#[derive(clap::Args, Debug, Default)]
struct Flags {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set algorithm.se=20`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Benchmark id (F1..F14); repeatable.
    #[arg(long)]
    function: Vec<String>,
    /// Problem dimension; repeatable.
    #[arg(long)]
    dim: Vec<usize>,
    /// POSTA, NM_POSTA, QI_POSTA or NMQI_POSTA; repeatable.
    #[arg(long)]
    variant: Vec<String>,
    /// Run seed, or the base seed of repeated runs.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
    /// Evaluations per run: a number or `formula`.
    #[arg(long)]
    budget: Option<String>,
    /// Success threshold on `|best - target|`.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Stop a run once `|best - target|` falls to this value.
    #[arg(long)]
    terminate_epsilon: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Reference variant of the significance column.
    #[arg(long)]
    reference: Option<String>,
    /// Built-in experiment profile (`quick`).
    #[arg(long)]
    profile: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Schema of the configuration file. Keys mirror the flags; the optional
/// `[algorithm]` table sets operator and hybrid parameters for every variant.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    function: Option<OneOrMany<String>>,
    dim: Option<OneOrMany<usize>>,
    variant: Option<OneOrMany<String>>,
    seed: Option<u64>,
    reps: Option<usize>,
    budget: Option<BudgetRule>,
    epsilon: Option<f64>,
    terminate_epsilon: Option<f64>,
    output: Option<PathBuf>,
    workers: Option<usize>,
    reference: Option<String>,
    profile: Option<String>,
    algorithm: Option<VariantConfig>,
}

/// Fully merged settings.
#[derive(Debug)]
struct Settings {
    functions: Vec<BenchmarkId>,
    dims: Vec<usize>,
    variants: Vec<Variant>,
    seed: Option<u64>,
    reps: Option<usize>,
    budget: Option<BudgetRule>,
    epsilon: Option<f64>,
    terminate_epsilon: Option<f64>,
    output: Option<PathBuf>,
    workers: Option<usize>,
    reference: Option<Variant>,
    profile: Option<String>,
    algorithm: VariantConfig,
}

fn override_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn apply_override(table: &mut toml::Table, spec: &str) -> CliResult<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| config_err(format!("override `{spec}` is not KEY=VALUE")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    let (last, parents) = path.split_last().expect("split yields one element");
    let mut node = table;
    for p in parents {
        node = node
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| config_err(format!("override `{key}`: `{p}` is not a table")))?;
    }
    node.insert(last.to_string(), override_value(raw.trim()));
    Ok(())
}

fn load_file(flags: &Flags) -> CliResult<FileConfig> {
    let mut table = match &flags.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
            // Parse once into the typed schema for located diagnostics.
            toml::from_str::<FileConfig>(&text)
                .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
            toml::from_str::<toml::Table>(&text)
                .map_err(|e| config_err(format!("{}: {e}", path.display())))?
        }
        None => toml::Table::new(),
    };
    for spec in &flags.overrides {
        apply_override(&mut table, spec)?;
    }
    toml::Value::Table(table)
        .try_into()
        .map_err(|e| config_err(format!("override: {e}")))
}

fn parse_budget(raw: &str) -> CliResult<BudgetRule> {
    if raw.eq_ignore_ascii_case("formula") {
        return Ok(BudgetRule::default());
    }
    raw.parse::<u64>()
        .map(BudgetRule::Fixed)
        .map_err(|_| config_err(format!("budget `{raw}` is neither a count nor `formula`")))
}

fn pick<T>(flag: Vec<T>, file: Option<OneOrMany<T>>) -> Vec<T> {
    if flag.is_empty() {
        file.map(OneOrMany::into_vec).unwrap_or_default()
    } else {
        flag
    }
}

fn settings(flags: Flags) -> CliResult<Settings> {
    let file = load_file(&flags)?;
    let functions = pick(flags.function, file.function)
        .iter()
        .map(|s| s.parse::<BenchmarkId>().map_err(config_err))
        .collect::<CliResult<Vec<_>>>()?;
    let variants = pick(flags.variant, file.variant)
        .iter()
        .map(|s| s.parse::<Variant>().map_err(config_err))
        .collect::<CliResult<Vec<_>>>()?;
    let reference = flags
        .reference
        .or(file.reference)
        .map(|s| s.parse::<Variant>().map_err(config_err))
        .transpose()?;
    let budget = match flags.budget {
        Some(raw) => Some(parse_budget(&raw)?),
        None => file.budget,
    };
    let output = flags
        .output
        .or(file.output)
        .or_else(|| std::env::var_os("STAOPT_OUTPUT").map(PathBuf::from));
    let algorithm = file.algorithm.unwrap_or_default();
    algorithm.validate().map_err(config_err)?;
    Ok(Settings {
        functions,
        dims: pick(flags.dim, file.dim),
        variants,
        seed: flags.seed.or(file.seed),
        reps: flags.reps.or(file.reps),
        budget,
        epsilon: flags.epsilon.or(file.epsilon),
        terminate_epsilon: flags.terminate_epsilon.or(file.terminate_epsilon),
        output,
        workers: flags.workers.or(file.workers),
        reference,
        profile: flags.profile.or(file.profile),
        algorithm,
    })
}

fn single<T: Copy + std::fmt::Debug>(what: &str, values: &[T], default: Option<T>) -> CliResult<T> {
    match values {
        [] => default.ok_or_else(|| config_err(format!("--{what} is required"))),
        [v] => Ok(*v),
        _ => Err(config_err(format!("expected one --{what}, got {values:?}"))),
    }
}

fn cmd_run(s: Settings) -> CliResult<()> {
    let id = single("function", &s.functions, None)?;
    let dim = single("dim", &s.dims, Some(2))?;
    let variant = single("variant", &s.variants, Some(Variant::NMQI_POSTA))?;
    let f = make(id, dim).map_err(config_err)?;
    let budget = s.budget.unwrap_or_default().budget(dim).map_err(config_err)?;
    let cfg = VariantConfig {
        variant,
        seed: s.seed.unwrap_or(0),
        ..s.algorithm
    };
    let limits = RunLimits {
        budget,
        termination_epsilon: s.terminate_epsilon.unwrap_or(0.0),
        success_epsilon: s.epsilon.unwrap_or(1e-8),
        record_path: false,
    };
    let record = match run(&f, &cfg, &limits) {
        Ok(r) => r,
        Err(e @ staopt::Error::Io(_)) => return Err(runtime_err(e)),
        Err(e) => return Err(config_err(e)),
    };
    let json = serde_json::to_string_pretty(&record).map_err(runtime_err)?;
    println!("{json}");
    Ok(())
}

fn experiment_config(s: &Settings, compare: bool) -> CliResult<ExperimentConfig> {
    let mut cfg = match s.profile.as_deref() {
        None => ExperimentConfig::default(),
        Some("quick") => ExperimentConfig::quick(),
        Some(other) => return Err(config_err(format!("unknown profile `{other}`"))),
    };
    if !s.functions.is_empty() || !s.dims.is_empty() {
        let dims = if s.dims.is_empty() { vec![2] } else { s.dims.clone() };
        if s.functions.is_empty() {
            return Err(config_err("--dim given without --function"));
        }
        cfg.functions = s
            .functions
            .iter()
            .flat_map(|&function| dims.iter().map(move |&dim| FunctionCell { function, dim }))
            .collect();
    }
    if !s.variants.is_empty() {
        cfg.variants = s.variants.iter().map(|&v| VariantConfig::new(v, 0)).collect();
    }
    for v in &mut cfg.variants {
        *v = VariantConfig {
            variant: v.variant,
            ..s.algorithm.clone()
        };
    }
    if let Some(r) = s.reps {
        cfg.repetitions = r;
    }
    if let Some(b) = s.budget {
        cfg.budget = b;
    }
    if let Some(e) = s.epsilon {
        cfg.success_epsilon = e;
    }
    if let Some(e) = s.terminate_epsilon {
        cfg.termination_epsilon = e;
    }
    if let Some(seed) = s.seed {
        cfg.base_seed = seed;
    }
    if s.workers.is_some() {
        cfg.workers = s.workers;
    }
    if s.reference.is_some() {
        cfg.reference = s.reference;
    }
    if compare {
        if cfg.variants.len() < 2 {
            return Err(config_err("compare needs at least two variants"));
        }
        if cfg.reference.is_none() {
            let listed: Vec<Variant> = cfg.variants.iter().map(|v| v.variant).collect();
            cfg.reference = Some(if listed.contains(&Variant::NMQI_POSTA) {
                Variant::NMQI_POSTA
            } else {
                listed[0]
            });
        }
    }
    cfg.validate().map_err(config_err)?;
    Ok(cfg)
}

fn render(report: &ExperimentReport) -> String {
    let mut out = format!(
        "{:<9}{:>4}  {:<11}{:>12}{:>12}{:>12}{:>9}  {}\n",
        "function", "D", "variant", "mean", "std", "ave_fes", "success", "sig"
    );
    for c in &report.cells {
        match (&c.stats, &c.error) {
            (Some(s), _) => {
                let _ = writeln!(
                    out,
                    "{:<9}{:>4}  {:<11}{:>12.3e}{:>12.3e}{:>12.3e}{:>6}/{:<2}  {}",
                    c.function.to_string(),
                    c.dim,
                    c.variant.to_string(),
                    s.mean,
                    s.std,
                    s.ave_fes,
                    s.success_count,
                    s.runs,
                    c.significance.map(|x| x.symbol()).unwrap_or("")
                );
            }
            (None, err) => {
                let _ = writeln!(
                    out,
                    "{:<9}{:>4}  {:<11}failed: {}",
                    c.function.to_string(),
                    c.dim,
                    c.variant.to_string(),
                    err.as_deref().unwrap_or("unknown error")
                );
            }
        }
    }
    out
}

fn cmd_bench(s: Settings, compare: bool) -> CliResult<()> {
    let cfg = experiment_config(&s, compare)?;
    if cfg.functions.is_empty() {
        return Err(config_err("no functions given; use --function or --profile quick"));
    }
    let out = match (&s.output, compare) {
        (Some(dir), _) => Some(dir.as_path()),
        (None, true) => None,
        (None, false) => return Err(config_err("bench needs --output, `output` or STAOPT_OUTPUT")),
    };
    let report = run_experiment(&cfg, out).map_err(runtime_err)?;
    print!("{}", render(&report));
    if let Some(dir) = out {
        println!("results written to {}", dir.display());
    }
    if report.cells.iter().any(|c| c.error.is_some()) {
        return Err(runtime_err("some cells failed"));
    }
    Ok(())
}

fn write_path_csv(dir: &Path, id: BenchmarkId, record: &staopt::RunRecord) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(runtime_err)?;
    let file = dir.join(format!("demo_{id}_{}_path.csv", record.variant));
    let mut w = csv::Writer::from_path(&file).map_err(runtime_err)?;
    let dim = record.final_best.point.dim();
    let mut header = vec!["step".to_string(), "fe".to_string(), "fitness".to_string()];
    header.extend((1..=dim).map(|i| format!("x{i}")));
    w.write_record(&header).map_err(runtime_err)?;
    for (step, (p, t)) in record.path.iter().zip(&record.trace).enumerate() {
        let mut row = vec![step.to_string(), t.fe.to_string(), format!("{:e}", t.fitness)];
        row.extend(p.iter().map(|x| format!("{x:e}")));
        w.write_record(&row).map_err(runtime_err)?;
    }
    w.flush().map_err(runtime_err)?;
    Ok(file)
}

/// Defaults of the demonstration: both variants on F3 and F7 in two
/// dimensions, stopping at `1e-8`, with the path run started at `(0, 0.75)`.
fn cmd_demo(s: Settings) -> CliResult<()> {
    const START: [f64; 2] = [0.0, 0.75];
    let functions = if s.functions.is_empty() {
        vec![BenchmarkId::F3, BenchmarkId::F7]
    } else {
        s.functions.clone()
    };
    let variants = if s.variants.is_empty() {
        vec![Variant::POSTA, Variant::NM_POSTA]
    } else {
        s.variants.clone()
    };
    let dim = single("dim", &s.dims, Some(2))?;
    let epsilon = s.epsilon.unwrap_or(1e-8);
    let cfg = ExperimentConfig {
        functions: functions.iter().map(|&function| FunctionCell { function, dim }).collect(),
        variants: variants
            .iter()
            .map(|&variant| VariantConfig {
                variant,
                ..s.algorithm.clone()
            })
            .collect(),
        repetitions: s.reps.unwrap_or(10),
        budget: s.budget.unwrap_or(BudgetRule::Fixed(100_000)),
        success_epsilon: epsilon,
        termination_epsilon: s.terminate_epsilon.unwrap_or(epsilon),
        base_seed: s.seed.unwrap_or(0),
        reference: None,
        workers: s.workers,
    };
    cfg.validate().map_err(config_err)?;
    let report = run_experiment(&cfg, s.output.as_deref()).map_err(runtime_err)?;
    print!("{}", render(&report));

    let start: Vec<f64> = if dim == 2 { START.to_vec() } else { vec![0.0; dim] };
    for &id in &functions {
        let f = make(id, dim).map_err(config_err)?;
        for &variant in &variants {
            let vc = VariantConfig {
                variant,
                seed: cfg.base_seed,
                start: Some(start.clone()),
                ..s.algorithm.clone()
            };
            let limits = RunLimits {
                budget: cfg.budget.budget(dim).map_err(config_err)?,
                termination_epsilon: cfg.termination_epsilon,
                success_epsilon: epsilon,
                record_path: true,
            };
            let record = run(&f, &vc, &limits).map_err(runtime_err)?;
            let verdict = if record.success { "success" } else { "no success" };
            print!(
                "{id} {variant} from {start:?}: {verdict}, best {:.3e} after {} FEs, {} path points",
                record.final_best.fitness,
                record.total_fes,
                record.path.len()
            );
            match &s.output {
                Some(dir) => println!(" -> {}", write_path_csv(dir, id, &record)?.display()),
                None => println!(),
            }
        }
    }
    Ok(())
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run(f) => cmd_run(settings(f)?),
        Command::Bench(f) => cmd_bench(settings(f)?, false),
        Command::Compare(f) => cmd_bench(settings(f)?, true),
        Command::Demo(f) => cmd_demo(settings(f)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
