use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dyntest_core::bytecode::{disassemble, CompiledModule};
use dyntest_core::experiments::{
    comparison_rows, discover_corpus, emit_timeline, report_json, run_grid, runs_csv, stats_csv, suite_sidecar,
    trace_json, GridConfig, GridError,
};
use dyntest_core::generators::{random_generate, whole_suite_generate, GenerationBudget};
use dyntest_core::search::SearchConfig;
use dyntest_core::testcase::{parse_suite, render_suite};
use dyntest_core::{load_module, LoadError};

/// Generates unit tests for `.dyn` modules by search.
#[derive(Debug, Parser)]
#[command(name = "dyntest", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a test suite for one module.
    Generate(GenerateArgs),
    /// Run all four configurations over a corpus and compare them.
    Experiment(ExperimentArgs),
    /// Print the compiled bytecode and coverage goals of a module.
    DumpBytecode { file: PathBuf },
    /// Execute a test file against a module and print what was observed.
    Trace {
        file: PathBuf,
        testfile: PathBuf,
        #[arg(long, value_enum, default_value = "on")]
        type_hints: Switch,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgorithmArg {
    WholeSuite,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Debug, Args)]
#[group(multiple = false)]
struct BudgetArgs {
    /// Wall-clock budget per run, in seconds.
    #[arg(long)]
    budget_seconds: Option<f64>,
    /// Iteration budget per run (GA generations or random extensions).
    #[arg(long)]
    max_iterations: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> GenerationBudget {
        match (self.budget_seconds, self.max_iterations) {
            (None, None) => GenerationBudget::seconds(60.0),
            (s, n) => GenerationBudget {
                wall_clock_seconds: s,
                max_iterations: n,
            },
        }
    }
}

#[derive(Debug, Default, Args)]
struct GaArgs {
    #[arg(long)]
    ga_max_test_length: Option<usize>,
    #[arg(long)]
    ga_max_suite_size: Option<usize>,
    #[arg(long)]
    ga_sigma: Option<f64>,
    #[arg(long)]
    ga_population: Option<usize>,
    #[arg(long)]
    ga_crossover_rate: Option<f64>,
    #[arg(long)]
    ga_tournament_size: Option<usize>,
    #[arg(long)]
    ga_elitism: Option<usize>,
    #[arg(long)]
    ga_constant_seeding_prob: Option<f64>,
    #[arg(long)]
    ga_max_recursion_depth: Option<usize>,
    #[arg(long)]
    ga_k: Option<f64>,
    #[arg(long)]
    ga_step_budget: Option<u64>,
}

impl GaArgs {
    fn apply(&self, cfg: &mut SearchConfig) {
        macro_rules! set {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$target = v; })*
            };
        }
        set!(
            ga_max_test_length => max_test_length,
            ga_max_suite_size => max_suite_size,
            ga_sigma => sigma,
            ga_population => population,
            ga_crossover_rate => crossover_rate,
            ga_tournament_size => tournament_size,
            ga_elitism => elitism,
            ga_constant_seeding_prob => constant_seeding_prob,
            ga_max_recursion_depth => max_recursion_depth,
            ga_k => k,
            ga_step_budget => step_budget
        );
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    module: PathBuf,
    #[arg(long, value_enum, default_value = "whole-suite")]
    algorithm: AlgorithmArg,
    #[arg(long, value_enum, default_value = "on")]
    type_hints: Switch,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    ga: GaArgs,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Seed of the first repetition.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    ga: GaArgs,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 1, error }
    }
}

fn subject_error(path: &Path, e: LoadError) -> Failure {
    Failure {
        code: 3,
        error: anyhow::anyhow!("{}: {e}", path.display()),
    }
}

fn module_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "module".to_string())
}

fn load(path: &Path) -> Result<CompiledModule, Failure> {
    let source = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    load_module(&module_name(path), &source).map_err(|e| subject_error(path, e))
}

fn config(ga: &GaArgs, seed: u64, hints: Switch) -> Result<SearchConfig, Failure> {
    let mut cfg = SearchConfig {
        seed,
        use_annotations: hints == Switch::On,
        ..SearchConfig::default()
    };
    ga.apply(&mut cfg);
    cfg.validate().map_err(|e| Failure {
        code: 2,
        error: e.into(),
    })?;
    Ok(cfg)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn generate(args: &GenerateArgs) -> Result<(), Failure> {
    let cm = load(&args.module)?;
    let cfg = config(&args.ga, args.seed, args.type_hints)?;
    let budget = args.budget.budget();
    let report = match args.algorithm {
        AlgorithmArg::WholeSuite => whole_suite_generate(&cm, &cfg, budget),
        AlgorithmArg::Random => random_generate(&cm, &cfg, budget),
    }
    .context("engine fault")?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let stem = module_name(&args.module);
    write(
        &args.out.join(format!("test_{stem}.dyn")),
        &render_suite(&report.best_suite, &cm.name),
    )?;
    let sidecar = suite_sidecar(&cm, &report.best_suite, &cfg).context("engine fault")?;
    write(
        &args.out.join(format!("test_{stem}.json")),
        &serde_json::to_string_pretty(&sidecar).context("serializing sidecar")?,
    )?;
    let json = report_json(&cm, &report, &cfg, &budget).context("engine fault")?;
    write(
        &args.out.join("report.json"),
        &serde_json::to_string_pretty(&json).context("serializing report")?,
    )?;
    emit_timeline(&report, &budget, &args.out.join("timeline.csv")).map_err(anyhow::Error::from)?;
    println!(
        "{}: coverage {:.4} with {} tests ({} iterations)",
        cm.name,
        report.final_coverage,
        report.best_suite.len(),
        report.iterations
    );
    Ok(())
}

fn experiment(args: &ExperimentArgs) -> Result<(), Failure> {
    let modules = discover_corpus(&args.corpus).map_err(anyhow::Error::from)?;
    if modules.is_empty() {
        return Err(anyhow::anyhow!("no .dyn modules under {}", args.corpus.display()).into());
    }
    let base = config(&args.ga, args.seed, Switch::On)?;
    let grid = GridConfig {
        reps: args.reps,
        budget: args.budget.budget(),
        base,
        output_dir: Some(args.out.clone()),
    };
    let records = run_grid(&modules, &grid, |r| {
        log::info!(
            "{} {} hints={} seed={} coverage={:.4}",
            r.module,
            r.algorithm.name(),
            r.annotations,
            r.seed,
            r.final_coverage
        );
    })
    .map_err(|e| match e {
        GridError::Load { path, source } => subject_error(&path, source),
        other => anyhow::Error::from(other).into(),
    })?;
    write(&args.out.join("runs.csv"), &runs_csv(&records))?;
    let rows = comparison_rows(&records);
    let stats = stats_csv(&rows);
    write(&args.out.join("stats.csv"), &stats)?;
    print!("{stats}");
    Ok(())
}

fn trace(file: &Path, testfile: &Path, hints: Switch) -> Result<(), Failure> {
    let cm = load(file)?;
    let cfg = config(&GaArgs::default(), 0, hints)?;
    let text = fs::read_to_string(testfile).with_context(|| format!("reading {}", testfile.display()))?;
    let suite = parse_suite(&text, &cm.pool_for(cfg.use_annotations)).map_err(|e| Failure {
        code: 3,
        error: anyhow::anyhow!("{}: {e}", testfile.display()),
    })?;
    let json = trace_json(&cm, &suite, &cfg).context("engine fault")?;
    println!("{}", serde_json::to_string_pretty(&json).context("serializing trace")?);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Generate(args) => generate(args),
        Command::Experiment(args) => experiment(args),
        Command::DumpBytecode { file } => load(file).map(|cm| print!("{}", disassemble(&cm))),
        Command::Trace {
            file,
            testfile,
            type_hints,
        } => trace(file, testfile, *type_hints),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
