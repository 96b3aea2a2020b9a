use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, IsTerminal, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pscatalog_core::explain::{explain_global, explain_local};
use pscatalog_core::generator::generate;
use pscatalog_core::harness::{self, Experiment, ExperimentSpec};
use pscatalog_core::seeds::random_solutions;
use pscatalog_core::{
    BenchmarkProblem, CatalogMiner, CountingFitness, EvaluatedPopulation, FullSolution, GeneratorConfig,
    LocalSearch, MinerConfig, ProblemKind, ProblemSpec, PsCatalog, StopRule,
};

/// Mine, explain and sample catalogs of partial solutions.
#[derive(Parser)]
#[command(name = "pscatalog", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the JSON description of a benchmark instance.
    Problem {
        /// rr, rro or trap
        kind: ProblemKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mine a catalog from a uniform random reference population.
    Mine(MineArgs),
    /// Sample full solutions from a catalog with pick-and-merge.
    Generate(GenerateArgs),
    /// Render a global or local explanation of a catalog.
    Explain {
        #[command(subcommand)]
        kind: ExplainKind,
    },
    /// Run an experiment grid and write CSV and markdown results.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ProblemArgs {
    /// Benchmark name (rr, rro, trap) or a problem JSON file.
    #[arg(long, default_value = "rr")]
    problem: String,
    /// Instance seed when `--problem` names a benchmark.
    #[arg(long, default_value_t = 0)]
    problem_seed: u64,
}

impl ProblemArgs {
    fn load(&self) -> Result<BenchmarkProblem> {
        if let Ok(kind) = self.problem.parse::<ProblemKind>() {
            return Ok(kind.instantiate(self.problem_seed)?);
        }
        let text = fs::read_to_string(&self.problem)
            .with_context(|| format!("{:?} is neither a benchmark name nor a readable file", self.problem))?;
        let spec: ProblemSpec = serde_json::from_str(&text).context("invalid problem JSON")?;
        Ok(BenchmarkProblem::from_spec(spec)?)
    }
}

#[derive(Args)]
struct MineArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Reference population size.
    #[arg(long, default_value_t = 10_000)]
    ref_size: usize,
    /// Aggregate-score evaluation budget.
    #[arg(long, default_value_t = 100_000)]
    budget: u64,
    #[arg(long, default_value_t = 150)]
    population: usize,
    /// simplification, specialization or full
    #[arg(long, default_value = "specialization")]
    variant: LocalSearch,
    #[arg(long)]
    no_archive: bool,
    /// Catalog size.
    #[arg(long, default_value_t = 50)]
    qty: usize,
    /// Parents per generation (default: a third of the population).
    #[arg(long)]
    selection: Option<usize>,
    /// Stop as soon as every known target has been found.
    #[arg(long)]
    stop_on_targets: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; `.json` selects JSON, anything else TSV. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Catalog file (TSV or `.json`).
    #[arg(long)]
    catalog: PathBuf,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Score the generated solutions against the problem.
    #[arg(long)]
    evaluate: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV file. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ExplainKind {
    /// Describe the whole catalog and its conflicting pairs.
    Global {
        #[arg(long)]
        catalog: PathBuf,
        /// Mark known targets of this benchmark (name or JSON file).
        #[arg(long)]
        problem: Option<String>,
        #[arg(long, default_value_t = 0)]
        problem_seed: u64,
    },
    /// List the catalog patterns a solution contains.
    Local {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        solution: FullSolution,
    },
}

#[derive(Args)]
struct BenchArgs {
    /// t1, t2 or t3
    experiment: Experiment,
    /// Reduced grid with 20 runs per cell.
    #[arg(long)]
    quick: bool,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated subset of rr, rro, trap.
    #[arg(long, value_delimiter = ',')]
    problems: Vec<ProblemKind>,
    #[arg(long, default_value = "results")]
    out_dir: PathBuf,
    /// Suppress the progress line on stderr.
    #[arg(long)]
    quiet: bool,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_stdout(text: &str) -> Result<()> {
    let mut w = output(None)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn read_catalog(path: &Path) -> Result<PsCatalog> {
    let catalog = if is_json(path) {
        PsCatalog::from_json(&fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?)?
    } else {
        let file = File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
        PsCatalog::read_tsv(BufReader::new(file))?
    };
    Ok(catalog)
}

fn problem_json(kind: ProblemKind, seed: u64, out: Option<&Path>) -> Result<()> {
    let problem = kind.instantiate(seed)?;
    let mut w = output(out)?;
    writeln!(w, "{}", serde_json::to_string_pretty(problem.spec())?)?;
    w.flush()?;
    Ok(())
}

fn mine(args: &MineArgs) -> Result<()> {
    let problem = args.problem.load()?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let members = random_solutions(problem.space(), args.ref_size, &mut rng);
    let counted = CountingFitness::new(&problem, args.ref_size as u64);
    let fitness = members
        .iter()
        .map(|x| counted.try_evaluate(x))
        .collect::<Option<Vec<f64>>>()
        .context("reference population exceeded its evaluation budget")?;
    let pop = EvaluatedPopulation::new(problem.space().clone(), members, fitness)?;
    let cfg = MinerConfig {
        population_size: args.population,
        variant: args.variant,
        use_archive: !args.no_archive,
        qty_ret: args.qty,
        eval_budget: args.budget,
        selection_count: args.selection,
        rng_seed: pscatalog_core::seeds::sub_seed(args.seed, "miner"),
        ..MinerConfig::default()
    };
    let stop = if args.stop_on_targets {
        StopRule::AllFound(problem.targets().to_vec())
    } else {
        StopRule::BudgetOnly
    };
    let catalog = cfg.mine(&pop, &stop)?;
    if catalog.evals_used > args.budget {
        bail!("miner used {} evaluations, over its budget of {}", catalog.evals_used, args.budget);
    }
    let mut w = output(args.out.as_deref())?;
    if args.out.as_deref().is_some_and(is_json) {
        writeln!(w, "{}", catalog.to_json()?)?;
    } else {
        catalog.write_tsv(&mut w)?;
    }
    w.flush()?;
    let found = problem.targets().iter().filter(|t| catalog.patterns().any(|p| p == *t)).count();
    eprintln!(
        "{} patterns, {} aggregate-score evaluations, {}/{} targets in the catalog",
        catalog.len(),
        catalog.evals_used,
        found,
        problem.targets().len()
    );
    Ok(())
}

fn generate_cmd(args: &GenerateArgs) -> Result<()> {
    let catalog = read_catalog(&args.catalog)?;
    let problem = args.problem.load()?;
    let space = problem.space();
    let cfg = GeneratorConfig::for_length(space.len(), args.seed);
    let solutions = generate(&catalog.entries, space, &cfg, args.count)?;
    let mut w = output(args.out.as_deref())?;
    if args.evaluate {
        writeln!(w, "solution,fitness,global_optimum")?;
        for x in &solutions {
            writeln!(w, "{x},{},{}", problem.fitness(x), problem.is_global_optimum(x))?;
        }
    } else {
        writeln!(w, "solution")?;
        for x in &solutions {
            writeln!(w, "{x}")?;
        }
    }
    w.flush()?;
    Ok(())
}

fn explain(kind: &ExplainKind) -> Result<()> {
    match kind {
        ExplainKind::Global {
            catalog,
            problem,
            problem_seed,
        } => {
            let catalog = read_catalog(catalog)?;
            let problem = problem
                .as_ref()
                .map(|p| {
                    ProblemArgs {
                        problem: p.clone(),
                        problem_seed: *problem_seed,
                    }
                    .load()
                })
                .transpose()?;
            write_stdout(&explain_global(&catalog, problem.as_ref()).to_string())?;
        }
        ExplainKind::Local { catalog, solution } => {
            let catalog = read_catalog(catalog)?;
            write_stdout(&explain_local(solution, &catalog)?.to_string())?;
        }
    }
    Ok(())
}

fn bench(args: &BenchArgs) -> Result<()> {
    let mut spec = if args.quick {
        ExperimentSpec::quick(args.experiment, args.seed)
    } else {
        ExperimentSpec::full(args.experiment, 100, args.seed)
    };
    if let Some(runs) = args.runs {
        spec.runs_per_cell = runs;
    }
    if !args.problems.is_empty() {
        spec.problems = args.problems.clone();
    }
    spec.validate()?;
    let show_progress = !args.quiet && io::stderr().is_terminal();
    let results = harness::run_with_progress(&spec, &|done, total| {
        if show_progress {
            eprint!("\r{done}/{total} runs");
        }
    })?;
    if show_progress {
        eprintln!();
    }

    fs::create_dir_all(&args.out_dir).with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    let stem = args.experiment.to_string().to_ascii_lowercase();
    let csv_path = args.out_dir.join(format!("{stem}.csv"));
    let md_path = args.out_dir.join(format!("{stem}.md"));
    harness::write_csv(&results, File::create(&csv_path)?)?;
    let md = harness::markdown(&results);
    fs::write(&md_path, &md)?;
    write_stdout(&md)?;

    let violations: usize = results.iter().map(|r| r.budget_violations).sum();
    if violations > 0 {
        bail!("{violations} run(s) exceeded their evaluation budget");
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Problem { kind, seed, out } => problem_json(*kind, *seed, out.as_deref()),
        Command::Mine(args) => mine(args),
        Command::Generate(args) => generate_cmd(args),
        Command::Explain { kind } => explain(kind),
        Command::Bench(args) => bench(args),
    };
    match outcome {
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => Ok(()),
        other => other,
    }
}
