//! Experiment protocols: catalog mining success (T1), reference-population
//! quality (T2) and end-to-end optimisation under a shared budget (T3).
//!
//! Every run derives its seeds from `(base_seed, key, run)`, so a spec
//! reproduces every number regardless of thread count. Runs execute on a
//! rayon pool sized by `PSCATALOG_THREADS` when that variable is set.

mod report;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    evolve_reference_population, run_full_ga, run_umda, GaConfig, PsGaConfig, PsHillClimberConfig, UmdaConfig,
};
use crate::benchmarks::{catalog_contains_all_targets, BenchmarkProblem, ProblemKind};
use crate::budget::CountingFitness;
use crate::error::{Error, Result};
use crate::generator::{generate, GeneratorConfig};
use crate::miner::{CatalogMiner, LocalSearch, MinerConfig, StopRule};
use crate::population::EvaluatedPopulation;
use crate::seeds::{derive_seed, random_solutions};

pub use report::{markdown, write_csv, CsvRow};

pub const THREADS_ENV: &str = "PSCATALOG_THREADS";

pub const T1_POPULATION_SIZES: [usize; 3] = [50, 100, 150];
pub const T2_REF_SIZES: [usize; 7] = [100, 200, 500, 1_000, 2_000, 5_000, 10_000];
pub const T2_GENERATIONS: [usize; 6] = [0, 10, 20, 50, 100, 200];
pub const T3_BUDGETS: [u64; 7] = [1_000, 5_000, 10_000, 15_000, 20_000, 25_000, 30_000];
pub const T3_SHARES: [u32; 9] = [10, 20, 30, 40, 50, 60, 70, 80, 90];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Experiment {
    T1,
    T2,
    T3,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::T1 => "T1",
            Experiment::T2 => "T2",
            Experiment::T3 => "T3",
        })
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "t1" => Ok(Experiment::T1),
            "t2" => Ok(Experiment::T2),
            "t3" => Ok(Experiment::T3),
            other => Err(Error::Parse(format!("unknown experiment {other:?}"))),
        }
    }
}

/// One configuration of an experiment grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cell {
    Miner {
        variant: LocalSearch,
        population_size: usize,
        use_archive: bool,
    },
    PsGa {
        population_size: usize,
    },
    HillClimber,
    ReferencePopulation {
        ref_size: usize,
        generations: usize,
    },
    PickAndMerge {
        budget: u64,
        share_percent: u32,
    },
    FullGa {
        budget: u64,
    },
    Umda {
        budget: u64,
    },
}

impl Cell {
    pub fn experiment(&self) -> Experiment {
        match self {
            Cell::Miner { .. } | Cell::PsGa { .. } | Cell::HillClimber => Experiment::T1,
            Cell::ReferencePopulation { .. } => Experiment::T2,
            Cell::PickAndMerge { .. } | Cell::FullGa { .. } | Cell::Umda { .. } => Experiment::T3,
        }
    }

    pub fn algorithm(&self) -> &'static str {
        match self {
            Cell::Miner { .. } | Cell::ReferencePopulation { .. } => "miner",
            Cell::PsGa { .. } => "ps-ga",
            Cell::HillClimber => "hill-climber",
            Cell::PickAndMerge { .. } => "pick-and-merge",
            Cell::FullGa { .. } => "ga",
            Cell::Umda { .. } => "umda",
        }
    }

    /// Stable identifier used for seeding and lookups.
    pub fn key(&self) -> String {
        match self {
            Cell::Miner {
                variant,
                population_size,
                use_archive,
            } => format!(
                "t1/miner/{}/{population_size}/{}",
                variant.name().to_ascii_lowercase(),
                if *use_archive { "archive" } else { "no-archive" }
            ),
            Cell::PsGa { population_size } => format!("t1/ps-ga/{population_size}"),
            Cell::HillClimber => "t1/hill-climber".into(),
            Cell::ReferencePopulation { ref_size, generations } => format!("t2/{ref_size}/{generations}"),
            Cell::PickAndMerge { budget, share_percent } => format!("t3/pick-and-merge/{budget}/{share_percent}"),
            Cell::FullGa { budget } => format!("t3/ga/{budget}"),
            Cell::Umda { budget } => format!("t3/umda/{budget}"),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        match *self {
            Cell::Miner { population_size, .. } | Cell::PsGa { population_size } if population_size < 2 => {
                bad(format!("{}: population size must be at least 2", self.key()))
            }
            Cell::ReferencePopulation { ref_size, .. } if ref_size < 3 => {
                bad(format!("{}: reference population needs at least 3 members", self.key()))
            }
            Cell::PickAndMerge { budget, share_percent } => {
                if !(1..=99).contains(&share_percent) {
                    return bad(format!("{}: share must lie in 1..=99", self.key()));
                }
                let psi = budget * u64::from(share_percent) / 100;
                if psi == 0 || psi == budget {
                    return bad(format!("{}: both budget shares must be positive", self.key()));
                }
                Ok(())
            }
            Cell::FullGa { budget } | Cell::Umda { budget } if budget == 0 => {
                bad(format!("{}: budget must be positive", self.key()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub problems: Vec<ProblemKind>,
    pub cells: Vec<Cell>,
    pub runs_per_cell: usize,
    pub base_seed: u64,
    /// Reference population size for T1.
    pub ref_size: usize,
    /// Aggregate-score budget for T1 and T2.
    pub psi_budget: u64,
    /// Solutions generated per T3 run.
    pub generated_per_run: usize,
    /// Configuration of the miner used in T2 and T3; size, variant and
    /// archive flag are overridden per cell in T1.
    pub miner: MinerConfig,
}

impl ExperimentSpec {
    /// A spec over an explicit list of cells with the default protocol settings.
    pub fn new(experiment: Experiment, cells: Vec<Cell>, runs_per_cell: usize, base_seed: u64) -> Self {
        Self {
            experiment,
            problems: ProblemKind::ALL.to_vec(),
            cells,
            runs_per_cell,
            base_seed,
            ref_size: 10_000,
            psi_budget: 100_000,
            generated_per_run: 100,
            miner: MinerConfig::default(),
        }
    }

    /// The complete grid of `experiment`.
    pub fn full(experiment: Experiment, runs_per_cell: usize, base_seed: u64) -> Self {
        let cells = match experiment {
            Experiment::T1 => t1_cells(&T1_POPULATION_SIZES),
            Experiment::T2 => t2_cells(&T2_REF_SIZES, &T2_GENERATIONS),
            Experiment::T3 => t3_cells(&T3_BUDGETS, &T3_SHARES),
        };
        Self::new(experiment, cells, runs_per_cell, base_seed)
    }

    /// A reduced grid with 20 runs per cell.
    pub fn quick(experiment: Experiment, base_seed: u64) -> Self {
        let cells = match experiment {
            Experiment::T1 => t1_cells(&[50, 150]),
            Experiment::T2 => t2_cells(&[100, 500, 2_000, 10_000], &[0, 10, 50]),
            Experiment::T3 => t3_cells(&[1_000, 5_000, 30_000], &[20, 50, 90]),
        };
        Self::new(experiment, cells, 20, base_seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs_per_cell == 0 {
            return Err(Error::InvalidConfig("runs_per_cell must be at least 1".into()));
        }
        if self.problems.is_empty() || self.cells.is_empty() {
            return Err(Error::InvalidConfig("the grid must contain at least one problem and one cell".into()));
        }
        if self.ref_size < 3 || self.generated_per_run == 0 {
            return Err(Error::InvalidConfig(
                "ref_size must be at least 3 and generated_per_run positive".into(),
            ));
        }
        self.miner.validate()?;
        for cell in &self.cells {
            if cell.experiment() != self.experiment {
                return Err(Error::InvalidConfig(format!(
                    "cell {} does not belong to {}",
                    cell.key(),
                    self.experiment
                )));
            }
            cell.validate()?;
        }
        Ok(())
    }

    /// Total number of runs the spec executes.
    pub fn total_runs(&self) -> usize {
        self.problems.len() * self.cells.len() * self.runs_per_cell
    }
}

pub fn t1_cells(population_sizes: &[usize]) -> Vec<Cell> {
    let mut cells = Vec::new();
    for variant in LocalSearch::ALL {
        for &population_size in population_sizes {
            for use_archive in [true, false] {
                cells.push(Cell::Miner {
                    variant,
                    population_size,
                    use_archive,
                });
            }
        }
    }
    cells.extend(population_sizes.iter().map(|&population_size| Cell::PsGa { population_size }));
    cells.push(Cell::HillClimber);
    cells
}

pub fn t2_cells(ref_sizes: &[usize], generations: &[usize]) -> Vec<Cell> {
    ref_sizes
        .iter()
        .flat_map(|&ref_size| {
            generations
                .iter()
                .map(move |&generations| Cell::ReferencePopulation { ref_size, generations })
        })
        .collect()
}

pub fn t3_cells(budgets: &[u64], shares: &[u32]) -> Vec<Cell> {
    let mut cells = Vec::new();
    for &budget in budgets {
        for &share_percent in shares {
            cells.push(Cell::PickAndMerge { budget, share_percent });
        }
        cells.push(Cell::FullGa { budget });
        cells.push(Cell::Umda { budget });
    }
    cells
}

/// Measurements of a single run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunRecord {
    pub success: bool,
    /// Evaluations of either kind spent by the run.
    pub evals: u64,
    pub f_evals: u64,
    pub f_budget: u64,
    pub psi_evals: u64,
    pub psi_budget: u64,
    /// Best fitness among the solutions the run produced (T3 only).
    pub best_fitness: Option<f64>,
    pub wall_clock: Duration,
}

impl RunRecord {
    pub fn within_budget(&self) -> bool {
        self.f_evals <= self.f_budget && self.psi_evals <= self.psi_budget
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub experiment: Experiment,
    pub problem: ProblemKind,
    pub cell: Cell,
    pub runs: usize,
    pub successes: usize,
    /// Mean and sample standard deviation of evaluations over successful runs.
    pub evals_mean: Option<f64>,
    pub evals_std: Option<f64>,
    pub mean_best_fitness: Option<f64>,
    pub max_f_evals: u64,
    pub f_budget: u64,
    pub max_psi_evals: u64,
    pub psi_budget: u64,
    pub budget_violations: usize,
    pub wall_clock: Duration,
}

impl CellResult {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.runs as f64
    }

    fn aggregate(experiment: Experiment, problem: ProblemKind, cell: Cell, records: &[RunRecord]) -> Self {
        let successful: Vec<f64> = records.iter().filter(|r| r.success).map(|r| r.evals as f64).collect();
        let (evals_mean, evals_std) = mean_std(&successful);
        let fitness: Vec<f64> = records.iter().filter_map(|r| r.best_fitness).collect();
        Self {
            experiment,
            problem,
            cell,
            runs: records.len(),
            successes: successful.len(),
            evals_mean,
            evals_std,
            mean_best_fitness: mean_std(&fitness).0,
            max_f_evals: records.iter().map(|r| r.f_evals).max().unwrap_or(0),
            f_budget: records.iter().map(|r| r.f_budget).max().unwrap_or(0),
            max_psi_evals: records.iter().map(|r| r.psi_evals).max().unwrap_or(0),
            psi_budget: records.iter().map(|r| r.psi_budget).max().unwrap_or(0),
            budget_violations: records.iter().filter(|r| !r.within_budget()).count(),
            wall_clock: records.iter().map(|r| r.wall_clock).sum(),
        }
    }
}

fn mean_std(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = if xs.len() < 2 {
        0.0
    } else {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    (Some(mean), Some(std))
}

/// Finds the result for `problem` and `cell`.
pub fn find<'a>(results: &'a [CellResult], problem: ProblemKind, cell: &Cell) -> Option<&'a CellResult> {
    results.iter().find(|r| r.problem == problem && &r.cell == cell)
}

/// A rayon pool honouring `PSCATALOG_THREADS`.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let threads: usize = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
        builder = builder.num_threads(threads);
    }
    builder
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot build thread pool: {e}")))
}

pub fn run(spec: &ExperimentSpec) -> Result<Vec<CellResult>> {
    run_with_progress(spec, &|_, _| {})
}

/// Runs every `(problem, cell, run)` of `spec`; `progress(done, total)` is
/// called after each run. Results follow the order problems × cells.
pub fn run_with_progress(
    spec: &ExperimentSpec,
    progress: &(dyn Fn(usize, usize) + Sync),
) -> Result<Vec<CellResult>> {
    spec.validate()?;
    let tasks: Vec<(ProblemKind, &Cell, usize)> = spec
        .problems
        .iter()
        .flat_map(|&p| {
            spec.cells
                .iter()
                .flat_map(move |c| (0..spec.runs_per_cell).map(move |r| (p, c, r)))
        })
        .collect();
    let total = tasks.len();
    let done = AtomicUsize::new(0);
    let records: Vec<RunRecord> = thread_pool()?.install(|| {
        tasks
            .par_iter()
            .map(|&(problem, cell, run)| {
                let record = run_once(spec, problem, cell, run as u64);
                progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
                record
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(tasks
        .chunks(spec.runs_per_cell)
        .zip(records.chunks(spec.runs_per_cell))
        .map(|(t, r)| CellResult::aggregate(spec.experiment, t[0].0, t[0].1.clone(), r))
        .collect())
}

/// Executes run `run` of one cell.
pub fn run_once(spec: &ExperimentSpec, kind: ProblemKind, cell: &Cell, run: u64) -> Result<RunRecord> {
    let start = Instant::now();
    let problem = kind.instantiate(derive_seed(spec.base_seed, &format!("problem/{kind}"), run))?;
    let algorithm_seed = derive_seed(spec.base_seed, &format!("{kind}/{}", cell.key()), run);
    let mut record = match *cell {
        Cell::Miner { .. } | Cell::PsGa { .. } | Cell::HillClimber => {
            let (pop, f_evals) = uniform_reference(spec, &problem, spec.ref_size, run)?;
            mine_targets(spec, &problem, cell, &pop, algorithm_seed, f_evals, spec.ref_size as u64)?
        }
        Cell::ReferencePopulation { ref_size, generations } => {
            let ga = GaConfig {
                rng_seed: derive_seed(spec.base_seed, &format!("pref/{kind}/{ref_size}"), run),
                ..GaConfig::default()
            };
            let f_budget = ref_size as u64 + (generations * (ref_size - ga.elite_count)) as u64;
            let counted = CountingFitness::new(&problem, f_budget);
            let pop = evolve_reference_population(&counted, ref_size, generations, &ga)?;
            mine_targets(spec, &problem, cell, &pop, algorithm_seed, counted.used(), f_budget)?
        }
        Cell::PickAndMerge { budget, share_percent } => {
            let psi_budget = budget * u64::from(share_percent) / 100;
            let f_budget = budget - psi_budget;
            let (pop, f_evals) = uniform_reference(spec, &problem, f_budget as usize, run)?;
            let miner = MinerConfig {
                eval_budget: psi_budget,
                rng_seed: algorithm_seed,
                ..spec.miner.clone()
            };
            let catalog = miner.mine(&pop, &StopRule::BudgetOnly)?;
            let n = problem.space().len();
            let generator = GeneratorConfig::for_length(n, algorithm_seed ^ 1);
            let solutions = generate(&catalog.entries, problem.space(), &generator, spec.generated_per_run)?;
            let best_fitness = solutions
                .iter()
                .map(|x| problem.fitness(x))
                .fold(f64::NEG_INFINITY, f64::max);
            RunRecord {
                success: solutions.iter().any(|x| problem.is_global_optimum(x)),
                evals: f_evals + catalog.evals_used,
                f_evals,
                f_budget,
                psi_evals: catalog.evals_used,
                psi_budget,
                best_fitness: Some(best_fitness),
                wall_clock: Duration::ZERO,
            }
        }
        Cell::FullGa { budget } | Cell::Umda { budget } => {
            let stop = |x: &crate::space::FullSolution, _: f64| problem.is_global_optimum(x);
            let result = if let Cell::FullGa { .. } = cell {
                let cfg = GaConfig {
                    rng_seed: algorithm_seed,
                    ..GaConfig::default()
                };
                run_full_ga(&problem, &cfg, budget, &stop)?
            } else {
                let cfg = UmdaConfig {
                    rng_seed: algorithm_seed,
                    ..UmdaConfig::default()
                };
                run_umda(&problem, &cfg, budget, &stop)?
            };
            RunRecord {
                success: problem.is_global_optimum(&result.best),
                evals: result.evals_used,
                f_evals: result.evals_used,
                f_budget: budget,
                psi_evals: 0,
                psi_budget: 0,
                best_fitness: Some(result.best_fitness),
                wall_clock: Duration::ZERO,
            }
        }
    };
    record.wall_clock = start.elapsed();
    Ok(record)
}

/// `size` uniform random solutions evaluated through a counting wrapper.
/// Shared by every cell of the same run and size.
fn uniform_reference(
    spec: &ExperimentSpec,
    problem: &BenchmarkProblem,
    size: usize,
    run: u64,
) -> Result<(EvaluatedPopulation, u64)> {
    let seed = derive_seed(spec.base_seed, &format!("pref/{}/{size}", problem.kind()), run);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let members = random_solutions(problem.space(), size, &mut rng);
    let counted = CountingFitness::new(problem, size as u64);
    let fitness = members
        .iter()
        .map(|x| counted.try_evaluate(x))
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| Error::InvalidConfig("reference population exceeded its budget".into()))?;
    Ok((EvaluatedPopulation::new(counted.space().clone(), members, fitness)?, counted.used()))
}

/// Mines `pop` until every target is found or the budget runs out; success
/// means the final catalog holds every target.
fn mine_targets(
    spec: &ExperimentSpec,
    problem: &BenchmarkProblem,
    cell: &Cell,
    pop: &EvaluatedPopulation,
    seed: u64,
    f_evals: u64,
    f_budget: u64,
) -> Result<RunRecord> {
    let stop = StopRule::AllFound(problem.targets().to_vec());
    let qty_ret = spec.miner.qty_ret;
    let catalog = match *cell {
        Cell::Miner {
            variant,
            population_size,
            use_archive,
        } => MinerConfig {
            variant,
            population_size,
            use_archive,
            eval_budget: spec.psi_budget,
            rng_seed: seed,
            ..spec.miner.clone()
        }
        .mine(pop, &stop)?,
        Cell::PsGa { population_size } => PsGaConfig {
            ga: GaConfig {
                population_size,
                rng_seed: seed,
                ..GaConfig::default()
            },
            qty_ret,
            eval_budget: spec.psi_budget,
        }
        .mine(pop, &stop)?,
        Cell::HillClimber => PsHillClimberConfig {
            qty_ret,
            eval_budget: spec.psi_budget,
            rng_seed: seed,
        }
        .mine(pop, &stop)?,
        _ => MinerConfig {
            eval_budget: spec.psi_budget,
            rng_seed: seed,
            ..spec.miner.clone()
        }
        .mine(pop, &stop)?,
    };
    Ok(RunRecord {
        success: catalog_contains_all_targets(catalog.patterns(), problem),
        evals: catalog.evals_used,
        f_evals,
        f_budget,
        psi_evals: catalog.evals_used,
        psi_budget: spec.psi_budget,
        best_fitness: None,
        wall_clock: Duration::ZERO,
    })
}
