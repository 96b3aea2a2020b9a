use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GaConfig, HistoryRecord, RunResult};
use crate::budget::{CountingFitness, Fitness};
use crate::error::Result;
use crate::population::EvaluatedPopulation;
use crate::seeds::random_solutions;
use crate::space::{FullSolution, SearchSpace};

/// Tournament with replacement; ties go to the lower index.
pub(crate) fn tournament<R: Rng>(fitness: &[f64], size: usize, rng: &mut R) -> usize {
    (0..size.max(1))
        .map(|_| rng.random_range(0..fitness.len()))
        .reduce(|a, b| match fitness[a].total_cmp(&fitness[b]) {
            std::cmp::Ordering::Less => b,
            std::cmp::Ordering::Greater => a,
            std::cmp::Ordering::Equal => a.min(b),
        })
        .expect("tournament size is at least one")
}

/// Swaps the segment between two random cut points.
pub(crate) fn two_point_crossover<T: Clone, R: Rng>(a: &[T], b: &[T], rng: &mut R) -> (Vec<T>, Vec<T>) {
    let n = a.len();
    let mut x = rng.random_range(0..=n);
    let mut y = rng.random_range(0..=n);
    if x > y {
        std::mem::swap(&mut x, &mut y);
    }
    let mut c1 = a.to_vec();
    let mut c2 = b.to_vec();
    c1[x..y].clone_from_slice(&b[x..y]);
    c2[x..y].clone_from_slice(&a[x..y]);
    (c1, c2)
}

/// Changes one uniformly chosen position to a different value.
fn mutate_one_point<R: Rng>(values: &mut [u32], space: &SearchSpace, rng: &mut R) {
    let i = rng.random_range(0..values.len());
    let c = space.cardinality(i);
    let shift = rng.random_range(1..c);
    values[i] = (values[i] + shift) % c;
}

fn mutate<R: Rng>(values: &mut [u32], cfg: &GaConfig, space: &SearchSpace, rng: &mut R) {
    if cfg.per_gene_mutation {
        for (i, v) in values.iter_mut().enumerate() {
            if rng.random_bool(cfg.mutation_rate) {
                let c = space.cardinality(i);
                *v = (*v + rng.random_range(1..c)) % c;
            }
        }
    } else if rng.random_bool(cfg.mutation_rate) {
        mutate_one_point(values, space, rng);
    }
}

/// One generational step: elites carried over, the rest bred by tournament,
/// two-point crossover and mutation. Offspring are returned unevaluated.
pub(crate) fn breed<R: Rng>(
    population: &[FullSolution],
    fitness: &[f64],
    cfg: &GaConfig,
    space: &SearchSpace,
    rng: &mut R,
) -> (Vec<(FullSolution, f64)>, Vec<FullSolution>) {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]));
    let elites: Vec<(FullSolution, f64)> = order
        .iter()
        .take(cfg.elite_count.min(population.len()))
        .map(|&i| (population[i].clone(), fitness[i]))
        .collect();
    let needed = cfg.population_size.saturating_sub(elites.len());
    let mut offspring = Vec::with_capacity(needed);
    while offspring.len() < needed {
        let a = population[tournament(fitness, cfg.tournament_size, rng)].values();
        let b = population[tournament(fitness, cfg.tournament_size, rng)].values();
        let (mut c1, mut c2) = if rng.random_bool(cfg.crossover_rate) {
            two_point_crossover(a, b, rng)
        } else {
            (a.to_vec(), b.to_vec())
        };
        mutate(&mut c1, cfg, space, rng);
        mutate(&mut c2, cfg, space, rng);
        offspring.push(FullSolution::new(c1));
        if offspring.len() < needed {
            offspring.push(FullSolution::new(c2));
        }
    }
    (elites, offspring)
}

/// Generational GA with elitism. Every fitness call goes through the
/// counting wrapper; the run ends when the budget is spent or `stop` accepts
/// the best solution.
pub fn run_full_ga<F: Fitness>(
    problem: &F,
    cfg: &GaConfig,
    eval_budget: u64,
    stop: &dyn Fn(&FullSolution, f64) -> bool,
) -> Result<RunResult> {
    cfg.validate()?;
    let space = problem.space().clone();
    let counted = CountingFitness::new(problem, eval_budget);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);

    let mut population: Vec<FullSolution> = Vec::new();
    let mut fitness: Vec<f64> = Vec::new();
    for x in random_solutions(&space, cfg.population_size, &mut rng) {
        match counted.try_evaluate(&x) {
            Some(f) => {
                population.push(x);
                fitness.push(f);
            }
            None => break,
        }
    }
    let mut result = RunResult::empty(counted.budget());
    if population.is_empty() {
        return Ok(result);
    }
    result.observe(&population, &fitness);
    result.history.push(HistoryRecord {
        generation: 0,
        best_fitness: result.best_fitness,
        evals_used: counted.used(),
    });

    let mut generation = 0;
    while counted.remaining() > 0 && !stop(&result.best, result.best_fitness) {
        generation += 1;
        let (elites, offspring) = breed(&population, &fitness, cfg, &space, &mut rng);
        let (mut next, mut next_fitness): (Vec<_>, Vec<_>) = elites.into_iter().unzip();
        for x in offspring {
            match counted.try_evaluate(&x) {
                Some(f) => {
                    next.push(x);
                    next_fitness.push(f);
                }
                None => break,
            }
        }
        population = next;
        fitness = next_fitness;
        result.observe(&population, &fitness);
        result.history.push(HistoryRecord {
            generation,
            best_fitness: result.best_fitness,
            evals_used: counted.used(),
        });
    }
    result.evals_used = counted.used();
    Ok(result)
}

/// A uniform random population of exactly `size` members, evolved for
/// `generations` generations with `cfg` and returned evaluated.
pub fn evolve_reference_population<F: Fitness>(
    problem: &F,
    size: usize,
    generations: usize,
    cfg: &GaConfig,
) -> Result<EvaluatedPopulation> {
    let cfg = GaConfig {
        population_size: size,
        ..cfg.clone()
    };
    cfg.validate()?;
    let space = problem.space().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut population = random_solutions(&space, size, &mut rng);
    let mut fitness: Vec<f64> = population.iter().map(|x| problem.evaluate(x)).collect();
    for _ in 0..generations {
        let (elites, offspring) = breed(&population, &fitness, &cfg, &space, &mut rng);
        let (mut next, mut next_fitness): (Vec<_>, Vec<_>) = elites.into_iter().unzip();
        next_fitness.extend(offspring.iter().map(|x| problem.evaluate(x)));
        next.extend(offspring);
        population = next;
        fitness = next_fitness;
    }
    EvaluatedPopulation::new(space, population, fitness)
}
