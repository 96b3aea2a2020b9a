use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{HistoryRecord, RunResult};
use crate::budget::{CountingFitness, Fitness};
use crate::error::{Error, Result};
use crate::generator::weighted_random_choice;
use crate::seeds::random_solutions;
use crate::space::{FullSolution, SearchSpace};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UmdaConfig {
    pub population_size: usize,
    /// Fraction of the population kept by truncation selection.
    pub selection_fraction: f64,
    pub rng_seed: u64,
}

impl Default for UmdaConfig {
    fn default() -> Self {
        Self {
            population_size: 150,
            selection_fraction: 0.5,
            rng_seed: 0,
        }
    }
}

/// Maximum-likelihood per-position value frequencies of `selected`, clamped
/// to `[1/N, 1 - 1/N]` where `N` is the population size.
pub fn fit_marginals(
    selected: &[&FullSolution],
    space: &SearchSpace,
    population_size: usize,
) -> Vec<Vec<f64>> {
    let floor = 1.0 / population_size as f64;
    space
        .cardinalities()
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let mut counts = vec![0.0; c as usize];
            for x in selected {
                counts[x.get(i) as usize] += 1.0;
            }
            let total = selected.len().max(1) as f64;
            let clamped: Vec<f64> = counts
                .iter()
                .map(|n| (n / total).clamp(floor, 1.0 - floor))
                .collect();
            let sum: f64 = clamped.iter().sum();
            clamped.into_iter().map(|p| p / sum).collect()
        })
        .collect()
}

fn sample<R: Rng>(marginals: &[Vec<f64>], rng: &mut R) -> FullSolution {
    FullSolution::new(
        marginals
            .iter()
            .map(|p| weighted_random_choice(p, rng).expect("marginals are valid weights") as u32)
            .collect(),
    )
}

/// Univariate marginal distribution algorithm with best-so-far tracking.
pub fn run_umda<F: Fitness>(
    problem: &F,
    cfg: &UmdaConfig,
    eval_budget: u64,
    stop: &dyn Fn(&FullSolution, f64) -> bool,
) -> Result<RunResult> {
    if cfg.population_size < 2 || !(cfg.selection_fraction > 0.0 && cfg.selection_fraction <= 1.0) {
        return Err(Error::InvalidConfig(
            "UMDA needs population_size >= 2 and selection_fraction in (0, 1]".into(),
        ));
    }
    let space = problem.space().clone();
    let counted = CountingFitness::new(problem, eval_budget);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut result = RunResult::empty(counted.budget());
    let keep = ((cfg.population_size as f64 * cfg.selection_fraction).ceil() as usize).max(1);

    let mut population = random_solutions(&space, cfg.population_size, &mut rng);
    let mut generation = 0;
    loop {
        let mut evaluated: Vec<(FullSolution, f64)> = Vec::with_capacity(population.len());
        for x in population {
            match counted.try_evaluate(&x) {
                Some(f) => evaluated.push((x, f)),
                None => break,
            }
        }
        if evaluated.is_empty() {
            break;
        }
        let (xs, fs): (Vec<_>, Vec<_>) = evaluated.iter().cloned().unzip();
        result.observe(&xs, &fs);
        result.history.push(HistoryRecord {
            generation,
            best_fitness: result.best_fitness,
            evals_used: counted.used(),
        });
        if counted.remaining() == 0 || stop(&result.best, result.best_fitness) {
            break;
        }

        evaluated.sort_by(|a, b| b.1.total_cmp(&a.1));
        let selected: Vec<&FullSolution> = evaluated.iter().take(keep).map(|(x, _)| x).collect();
        let marginals = fit_marginals(&selected, &space, cfg.population_size);
        population = (0..cfg.population_size)
            .map(|_| sample(&marginals, &mut rng))
            .collect();
        generation += 1;
    }
    result.evals_used = counted.used();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::BenchmarkProblem;

    #[test]
    fn marginals_are_clamped() {
        let space = SearchSpace::binary(3);
        let a: FullSolution = "101".parse().unwrap();
        let b: FullSolution = "111".parse().unwrap();
        let m = fit_marginals(&[&a, &b], &space, 10);
        assert!((m[0][1] - 0.9).abs() < 1e-12);
        assert!((m[1][1] - 0.5).abs() < 1e-12);
        for p in m.iter().flatten() {
            assert!((0.1 - 1e-12..=0.9 + 1e-12).contains(p));
        }
    }

    #[test]
    fn degenerate_marginals_reproduce_the_optimum() {
        let x: FullSolution = "0110".parse().unwrap();
        let marginals: Vec<Vec<f64>> = x
            .values()
            .iter()
            .map(|&v| if v == 1 { vec![0.0, 1.0] } else { vec![1.0, 0.0] })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            assert_eq!(sample(&marginals, &mut rng), x);
        }
    }

    #[test]
    fn respects_budget() {
        let problem = BenchmarkProblem::trap_k(5, 5, 0).unwrap();
        let run = run_umda(&problem, &UmdaConfig::default(), 1_000, &|_, _| false).unwrap();
        assert_eq!(run.evals_used, 1_000);
        assert!(run
            .history
            .windows(2)
            .all(|w| w[0].best_fitness <= w[1].best_fitness));
    }
}
