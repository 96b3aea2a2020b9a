use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::PsCatalog;
use crate::error::{Error, Result};
use crate::miner::{CatalogMiner, Scorer, StopRule};
use crate::population::EvaluatedPopulation;
use crate::seeds::random_partial;
use crate::space::{PartialSolution, SearchSpace};

/// Steepest-ascent hill climbing over partial solutions with random
/// restarts. A trial ends at a local optimum; the catalog is the best of all
/// trial end points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsHillClimberConfig {
    pub qty_ret: usize,
    pub eval_budget: u64,
    pub rng_seed: u64,
}

impl Default for PsHillClimberConfig {
    fn default() -> Self {
        Self {
            qty_ret: 50,
            eval_budget: 100_000,
            rng_seed: 0,
        }
    }
}

/// Every pattern differing from `ps` in exactly one cell, ordered by
/// position and then by symbol (values first, wildcard last).
pub fn neighbours(ps: &PartialSolution, space: &SearchSpace) -> Vec<PartialSolution> {
    let mut out = Vec::new();
    for i in 0..ps.len() {
        let symbols = (0..space.cardinality(i)).map(Some).chain(std::iter::once(None));
        for symbol in symbols {
            if symbol != ps.get(i) {
                out.push(ps.with_cell(i, symbol));
            }
        }
    }
    out
}

impl CatalogMiner for PsHillClimberConfig {
    fn mine(&self, pop: &EvaluatedPopulation, stop: &StopRule) -> Result<PsCatalog> {
        if self.qty_ret == 0 {
            return Err(Error::InvalidConfig("qty_ret must be at least 1".into()));
        }
        if self.eval_budget == 0 {
            return Ok(PsCatalog::default());
        }
        let space = pop.space();
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        let mut scorer = Scorer::new(pop);
        let mut optima: Vec<PartialSolution> = Vec::new();
        let mut seen: HashSet<PartialSolution> = HashSet::new();

        'trials: loop {
            if stop.satisfied(&seen) {
                break;
            }
            let mut current = random_partial(space, &mut rng);
            let mut climbed = false;
            loop {
                let mut batch = vec![current.clone()];
                batch.extend(neighbours(&current, space));
                // The batch plus a final pass that may include `current`.
                let pending = optima.len() + 1;
                if scorer.used() + (batch.len() + pending) as u64 > self.eval_budget {
                    if climbed && seen.insert(current.clone()) {
                        optima.push(current);
                    }
                    break 'trials;
                }
                let scores = scorer.score(&batch)?;
                climbed = true;
                let (best, &best_score) = scores[1..]
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
                    .expect("every pattern has neighbours");
                if best_score > scores[0] {
                    current = batch[best + 1].clone();
                } else {
                    if seen.insert(current.clone()) {
                        optima.push(current);
                    }
                    break;
                }
            }
        }
        scorer.catalog(&optima, self.qty_ret)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::BenchmarkProblem;
    use crate::seeds::random_solutions;

    #[test]
    fn neighbourhood_shape() {
        let space = SearchSpace::binary(3);
        let n = neighbours(&"1*0".parse().unwrap(), &space);
        assert_eq!(n.len(), 6);
        assert_eq!(n[0].to_string(), "0*0");
        assert_eq!(n[1].to_string(), "**0");
    }

    #[test]
    fn budget_zero_and_bounded_runs() {
        let trap = BenchmarkProblem::trap_k(5, 5, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let members = random_solutions(trap.space(), 400, &mut rng);
        let pop =
            EvaluatedPopulation::evaluate(trap.space().clone(), members, |x| trap.fitness(x)).unwrap();
        let zero = PsHillClimberConfig {
            eval_budget: 0,
            ..Default::default()
        };
        assert!(zero.mine(&pop, &StopRule::BudgetOnly).unwrap().is_empty());
        let cfg = PsHillClimberConfig {
            eval_budget: 2_000,
            ..Default::default()
        };
        let catalog = cfg.mine(&pop, &StopRule::BudgetOnly).unwrap();
        assert!(catalog.evals_used <= 2_000);
        assert!(!catalog.is_empty());
    }
}
