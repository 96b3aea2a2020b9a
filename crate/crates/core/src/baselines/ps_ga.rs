use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ga::{tournament, two_point_crossover};
use super::GaConfig;
use crate::catalog::PsCatalog;
use crate::error::{Error, Result};
use crate::miner::{dedup_in_order, ranking, CatalogMiner, Scorer, StopRule};
use crate::population::EvaluatedPopulation;
use crate::seeds::{random_partial, random_symbol};
use crate::space::PartialSolution;

/// A GA whose genomes are partial solutions, scored per generation with the
/// batch aggregate score.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsGaConfig {
    pub ga: GaConfig,
    pub qty_ret: usize,
    pub eval_budget: u64,
}

impl Default for PsGaConfig {
    fn default() -> Self {
        Self {
            ga: GaConfig::default(),
            qty_ret: 50,
            eval_budget: 100_000,
        }
    }
}

impl CatalogMiner for PsGaConfig {
    fn mine(&self, pop: &EvaluatedPopulation, stop: &StopRule) -> Result<PsCatalog> {
        self.ga.validate()?;
        if self.qty_ret == 0 {
            return Err(Error::InvalidConfig("qty_ret must be at least 1".into()));
        }
        if self.eval_budget == 0 {
            return Ok(PsCatalog::default());
        }
        let space = pop.space();
        let cfg = &self.ga;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        let mut scorer = Scorer::new(pop);

        let size = cfg.population_size as u64;
        let qty = self.qty_ret.min(cfg.population_size) as u64;
        if 2 * size + qty > self.eval_budget {
            return Ok(PsCatalog::default());
        }
        let mut population: Vec<PartialSolution> = (0..cfg.population_size)
            .map(|_| random_partial(space, &mut rng))
            .collect();
        let mut scores = scorer.score(&population)?;
        let mut best: Vec<PartialSolution> =
            scorer.catalog(&population, self.qty_ret)?.patterns().cloned().collect();

        loop {
            if stop.satisfied(&best.iter().cloned().collect()) {
                break;
            }
            // Population batch, buffer re-rank and the final pass.
            let cost = size + (best.len() as u64 + size) + self.qty_ret as u64;
            if scorer.used() + cost > self.eval_budget {
                break;
            }
            let order = ranking(&scores);
            let mut next: Vec<PartialSolution> = order
                .iter()
                .take(cfg.elite_count)
                .map(|&i| population[i].clone())
                .collect();
            while next.len() < cfg.population_size {
                let a = population[tournament(&scores, cfg.tournament_size, &mut rng)].cells();
                let b = population[tournament(&scores, cfg.tournament_size, &mut rng)].cells();
                let (c1, c2) = if rng.random_bool(cfg.crossover_rate) {
                    two_point_crossover(a, b, &mut rng)
                } else {
                    (a.to_vec(), b.to_vec())
                };
                for mut child in [c1, c2] {
                    if rng.random_bool(cfg.mutation_rate) {
                        let i = rng.random_range(0..child.len());
                        child[i] = random_symbol(space.cardinality(i), &mut rng);
                    }
                    if next.len() < cfg.population_size {
                        next.push(PartialSolution::new(child));
                    }
                }
            }
            population = next;
            scores = scorer.score(&population)?;
            let pool = dedup_in_order(best.iter().cloned().chain(population.iter().cloned()));
            best = scorer.catalog(&pool, self.qty_ret)?.patterns().cloned().collect();
        }
        scorer.catalog(&best, self.qty_ret)
    }
}
