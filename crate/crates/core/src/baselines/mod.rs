//! Comparison algorithms: a full-solution GA and UMDA, a GA and a hill
//! climber searching the partial-solution space directly, and the GA that
//! evolves reference populations.

mod ga;
mod hill_climber;
mod ps_ga;
mod umda;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use ga::{evolve_reference_population, run_full_ga};
pub use hill_climber::{PsHillClimberConfig, neighbours};
pub use ps_ga::PsGaConfig;
pub use umda::{fit_marginals, run_umda, UmdaConfig};

use crate::error::{Error, Result};
use crate::space::FullSolution;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub tournament_size: usize,
    pub elite_count: usize,
    /// Probability that an offspring receives a one-point mutation.
    pub mutation_rate: f64,
    /// Apply `mutation_rate` independently to every position instead.
    pub per_gene_mutation: bool,
    /// Probability of two-point crossover for a pair of parents.
    pub crossover_rate: f64,
    pub rng_seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 150,
            tournament_size: 2,
            elite_count: 2,
            mutation_rate: 0.075,
            per_gene_mutation: false,
            crossover_rate: 0.7,
            rng_seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let rate_ok = |r: f64| (0.0..=1.0).contains(&r);
        if !rate_ok(self.mutation_rate) || !rate_ok(self.crossover_rate) {
            return Err(Error::InvalidConfig("rates must lie in [0, 1]".into()));
        }
        if self.elite_count >= self.population_size {
            return Err(Error::InvalidConfig(format!(
                "elite_count ({}) must be below population_size ({})",
                self.elite_count, self.population_size
            )));
        }
        if self.tournament_size == 0 {
            return Err(Error::InvalidConfig("tournament_size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub evals_used: u64,
}

/// Outcome of a full-solution optimiser run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub best: FullSolution,
    pub best_fitness: f64,
    pub history: Vec<HistoryRecord>,
    pub evals_used: u64,
    pub eval_budget: u64,
}

impl RunResult {
    fn empty(eval_budget: u64) -> Self {
        Self {
            best: FullSolution::new(Vec::new()),
            best_fitness: f64::NEG_INFINITY,
            history: Vec::new(),
            evals_used: 0,
            eval_budget,
        }
    }

    fn observe(&mut self, population: &[FullSolution], fitness: &[f64]) {
        for (x, &f) in population.iter().zip(fitness) {
            if f > self.best_fitness {
                self.best_fitness = f;
                self.best = x.clone();
            }
        }
    }

    /// `generation,best_fitness,evals_used` rows with a header.
    pub fn write_history_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        for record in &self.history {
            writer.serialize(record)?;
        }
        writer.flush().map_err(Error::from)
    }
}
