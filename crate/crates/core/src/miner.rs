//! The archive-based partial-solution miner.
//!
//! Each generation tournament-selects parents from the current population,
//! expands them into their local neighbourhoods, moves the parents into the
//! exclusion archive and keeps the best `population_size` candidates that
//! were never archived. The catalog is the top of the archive under one final
//! scoring pass. Every pattern placed in a scoring batch counts as one
//! evaluation against `eval_budget`; a batch is only scored when it and every
//! ranking pass it commits to still fit, so the budget is never exceeded.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::budget::PsEvalCounter;
use crate::catalog::{CatalogEntry, PsCatalog};
use crate::error::{Error, Result};
use crate::metrics::{self, MetricTriple};
use crate::population::EvaluatedPopulation;
use crate::space::{PartialSolution, SearchSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalSearch {
    SimplificationOnly,
    SpecializationOnly,
    FullLocal,
}

impl LocalSearch {
    pub const ALL: [LocalSearch; 3] = [
        LocalSearch::SimplificationOnly,
        LocalSearch::SpecializationOnly,
        LocalSearch::FullLocal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LocalSearch::SimplificationOnly => "Simplification-only",
            LocalSearch::SpecializationOnly => "Specialization-only",
            LocalSearch::FullLocal => "Full-local",
        }
    }
}

impl std::str::FromStr for LocalSearch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "simplification" | "simplification-only" => Ok(LocalSearch::SimplificationOnly),
            "specialization" | "specialization-only" => Ok(LocalSearch::SpecializationOnly),
            "full" | "full-local" => Ok(LocalSearch::FullLocal),
            other => Err(Error::Parse(format!("unknown local search {other:?}"))),
        }
    }
}

/// Termination in addition to budget exhaustion.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum StopRule {
    #[default]
    BudgetOnly,
    /// Stop as soon as every pattern is among the candidates for the catalog.
    AllFound(Vec<PartialSolution>),
}

impl StopRule {
    pub(crate) fn satisfied(&self, found: &HashSet<PartialSolution>) -> bool {
        match self {
            StopRule::BudgetOnly => false,
            StopRule::AllFound(targets) => targets.iter().all(|t| found.contains(t)),
        }
    }
}

/// Anything that turns a reference population into a catalog.
pub trait CatalogMiner {
    fn mine(&self, pop: &EvaluatedPopulation, stop: &StopRule) -> Result<PsCatalog>;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinerConfig {
    pub population_size: usize,
    pub variant: LocalSearch,
    pub use_archive: bool,
    pub qty_ret: usize,
    pub eval_budget: u64,
    pub tournament_size: usize,
    /// Parents selected per generation; `None` means `population_size / 3`.
    pub selection_count: Option<usize>,
    pub rng_seed: u64,
}

impl Default for MinerConfig {
    fn default() -> Self {
        Self {
            population_size: 150,
            variant: LocalSearch::SpecializationOnly,
            use_archive: true,
            qty_ret: 50,
            eval_budget: 100_000,
            tournament_size: 2,
            selection_count: None,
            rng_seed: 0,
        }
    }
}

impl MinerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tournament_size < 2 || self.population_size < self.tournament_size {
            return Err(Error::InvalidConfig(format!(
                "need population_size ({}) >= tournament_size ({}) >= 2",
                self.population_size, self.tournament_size
            )));
        }
        if self.qty_ret == 0 {
            return Err(Error::InvalidConfig("qty_ret must be at least 1".into()));
        }
        if self.selection_count == Some(0) {
            return Err(Error::InvalidConfig("selection_count must be at least 1".into()));
        }
        Ok(())
    }

    pub fn parents_per_generation(&self) -> usize {
        self.selection_count
            .unwrap_or(self.population_size / 3)
            .max(1)
    }
}

/// Initial population for a local-search variant.
pub fn get_init(
    variant: LocalSearch,
    pop: &EvaluatedPopulation,
    population_size: usize,
) -> Vec<PartialSolution> {
    let universal = || vec![PartialSolution::universal(pop.space().len())];
    let top = || -> Vec<PartialSolution> {
        pop.top_indices(population_size)
            .into_iter()
            .map(|i| PartialSolution::from_full(&pop.members()[i]))
            .collect()
    };
    match variant {
        LocalSearch::SpecializationOnly => universal(),
        LocalSearch::SimplificationOnly => dedup_in_order(top()),
        LocalSearch::FullLocal => dedup_in_order(universal().into_iter().chain(top())),
    }
}

/// Neighbourhood of `ps` for a local-search variant; never contains `ps`.
pub fn get_local(variant: LocalSearch, ps: &PartialSolution, space: &SearchSpace) -> Vec<PartialSolution> {
    match variant {
        LocalSearch::SimplificationOnly => ps.simplifications(),
        LocalSearch::SpecializationOnly => ps.specializations(space),
        LocalSearch::FullLocal => {
            let mut out = ps.simplifications();
            out.extend(ps.specializations(space));
            out
        }
    }
}

pub(crate) fn dedup_in_order<I>(items: I) -> Vec<PartialSolution>
where
    I: IntoIterator<Item = PartialSolution>,
{
    let mut seen = HashSet::new();
    items
        .into_iter()
        .filter(|ps| seen.insert(ps.clone()))
        .collect()
}

/// Batch scoring with evaluation counting. Metric triples are memoised;
/// the memo only saves work, every scored pattern is still counted.
pub(crate) struct Scorer<'a> {
    pop: &'a EvaluatedPopulation,
    cache: HashMap<PartialSolution, MetricTriple>,
    counter: PsEvalCounter,
}

impl<'a> Scorer<'a> {
    pub(crate) fn new(pop: &'a EvaluatedPopulation) -> Self {
        Self {
            pop,
            cache: HashMap::new(),
            counter: PsEvalCounter::new(),
        }
    }

    pub(crate) fn used(&self) -> u64 {
        self.counter.used()
    }

    pub(crate) fn triple(&mut self, ps: &PartialSolution) -> Result<MetricTriple> {
        if let Some(t) = self.cache.get(ps) {
            return Ok(*t);
        }
        let t = metrics::metrics(self.pop, ps)?;
        self.cache.insert(ps.clone(), t);
        Ok(t)
    }

    pub(crate) fn score(&mut self, batch: &[PartialSolution]) -> Result<Vec<f64>> {
        let triples = batch
            .iter()
            .map(|ps| self.triple(ps))
            .collect::<Result<Vec<_>>>()?;
        self.counter.add(batch.len());
        Ok(metrics::aggregate(&triples))
    }

    /// Scores `candidates` in one batch and returns the best `qty` as a catalog.
    pub(crate) fn catalog(&mut self, candidates: &[PartialSolution], qty: usize) -> Result<PsCatalog> {
        if candidates.is_empty() {
            return Ok(PsCatalog::new(Vec::new(), self.used()));
        }
        let scores = self.score(candidates)?;
        let order = ranking(&scores);
        let entries = order
            .into_iter()
            .take(qty)
            .map(|i| {
                Ok(CatalogEntry {
                    pattern: candidates[i].clone(),
                    metrics: self.triple(&candidates[i])?,
                    score: scores[i],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PsCatalog::new(entries, self.used()))
    }
}

/// Indices sorted by descending score; ties keep their original order.
pub(crate) fn ranking(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order
}

/// Tournament selection where each winner leaves the pool.
pub(crate) fn tournament_without_replacement<R: Rng>(
    scores: &[f64],
    count: usize,
    tournament_size: usize,
    rng: &mut R,
) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..scores.len()).collect();
    let mut winners = Vec::with_capacity(count.min(pool.len()));
    while winners.len() < count && !pool.is_empty() {
        let entrants = tournament_size.min(pool.len());
        let picks = rand::seq::index::sample(rng, pool.len(), entrants);
        let best = picks
            .iter()
            .max_by(|&a, &b| {
                scores[pool[a]]
                    .total_cmp(&scores[pool[b]])
                    .then(pool[b].cmp(&pool[a]))
            })
            .expect("tournament has entrants");
        winners.push(pool.swap_remove(best));
    }
    winners
}

/// Per-generation record of a miner run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MinerTrace {
    /// The population after each generation, starting with the truncated
    /// initial population.
    pub populations: Vec<Vec<PartialSolution>>,
    /// Parents selected in each generation.
    pub selected: Vec<Vec<PartialSolution>>,
    /// Evaluations used after each generation.
    pub evals_used: Vec<u64>,
}

impl CatalogMiner for MinerConfig {
    fn mine(&self, pop: &EvaluatedPopulation, stop: &StopRule) -> Result<PsCatalog> {
        self.mine_inner(pop, stop, None)
    }
}

impl MinerConfig {
    /// Like [`CatalogMiner::mine`], also returning the generation history.
    pub fn mine_traced(&self, pop: &EvaluatedPopulation, stop: &StopRule) -> Result<(PsCatalog, MinerTrace)> {
        let mut trace = MinerTrace::default();
        let catalog = self.mine_inner(pop, stop, Some(&mut trace))?;
        Ok((catalog, trace))
    }

    fn mine_inner(
        &self,
        pop: &EvaluatedPopulation,
        stop: &StopRule,
        mut trace: Option<&mut MinerTrace>,
    ) -> Result<PsCatalog> {
        self.validate()?;
        if self.eval_budget == 0 {
            return Ok(PsCatalog::default());
        }
        let space = pop.space();
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        let mut scorer = Scorer::new(pop);

        let mut population = get_init(self.variant, pop, self.population_size);
        let kept = population.len().min(self.population_size);
        let passes = if self.use_archive { 1 } else { 2 };
        if (population.len() + passes * kept) as u64 > self.eval_budget {
            return Ok(PsCatalog::default());
        }
        let mut scores = scorer.score(&population)?;
        let keep = ranking(&scores)
            .into_iter()
            .take(self.population_size)
            .collect::<Vec<_>>();
        population = keep.iter().map(|&i| population[i].clone()).collect();
        scores = keep.iter().map(|&i| scores[i]).collect();
        if let Some(t) = trace.as_deref_mut() {
            t.populations.push(population.clone());
            t.evals_used.push(scorer.used());
        }

        let mut archive: Vec<PartialSolution> = Vec::new();
        let mut archived: HashSet<PartialSolution> = HashSet::new();
        // Without an archive the catalog comes from an all-time best buffer.
        let mut best: Vec<PartialSolution> = Vec::new();
        if !self.use_archive {
            best = scorer.catalog(&population, self.qty_ret)?.patterns().cloned().collect();
        }

        loop {
            let found: HashSet<PartialSolution> = if self.use_archive {
                archived.clone()
            } else {
                best.iter().cloned().collect()
            };
            if stop.satisfied(&found) || population.is_empty() {
                break;
            }

            let selected_idx = tournament_without_replacement(
                &scores,
                self.parents_per_generation(),
                self.tournament_size,
                &mut rng,
            );
            let selected: Vec<PartialSolution> =
                selected_idx.iter().map(|&i| population[i].clone()).collect();
            let newly_archived: Vec<PartialSolution> = if self.use_archive {
                dedup_in_order(selected.iter().filter(|ps| !archived.contains(*ps)).cloned())
            } else {
                Vec::new()
            };
            let excluded: HashSet<&PartialSolution> = newly_archived.iter().collect();
            let localities = selected
                .iter()
                .flat_map(|ps| get_local(self.variant, ps, space));
            let candidates: Vec<PartialSolution> =
                dedup_in_order(population.iter().cloned().chain(localities))
                    .into_iter()
                    .filter(|ps| !archived.contains(ps) && !excluded.contains(ps))
                    .collect();

            // This generation's batch plus every later ranking pass must fit.
            let cost = if self.use_archive {
                candidates.len() + archive.len() + newly_archived.len()
            } else {
                candidates.len() + best.len() + self.population_size + self.qty_ret
            };
            if scorer.used() + cost as u64 > self.eval_budget {
                break;
            }

            if let Some(t) = trace.as_deref_mut() {
                t.selected.push(selected.clone());
            }
            for ps in newly_archived {
                archived.insert(ps.clone());
                archive.push(ps);
            }
            if candidates.is_empty() {
                population.clear();
                if let Some(t) = trace.as_deref_mut() {
                    t.populations.push(Vec::new());
                    t.evals_used.push(scorer.used());
                }
                continue;
            }
            let candidate_scores = scorer.score(&candidates)?;
            let keep: Vec<usize> = ranking(&candidate_scores)
                .into_iter()
                .take(self.population_size)
                .collect();
            population = keep.iter().map(|&i| candidates[i].clone()).collect();
            scores = keep.iter().map(|&i| candidate_scores[i]).collect();
            if let Some(t) = trace.as_deref_mut() {
                t.populations.push(population.clone());
                t.evals_used.push(scorer.used());
            }

            if !self.use_archive {
                let pool = dedup_in_order(best.iter().cloned().chain(population.iter().cloned()));
                best = scorer.catalog(&pool, self.qty_ret)?.patterns().cloned().collect();
            }
        }

        // An archive that never received anything falls back to the scored
        // initial population.
        if self.use_archive && archive.is_empty() {
            return scorer.catalog(&population, self.qty_ret);
        }
        let pool = if self.use_archive { &archive } else { &best };
        scorer.catalog(pool, self.qty_ret)
    }
}
