//! Partial-solution mining for explainable combinatorial optimisation.
//!
//! A reference population of evaluated full solutions is mined for a catalog
//! of partial solutions that are simple, associated with high fitness and
//! atomic. The catalog explains solutions (which patterns a solution
//! contains, which patterns conflict) and doubles as a sampling model:
//! pick-and-merge assembles new full solutions from it.

pub mod baselines;
pub mod benchmarks;
pub mod bitset;
pub mod budget;
pub mod catalog;
pub mod error;
pub mod explain;
pub mod generator;
pub mod harness;
pub mod metrics;
pub mod miner;
pub mod population;
pub mod seeds;
pub mod space;

pub use benchmarks::{catalog_contains_all_targets, BenchmarkProblem, ProblemKind, ProblemSpec};
pub use budget::{CountingFitness, Fitness};
pub use catalog::{CatalogEntry, PsCatalog};
pub use error::{Error, Result};
pub use generator::GeneratorConfig;
pub use metrics::MetricTriple;
pub use miner::{CatalogMiner, LocalSearch, MinerConfig, MinerTrace, StopRule};
pub use population::EvaluatedPopulation;
pub use space::{FullSolution, PartialSolution, SearchSpace};
