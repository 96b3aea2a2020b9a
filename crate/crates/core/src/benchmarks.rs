//! Royal Road, Royal Road with Overlaps and Trap-k, each with its variable
//! positions shuffled and its known set of target partial solutions.

use std::fmt;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::budget::Fitness;
use crate::error::{Error, Result};
use crate::space::{FullSolution, PartialSolution, SearchSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    RoyalRoad,
    RoyalRoadOverlaps,
    TrapK,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [
        ProblemKind::RoyalRoad,
        ProblemKind::RoyalRoadOverlaps,
        ProblemKind::TrapK,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            ProblemKind::RoyalRoad => "RR",
            ProblemKind::RoyalRoadOverlaps => "RRO",
            ProblemKind::TrapK => "Trap-k",
        }
    }

    /// The default instance used throughout the experiments.
    pub fn instantiate(self, seed: u64) -> Result<BenchmarkProblem> {
        match self {
            ProblemKind::RoyalRoad => BenchmarkProblem::royal_road(4, 5, seed),
            ProblemKind::RoyalRoadOverlaps => BenchmarkProblem::royal_road_overlaps(4, 5, 15, seed),
            ProblemKind::TrapK => BenchmarkProblem::trap_k(5, 5, seed),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rr" | "royal-road" => Ok(ProblemKind::RoyalRoad),
            "rro" | "royal-road-overlaps" => Ok(ProblemKind::RoyalRoadOverlaps),
            "trap" | "trap-k" | "trapk" => Ok(ProblemKind::TrapK),
            other => Err(Error::Parse(format!("unknown problem {other:?}"))),
        }
    }
}

/// Replayable description of a problem instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub name: ProblemKind,
    /// Group size.
    pub k: usize,
    pub num_groups: usize,
    /// Number of variables.
    pub length: usize,
    pub seed: u64,
    pub permutation: Vec<usize>,
    pub groups: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct BenchmarkProblem {
    spec: ProblemSpec,
    space: SearchSpace,
    targets: Vec<PartialSolution>,
    optimum: f64,
}

/// Trap sub-function over the unitation `u` of a group of size `k`.
pub fn trap_sub_fitness(u: usize, k: usize) -> f64 {
    if u == k {
        k as f64
    } else {
        (k - u - 1) as f64
    }
}

impl BenchmarkProblem {
    /// `num_groups` disjoint groups of `k` shuffled positions; fitness counts
    /// the groups that are all ones.
    pub fn royal_road(k: usize, num_groups: usize, seed: u64) -> Result<Self> {
        let (permutation, groups) = shuffled_groups(k, num_groups, seed)?;
        Self::from_spec(ProblemSpec {
            name: ProblemKind::RoyalRoad,
            k,
            num_groups,
            length: k * num_groups,
            seed,
            permutation,
            groups,
        })
    }

    /// `q` distinct random groups of `k` positions over `length` variables;
    /// fitness counts the groups that are all zeros.
    pub fn royal_road_overlaps(k: usize, q: usize, length: usize, seed: u64) -> Result<Self> {
        if k == 0 || q == 0 || k > length {
            return Err(Error::Construction(format!(
                "need 0 < k <= length, got k={k}, q={q}, length={length}"
            )));
        }
        if length > 24 {
            return Err(Error::Construction(
                "overlapping royal road enumerates its optimum; length must be <= 24".into(),
            ));
        }
        if binomial(length, k) < q as u128 {
            return Err(Error::Construction(format!(
                "cannot place {q} distinct groups of {k} among {length} positions"
            )));
        }
        const ATTEMPTS: u64 = 8;
        const DRAWS_PER_ATTEMPT: usize = 10_000;
        let positions: Vec<usize> = (0..length).collect();
        for stream in 0..ATTEMPTS {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let mut groups: Vec<Vec<usize>> = Vec::with_capacity(q);
            for _ in 0..DRAWS_PER_ATTEMPT {
                if groups.len() == q {
                    break;
                }
                let mut group: Vec<usize> = positions.choose_multiple(&mut rng, k).copied().collect();
                group.sort_unstable();
                if !groups.contains(&group) {
                    groups.push(group);
                }
            }
            if groups.len() == q {
                return Self::from_spec(ProblemSpec {
                    name: ProblemKind::RoyalRoadOverlaps,
                    k,
                    num_groups: q,
                    length,
                    seed,
                    permutation: positions,
                    groups,
                });
            }
        }
        Err(Error::Construction(format!(
            "failed to sample {q} distinct groups after {ATTEMPTS} attempts"
        )))
    }

    /// `num_groups` disjoint deceptive traps of `k` shuffled positions.
    pub fn trap_k(k: usize, num_groups: usize, seed: u64) -> Result<Self> {
        let (permutation, groups) = shuffled_groups(k, num_groups, seed)?;
        Self::from_spec(ProblemSpec {
            name: ProblemKind::TrapK,
            k,
            num_groups,
            length: k * num_groups,
            seed,
            permutation,
            groups,
        })
    }

    /// Rebuilds a problem from its serialized description.
    pub fn from_spec(spec: ProblemSpec) -> Result<Self> {
        if spec.groups.len() != spec.num_groups || spec.length == 0 {
            return Err(Error::Construction("group count does not match".into()));
        }
        for group in &spec.groups {
            if group.len() != spec.k || group.iter().any(|&p| p >= spec.length) {
                return Err(Error::Construction(format!("invalid group {group:?}")));
            }
        }
        let space = SearchSpace::binary(spec.length);
        let target_value = match spec.name {
            ProblemKind::RoyalRoadOverlaps => 0,
            ProblemKind::RoyalRoad | ProblemKind::TrapK => 1,
        };
        let targets = spec
            .groups
            .iter()
            .map(|group| {
                let mut cells = vec![None; spec.length];
                for &p in group {
                    cells[p] = Some(target_value);
                }
                PartialSolution::new(cells)
            })
            .collect();
        let mut problem = Self {
            spec,
            space,
            targets,
            optimum: 0.0,
        };
        problem.optimum = match problem.spec.name {
            ProblemKind::RoyalRoad => problem.spec.num_groups as f64,
            ProblemKind::TrapK => (problem.spec.num_groups * problem.spec.k) as f64,
            ProblemKind::RoyalRoadOverlaps => {
                if problem.spec.length > 24 {
                    return Err(Error::Construction("length must be <= 24".into()));
                }
                problem
                    .space
                    .enumerate()
                    .map(|x| problem.fitness(&x))
                    .fold(f64::NEG_INFINITY, f64::max)
            }
        };
        Ok(problem)
    }

    pub fn kind(&self) -> ProblemKind {
        self.spec.name
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn targets(&self) -> &[PartialSolution] {
        &self.targets
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.spec.groups
    }

    pub fn permutation(&self) -> &[usize] {
        &self.spec.permutation
    }

    pub fn optimum_fitness(&self) -> f64 {
        self.optimum
    }

    pub fn fitness(&self, x: &FullSolution) -> f64 {
        let v = x.values();
        match self.spec.name {
            ProblemKind::RoyalRoad => self
                .spec
                .groups
                .iter()
                .filter(|g| g.iter().all(|&p| v[p] == 1))
                .count() as f64,
            ProblemKind::RoyalRoadOverlaps => self
                .spec
                .groups
                .iter()
                .filter(|g| g.iter().all(|&p| v[p] == 0))
                .count() as f64,
            ProblemKind::TrapK => self
                .spec
                .groups
                .iter()
                .map(|g| {
                    let u = g.iter().filter(|&&p| v[p] == 1).count();
                    trap_sub_fitness(u, self.spec.k)
                })
                .sum(),
        }
    }

    pub fn is_global_optimum(&self, x: &FullSolution) -> bool {
        self.fitness(x) >= self.optimum
    }
}

impl Fitness for BenchmarkProblem {
    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn evaluate(&self, x: &FullSolution) -> f64 {
        self.fitness(x)
    }
}

/// True when every target pattern appears in `catalog`.
pub fn catalog_contains_all_targets<'a>(
    catalog: impl IntoIterator<Item = &'a PartialSolution>,
    problem: &BenchmarkProblem,
) -> bool {
    let found: std::collections::HashSet<&PartialSolution> = catalog.into_iter().collect();
    problem.targets().iter().all(|t| found.contains(t))
}

fn shuffled_groups(k: usize, num_groups: usize, seed: u64) -> Result<(Vec<usize>, Vec<Vec<usize>>)> {
    if k == 0 || num_groups == 0 {
        return Err(Error::Construction("k and the group count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut permutation: Vec<usize> = (0..k * num_groups).collect();
    permutation.shuffle(&mut rng);
    let groups = permutation
        .chunks(k)
        .map(|chunk| {
            let mut g = chunk.to_vec();
            g.sort_unstable();
            g
        })
        .collect();
    Ok((permutation, groups))
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solution_with_groups(problem: &BenchmarkProblem, ones: &[usize]) -> FullSolution {
        let mut v = vec![0u32; problem.space().len()];
        for &g in ones {
            for &p in &problem.groups()[g] {
                v[p] = 1;
            }
        }
        FullSolution::new(v)
    }

    #[test]
    fn royal_road_values() {
        let rr = BenchmarkProblem::royal_road(4, 5, 7).unwrap();
        assert_eq!(rr.space().len(), 20);
        assert_eq!(rr.fitness(&FullSolution::new(vec![1; 20])), 5.0);
        assert_eq!(rr.fitness(&FullSolution::new(vec![0; 20])), 0.0);
        assert_eq!(rr.fitness(&solution_with_groups(&rr, &[2])), 1.0);
        assert_eq!(rr.targets().len(), 5);
        assert!(rr.is_global_optimum(&FullSolution::new(vec![1; 20])));
        assert!(!rr.is_global_optimum(&solution_with_groups(&rr, &[0, 1, 2, 3])));
    }

    #[test]
    fn trap_values() {
        assert_eq!(trap_sub_fitness(5, 5), 5.0);
        assert_eq!(trap_sub_fitness(0, 5), 4.0);
        let trap = BenchmarkProblem::trap_k(5, 5, 3).unwrap();
        assert_eq!(trap.fitness(&FullSolution::new(vec![0; 25])), 20.0);
        assert_eq!(trap.fitness(&FullSolution::new(vec![1; 25])), 25.0);
        for u in 0..4 {
            assert!(trap_sub_fitness(u, 5) > trap_sub_fitness(u + 1, 5));
        }
    }

    #[test]
    fn overlap_values() {
        let rro = BenchmarkProblem::royal_road_overlaps(4, 5, 15, 11).unwrap();
        assert_eq!(rro.fitness(&FullSolution::new(vec![0; 15])), 5.0);
        assert_eq!(rro.optimum_fitness(), 5.0);
        let mut v = vec![0u32; 15];
        for &p in &rro.groups()[0] {
            v[p] = 1;
        }
        assert!(rro.fitness(&FullSolution::new(v)) <= 4.0);
        let distinct: std::collections::HashSet<_> = rro.groups().iter().collect();
        assert_eq!(distinct.len(), 5);
    }

    #[test]
    fn impossible_overlap_instance_is_rejected() {
        assert!(BenchmarkProblem::royal_road_overlaps(2, 4, 3, 0).is_err());
        assert!(BenchmarkProblem::royal_road_overlaps(5, 1, 4, 0).is_err());
    }

    #[test]
    fn groups_partition_positions() {
        let trap = BenchmarkProblem::trap_k(5, 5, 99).unwrap();
        let mut all: Vec<usize> = trap.groups().iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..25).collect::<Vec<_>>());
    }

    #[test]
    fn spec_round_trips_through_json() {
        let rro = BenchmarkProblem::royal_road_overlaps(4, 5, 15, 5).unwrap();
        let json = serde_json::to_string(rro.spec()).unwrap();
        let back = BenchmarkProblem::from_spec(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.targets(), rro.targets());
        assert_eq!(back.optimum_fitness(), rro.optimum_fitness());
    }

    #[test]
    fn target_containment() {
        let rr = BenchmarkProblem::royal_road(4, 5, 1).unwrap();
        let targets = rr.targets().to_vec();
        assert!(catalog_contains_all_targets(&targets, &rr));
        assert!(!catalog_contains_all_targets(&targets[1..], &rr));
        let mut superset = targets.clone();
        superset.push(PartialSolution::universal(20));
        assert!(catalog_contains_all_targets(&superset, &rr));
    }
}
