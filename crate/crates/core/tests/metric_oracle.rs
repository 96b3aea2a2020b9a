//! Every metric checked against a direct transcription of its definition on
//! exhaustive pattern sets over small spaces.

#[path = "common/oracle.rs"]
mod oracle;

use oracle::{all_patterns, check_population, random_population, Naive, TOL};
use pscatalog_core::metrics;
use pscatalog_core::{
    BenchmarkProblem, EvaluatedPopulation, FullSolution, PartialSolution, ProblemKind, ProblemSpec, SearchSpace,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn binary_spaces_match_the_definitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=6 {
        for &size in &[1usize, 2, 7, 33, 64] {
            let space = SearchSpace::binary(n);
            let members = random_population(&space, size, &mut rng);
            let real: Vec<f64> = (0..size).map(|_| rng.random_range(-5.0..20.0)).collect();
            check_population(&space, members.clone(), real).unwrap();
            let integer: Vec<f64> = (0..size).map(|_| rng.random_range(0..4) as f64).collect();
            check_population(&space, members, integer).unwrap();
        }
    }
}

#[test]
fn constant_and_duplicate_populations() {
    let space = SearchSpace::binary(4);
    let x: FullSolution = "0110".parse().unwrap();
    check_population(&space, vec![x.clone(); 10], vec![3.0; 10]).unwrap();
    let members: Vec<FullSolution> = ["0110", "0110", "1111", "0000"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    check_population(&space, members, vec![1.0, 1.0, 5.0, 0.0]).unwrap();
}

#[test]
fn non_binary_spaces_match_the_definitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for cards in [vec![3, 2, 4], vec![3, 3, 3, 2], vec![5, 2]] {
        let space = SearchSpace::new(cards).unwrap();
        let members = random_population(&space, 64, &mut rng);
        let raw: Vec<f64> = (0..64).map(|_| rng.random_range(0.0..1.0)).collect();
        check_population(&space, members, raw).unwrap();
    }
}

fn unshuffled_royal_road(num_groups: usize) -> BenchmarkProblem {
    BenchmarkProblem::from_spec(ProblemSpec {
        name: ProblemKind::RoyalRoad,
        k: 4,
        num_groups,
        length: 4 * num_groups,
        seed: 0,
        permutation: (0..4 * num_groups).collect(),
        groups: (0..num_groups).map(|g| (4 * g..4 * g + 4).collect()).collect(),
    })
    .unwrap()
}

fn enumerated(problem: &BenchmarkProblem) -> EvaluatedPopulation {
    let members: Vec<FullSolution> = problem.space().enumerate().collect();
    EvaluatedPopulation::evaluate(problem.space().clone(), members, |x| problem.fitness(x)).unwrap()
}

#[test]
fn complete_group_has_mean_fitness_one() {
    let rr = unshuffled_royal_road(1);
    let pop = enumerated(&rr);
    let ones: PartialSolution = "1111".parse().unwrap();
    assert_eq!(metrics::mean_fitness(&pop, &ones).unwrap(), 1.0);
}

#[test]
fn cross_group_cells_contribute_less() {
    let rr = unshuffled_royal_road(2);
    let pop = enumerated(&rr);
    let members: Vec<FullSolution> = rr.space().enumerate().collect();
    let raw: Vec<f64> = members.iter().map(|x| rr.fitness(x)).collect();
    let naive = Naive::new(&members, &raw);

    let group: PartialSolution = "1111****".parse().unwrap();
    let within: Vec<f64> = (0..4).map(|k| naive.contribution(&group, k)).collect();
    assert!(within.iter().all(|&c| c > 0.0), "{within:?}");
    for (k, &c) in within.iter().enumerate() {
        assert!((metrics::contribution(&pop, &group, k).unwrap() - c).abs() <= TOL);
    }

    let spanning: PartialSolution = "1111***1".parse().unwrap();
    let stray = naive.contribution(&spanning, 7);
    for k in 0..4 {
        assert!(stray <= naive.contribution(&spanning, k));
    }
    assert!((metrics::contribution(&pop, &spanning, 7).unwrap() - stray).abs() <= TOL);
    assert!(naive.atomicity(&group) > naive.atomicity(&spanning));
    assert!(metrics::atomicity(&pop, &group).unwrap() > metrics::atomicity(&pop, &spanning).unwrap());
}

#[test]
fn aggregate_ranking_is_invariant_under_affine_fitness_changes() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let space = SearchSpace::binary(6);
    let members = random_population(&space, 64, &mut rng);
    let raw: Vec<f64> = (0..64).map(|_| rng.random_range(0.0..10.0)).collect();
    let shifted: Vec<f64> = raw.iter().map(|f| 3.5 * f - 40.0).collect();
    let a = EvaluatedPopulation::new(space.clone(), members.clone(), raw).unwrap();
    let b = EvaluatedPopulation::new(space.clone(), members, shifted).unwrap();
    let batch = all_patterns(&space);
    let sa = metrics::aggregate_scores(&a, &batch).unwrap();
    let sb = metrics::aggregate_scores(&b, &batch).unwrap();
    for (x, y) in sa.iter().zip(&sb) {
        assert!((x - y).abs() <= 1e-9);
    }
}
