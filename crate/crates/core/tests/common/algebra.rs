//! Algebraic properties of partial solutions, as reusable strategies and
//! property checks.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use pscatalog_core::metrics;
use pscatalog_core::{EvaluatedPopulation, FullSolution, PartialSolution, SearchSpace};

pub fn cell() -> impl Strategy<Value = Option<u32>> {
    prop_oneof![Just(None), (0u32..2).prop_map(Some)]
}

pub fn pattern(n: usize) -> impl Strategy<Value = PartialSolution> {
    proptest::collection::vec(cell(), n).prop_map(PartialSolution::new)
}

/// `count` binary patterns sharing one length in `1..=8`.
pub fn patterns(count: usize) -> impl Strategy<Value = Vec<PartialSolution>> {
    (1usize..=8).prop_flat_map(move |n| proptest::collection::vec(pattern(n), count))
}

pub fn solution(n: usize) -> impl Strategy<Value = FullSolution> {
    proptest::collection::vec(0u32..2, n).prop_map(FullSolution::new)
}

/// A population of up to 32 members over `2..=6` binary variables, its
/// fitness, and two patterns.
pub fn population_and_pair() -> impl Strategy<Value = (Vec<FullSolution>, Vec<f64>, Vec<PartialSolution>)> {
    (2usize..=6).prop_flat_map(|n| {
        (
            proptest::collection::vec(solution(n), 1..=32),
            proptest::collection::vec(-10.0f64..10.0, 32),
            proptest::collection::vec(pattern(n), 2),
        )
    })
}

fn every_solution(n: usize) -> impl Iterator<Item = FullSolution> {
    (0u32..1 << n).map(move |bits| FullSolution::new((0..n).map(|i| (bits >> i) & 1).collect()))
}

pub fn universal_is_the_identity(a: &PartialSolution) -> Result<(), TestCaseError> {
    let u = PartialSolution::universal(a.len());
    prop_assert_eq!(&a.merge(&u).unwrap(), a);
    prop_assert_eq!(&u.merge(a).unwrap(), a);
    Ok(())
}

pub fn merge_commutes_and_associates(ps: &[PartialSolution]) -> Result<(), TestCaseError> {
    let (a, b, c) = (&ps[0], &ps[1], &ps[2]);
    prop_assert_eq!(a.mergeable(b), b.mergeable(a));
    if a.mergeable(b) {
        prop_assert_eq!(a.merge(b).unwrap(), b.merge(a).unwrap());
    } else {
        prop_assert!(a.merge(b).is_err());
    }
    if a.mergeable(b) && b.mergeable(c) && a.mergeable(c) {
        let left = a.merge(b).unwrap().merge(c).unwrap();
        let right = a.merge(&b.merge(c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }
    Ok(())
}

pub fn containment_of_a_merge_is_a_conjunction(a: &PartialSolution, b: &PartialSolution) -> Result<(), TestCaseError> {
    if a.mergeable(b) {
        let m = a.merge(b).unwrap();
        for x in every_solution(a.len()) {
            prop_assert_eq!(
                x.contains(&m).unwrap(),
                x.contains(a).unwrap() && x.contains(b).unwrap()
            );
        }
    } else {
        for x in every_solution(a.len()) {
            prop_assert!(!(x.contains(a).unwrap() && x.contains(b).unwrap()));
        }
    }
    Ok(())
}

pub fn isolate_and_exclude_partition(a: &PartialSolution) -> Result<(), TestCaseError> {
    for (k, _) in a.fixed() {
        let isolated = a.isolate(k).unwrap();
        let excluded = a.exclude(k).unwrap();
        prop_assert_eq!(isolated.fixed_count(), 1);
        prop_assert_eq!(excluded.simplicity(), a.simplicity() + 1);
        prop_assert_eq!(&isolated.merge(&excluded).unwrap(), a);
    }
    Ok(())
}

pub fn full_round_trip(x: &FullSolution) -> Result<(), TestCaseError> {
    let ps = PartialSolution::from_full(x);
    prop_assert_eq!(ps.simplicity(), 0);
    prop_assert!(x.contains(&ps).unwrap());
    prop_assert_eq!(&ps.to_full().unwrap(), x);
    prop_assert_eq!(ps.to_string().parse::<PartialSolution>().unwrap(), ps);
    Ok(())
}

pub fn benefit_never_grows_under_merge(
    members: Vec<FullSolution>,
    fitness: &[f64],
    a: &PartialSolution,
    b: &PartialSolution,
) -> Result<(), TestCaseError> {
    let n = members[0].len();
    let raw = fitness[..members.len()].to_vec();
    let pop = EvaluatedPopulation::new(SearchSpace::binary(n), members, raw).unwrap();
    let ba = metrics::benefit(&pop, a).unwrap();
    let bb = metrics::benefit(&pop, b).unwrap();
    prop_assert!((-1e-12..=1.0 + 1e-9).contains(&ba));
    if a.mergeable(b) {
        let bm = metrics::benefit(&pop, &a.merge(b).unwrap()).unwrap();
        prop_assert!(bm <= ba.min(bb) + 1e-12);
    }
    Ok(())
}
