//! Pick-and-merge: builds full solutions from a catalog without calling the
//! fitness function.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::CatalogEntry;
use crate::error::{Error, Result};
use crate::space::{FullSolution, PartialSolution, SearchSpace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub merge_limit: usize,
    pub rng_seed: u64,
}

impl GeneratorConfig {
    /// Merge limit `ceil(sqrt(n))`.
    pub fn for_length(n: usize, rng_seed: u64) -> Self {
        Self {
            merge_limit: ceil_sqrt(n).max(1),
            rng_seed,
        }
    }
}

fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

/// Index drawn with probability proportional to `weights`; uniform when all
/// weights are zero.
pub fn weighted_random_choice<R: Rng>(weights: &[f64], rng: &mut R) -> Result<usize> {
    if weights.is_empty() {
        return Err(Error::InvalidConfig("cannot choose from an empty set".into()));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidConfig("weights must be finite and non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Ok(rng.random_range(0..weights.len()));
    }
    let mut target = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if target < w {
            return Ok(i);
        }
        target -= w;
    }
    // Rounding left a sliver past the last positive weight.
    Ok(weights.iter().rposition(|&w| w > 0.0).expect("total > 0"))
}

/// Draws catalog entries without replacement, merging each compatible one
/// until `merge_limit` merges succeed or the catalog is exhausted.
pub fn merge_from<R: Rng>(
    catalog: &[CatalogEntry],
    n: usize,
    merge_limit: usize,
    rng: &mut R,
) -> Result<PartialSolution> {
    let mut available: Vec<&CatalogEntry> = catalog.iter().collect();
    let mut weights: Vec<f64> = available.iter().map(|e| e.score).collect();
    let mut merged = PartialSolution::universal(n);
    let mut added = 0;
    while !available.is_empty() && added < merge_limit {
        let pick = weighted_random_choice(&weights, rng)?;
        let entry = available.remove(pick);
        weights.remove(pick);
        if merged.mergeable(&entry.pattern) {
            merged = merged.merge(&entry.pattern)?;
            added += 1;
        } else if entry.pattern.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: entry.pattern.len(),
            });
        }
    }
    Ok(merged)
}

/// Replaces every wildcard with a uniform random value.
pub fn fill_gaps<R: Rng>(ps: &PartialSolution, space: &SearchSpace, rng: &mut R) -> Result<FullSolution> {
    space.check_partial(ps)?;
    let values = ps
        .cells()
        .iter()
        .enumerate()
        .map(|(i, cell)| cell.unwrap_or_else(|| rng.random_range(0..space.cardinality(i))))
        .collect();
    Ok(FullSolution::new(values))
}

/// `count` independent pick-and-merge samples.
pub fn generate(
    catalog: &[CatalogEntry],
    space: &SearchSpace,
    cfg: &GeneratorConfig,
    count: usize,
) -> Result<Vec<FullSolution>> {
    if cfg.merge_limit == 0 {
        return Err(Error::InvalidConfig("merge_limit must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    (0..count)
        .map(|_| {
            let merged = merge_from(catalog, space.len(), cfg.merge_limit, &mut rng)?;
            fill_gaps(&merged, space, &mut rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::MetricTriple;

    fn entry(pattern: &str, score: f64) -> CatalogEntry {
        let pattern: PartialSolution = pattern.parse().unwrap();
        CatalogEntry {
            metrics: MetricTriple {
                simplicity: pattern.simplicity(),
                mean_fitness: 0.0,
                atomicity: 0.0,
            },
            pattern,
            score,
        }
    }

    #[test]
    fn ceil_sqrt_values() {
        assert_eq!(ceil_sqrt(20), 5);
        assert_eq!(ceil_sqrt(25), 5);
        assert_eq!(ceil_sqrt(15), 4);
        assert_eq!(ceil_sqrt(16), 4);
        assert_eq!(ceil_sqrt(1), 1);
    }

    #[test]
    fn weighted_choice_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(weighted_random_choice(&[0.3], &mut rng).unwrap(), 0);
        for _ in 0..100 {
            assert_eq!(weighted_random_choice(&[1.0, 0.0], &mut rng).unwrap(), 0);
        }
        assert!(weighted_random_choice(&[], &mut rng).is_err());
        assert!(weighted_random_choice(&[-1.0, 2.0], &mut rng).is_err());
        let zeros: Vec<usize> = (0..1000)
            .map(|_| weighted_random_choice(&[0.0, 0.0], &mut rng).unwrap())
            .collect();
        assert!(zeros.contains(&0) && zeros.contains(&1));
    }

    #[test]
    fn weighted_choice_frequency() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws = 10_000;
        let second = (0..draws)
            .filter(|_| weighted_random_choice(&[1.0, 3.0], &mut rng).unwrap() == 1)
            .count();
        let freq = second as f64 / draws as f64;
        assert!((freq - 0.75).abs() <= 0.02, "{freq}");
    }

    #[test]
    fn merge_from_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let both = [entry("1***", 0.5), entry("*1**", 0.5)];
        assert_eq!(merge_from(&both, 4, 2, &mut rng).unwrap(), "11**".parse().unwrap());
        let conflict = [entry("1***", 0.5), entry("0***", 0.5)];
        for _ in 0..20 {
            let m = merge_from(&conflict, 4, 2, &mut rng).unwrap().to_string();
            assert!(m == "1***" || m == "0***");
        }
        assert_eq!(
            merge_from(&[], 4, 2, &mut rng).unwrap(),
            PartialSolution::universal(4)
        );
        let three = [entry("1***", 1.0), entry("*1**", 1.0), entry("**1*", 1.0)];
        let limited = merge_from(&three, 4, 2, &mut rng).unwrap();
        assert_eq!(limited.fixed_count(), 2);
    }

    #[test]
    fn fill_gaps_preserves_fixed_cells() {
        let space = SearchSpace::binary(3);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let fixed: PartialSolution = "101".parse().unwrap();
        assert_eq!(fill_gaps(&fixed, &space, &mut rng).unwrap(), fixed.to_full().unwrap());
        for _ in 0..50 {
            let x = fill_gaps(&"1*1".parse().unwrap(), &space, &mut rng).unwrap().to_string();
            assert!(x == "101" || x == "111");
        }
    }

    #[test]
    fn fill_gaps_frequency() {
        let space = SearchSpace::binary(1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = 10_000;
        let ones = (0..draws)
            .filter(|_| fill_gaps(&PartialSolution::universal(1), &space, &mut rng).unwrap().get(0) == 1)
            .count();
        assert!((ones as f64 / draws as f64 - 0.5).abs() <= 0.02);
    }

    #[test]
    fn generate_count_and_determinism() {
        let space = SearchSpace::binary(4);
        let cfg = GeneratorConfig::for_length(4, 11);
        let catalog = [entry("11**", 0.9), entry("**0*", 0.4)];
        assert!(generate(&catalog, &space, &cfg, 0).unwrap().is_empty());
        let a = generate(&catalog, &space, &cfg, 30).unwrap();
        let b = generate(&catalog, &space, &cfg, 30).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 30);
    }
}
