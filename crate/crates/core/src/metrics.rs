//! Simplicity, mean fitness and atomicity of partial solutions, and the
//! batch-relative aggregate score used to rank them.
//!
//! Observation sets are intersections of the population's per-cell masks.
//! Atomicity needs the benefit of `exclude(ps, k)` for every fixed `k`; those
//! come from prefix and suffix intersections so a pattern with `m` fixed cells
//! costs `O(m)` mask passes instead of `O(m²)`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::population::EvaluatedPopulation;
use crate::space::PartialSolution;

/// Mean fitness of a pattern with no observations. Sorts below every real
/// value and remaps to 0 in [`aggregate`].
pub const WORST: f64 = f64::NEG_INFINITY;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricTriple {
    pub simplicity: usize,
    /// Raw-fitness units, or [`WORST`].
    #[serde(with = "worst_as_null")]
    pub mean_fitness: f64,
    /// Nats; may be negative.
    pub atomicity: f64,
}

mod worst_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
        if value.is_finite() {
            s.serialize_f64(*value)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(super::WORST))
    }
}

pub fn simplicity(ps: &PartialSolution) -> usize {
    ps.simplicity()
}

/// Average raw fitness over the observations of `ps`, or [`WORST`].
pub fn mean_fitness(pop: &EvaluatedPopulation, ps: &PartialSolution) -> Result<f64> {
    pop.check_len(ps)?;
    let (_, raw, count) = observation_sums(pop, ps);
    Ok(if count == 0 { WORST } else { raw / count as f64 })
}

/// Sum of normalized fitness over the observations of `ps`.
pub fn benefit(pop: &EvaluatedPopulation, ps: &PartialSolution) -> Result<f64> {
    pop.check_len(ps)?;
    Ok(observation_sums(pop, ps).0)
}

/// Mutual-information style dependence of fixed cell `k` on the rest of `ps`.
pub fn contribution(pop: &EvaluatedPopulation, ps: &PartialSolution, k: usize) -> Result<f64> {
    pop.check_len(ps)?;
    let isolated = ps.isolate(k)?;
    let excluded = ps.exclude(k)?;
    Ok(contribution_from(
        benefit(pop, ps)?,
        benefit(pop, &isolated)?,
        benefit(pop, &excluded)?,
    ))
}

/// Minimum contribution over the fixed cells; 0 for the universal pattern.
pub fn atomicity(pop: &EvaluatedPopulation, ps: &PartialSolution) -> Result<f64> {
    Ok(metrics(pop, ps)?.atomicity)
}

/// `p_ab · ln(p_ab / (p_a · p_b))`, or 0 when any benefit is zero.
pub(crate) fn contribution_from(p_ab: f64, p_a: f64, p_b: f64) -> f64 {
    if p_ab <= 0.0 || p_a <= 0.0 || p_b <= 0.0 {
        0.0
    } else {
        p_ab * (p_ab / (p_a * p_b)).ln()
    }
}

fn observation_sums(pop: &EvaluatedPopulation, ps: &PartialSolution) -> (f64, f64, usize) {
    match pop.observation_mask(ps) {
        None => (pop.total_norm(), pop.total_raw(), pop.len()),
        Some(mask) => sum_words(mask.words(), pop.norm_fitness(), pop.raw_fitness()),
    }
}

#[inline]
fn sum_words(words: &[u64], norm: &[f64], raw: &[f64]) -> (f64, f64, usize) {
    let mut benefit = 0.0;
    let mut raw_sum = 0.0;
    let mut count = 0;
    for (wi, &word) in words.iter().enumerate() {
        let mut w = word;
        while w != 0 {
            let i = wi * 64 + w.trailing_zeros() as usize;
            benefit += norm[i];
            raw_sum += raw[i];
            count += 1;
            w &= w - 1;
        }
    }
    (benefit, raw_sum, count)
}

#[inline]
fn sum_norm_and(a: &[u64], b: &[u64], norm: &[f64]) -> f64 {
    let mut total = 0.0;
    for (wi, (&x, &y)) in a.iter().zip(b).enumerate() {
        let mut w = x & y;
        while w != 0 {
            total += norm[wi * 64 + w.trailing_zeros() as usize];
            w &= w - 1;
        }
    }
    total
}

#[inline]
fn sum_norm(a: &[u64], norm: &[f64]) -> f64 {
    sum_words(a, norm, norm).0
}

/// All three metrics in one pass over the masks.
pub fn metrics(pop: &EvaluatedPopulation, ps: &PartialSolution) -> Result<MetricTriple> {
    pop.check_len(ps)?;
    let simplicity = ps.simplicity();
    let fixed: Vec<(usize, u32)> = ps.fixed().collect();
    let m = fixed.len();

    if m == 0 {
        return Ok(MetricTriple {
            simplicity,
            mean_fitness: pop.total_raw() / pop.len() as f64,
            atomicity: 0.0,
        });
    }
    if m == 1 {
        let (p, v) = fixed[0];
        let count = pop.mask_count(p, v);
        let p_ab = pop.mask_benefit(p, v);
        return Ok(MetricTriple {
            simplicity,
            mean_fitness: if count == 0 {
                WORST
            } else {
                pop.mask_raw_sum(p, v) / count as f64
            },
            atomicity: contribution_from(p_ab, p_ab, pop.total_norm()),
        });
    }

    let words = pop.mask(fixed[0].0, fixed[0].1).words().len();
    // prefix[i] = masks[0] & .. & masks[i]; suffix[i] = masks[i] & .. & masks[m-1]
    let mut prefix = vec![0u64; m * words];
    let mut suffix = vec![0u64; m * words];
    prefix[..words].copy_from_slice(pop.mask(fixed[0].0, fixed[0].1).words());
    for i in 1..m {
        let mask = pop.mask(fixed[i].0, fixed[i].1).words();
        let (done, rest) = prefix.split_at_mut(i * words);
        let prev = &done[(i - 1) * words..];
        for ((dst, &a), &b) in rest[..words].iter_mut().zip(prev).zip(mask) {
            *dst = a & b;
        }
    }
    let full = &prefix[(m - 1) * words..];
    let norm = pop.norm_fitness();
    let (p_ab, raw_sum, count) = sum_words(full, norm, pop.raw_fitness());
    if count == 0 {
        return Ok(MetricTriple {
            simplicity,
            mean_fitness: WORST,
            atomicity: 0.0,
        });
    }

    suffix[(m - 1) * words..].copy_from_slice(pop.mask(fixed[m - 1].0, fixed[m - 1].1).words());
    for i in (0..m - 1).rev() {
        let mask = pop.mask(fixed[i].0, fixed[i].1).words();
        let (head, tail) = suffix.split_at_mut((i + 1) * words);
        for ((dst, &a), &b) in head[i * words..].iter_mut().zip(&tail[..words]).zip(mask) {
            *dst = a & b;
        }
    }

    let mut atomicity = f64::INFINITY;
    for (k, &(p, v)) in fixed.iter().enumerate() {
        let p_b = if k == 0 {
            sum_norm(&suffix[words..2 * words], norm)
        } else if k == m - 1 {
            sum_norm(&prefix[(m - 2) * words..(m - 1) * words], norm)
        } else {
            sum_norm_and(
                &prefix[(k - 1) * words..k * words],
                &suffix[(k + 1) * words..(k + 2) * words],
                norm,
            )
        };
        let c = contribution_from(p_ab, pop.mask_benefit(p, v), p_b);
        atomicity = atomicity.min(c);
    }

    Ok(MetricTriple {
        simplicity,
        mean_fitness: raw_sum / count as f64,
        atomicity,
    })
}

/// Min-max remaps `values` into `[0, 1]`. Non-finite entries map to 0 and
/// are ignored when finding the range; a constant column maps to 0.5.
pub fn remap(values: &[f64]) -> Vec<f64> {
    let (lo, hi) = values
        .iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    values
        .iter()
        .map(|&v| {
            if !v.is_finite() {
                0.0
            } else if hi > lo {
                (v - lo) / (hi - lo)
            } else {
                0.5
            }
        })
        .collect()
}

/// Per-item mean of the three remapped metrics, relative to this batch.
pub fn aggregate(batch: &[MetricTriple]) -> Vec<f64> {
    let column = |f: fn(&MetricTriple) -> f64| remap(&batch.iter().map(f).collect::<Vec<_>>());
    let s = column(|t| t.simplicity as f64);
    let m = column(|t| t.mean_fitness);
    let a = column(|t| t.atomicity);
    s.iter()
        .zip(&m)
        .zip(&a)
        .map(|((s, m), a)| (s + m + a) / 3.0)
        .collect()
}

/// Computes metrics for every pattern in `batch` and aggregates them.
/// Callers that keep an evaluation budget count `batch.len()` evaluations.
pub fn aggregate_scores(pop: &EvaluatedPopulation, batch: &[PartialSolution]) -> Result<Vec<f64>> {
    let triples = batch
        .iter()
        .map(|ps| metrics(pop, ps))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(&triples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SearchSpace;

    fn triple(simplicity: usize, mean_fitness: f64, atomicity: f64) -> MetricTriple {
        MetricTriple {
            simplicity,
            mean_fitness,
            atomicity,
        }
    }

    fn onemax_pop(n: usize) -> EvaluatedPopulation {
        let space = SearchSpace::binary(n);
        let members: Vec<_> = space.enumerate().collect();
        EvaluatedPopulation::evaluate(space, members, |x| x.values().iter().sum::<u32>() as f64)
            .unwrap()
    }

    fn ps(s: &str) -> PartialSolution {
        s.parse().unwrap()
    }

    #[test]
    fn simplicity_counts_wildcards() {
        assert_eq!(simplicity(&ps("*****")), 5);
        assert_eq!(simplicity(&ps("10110")), 0);
        assert_eq!(simplicity(&ps("1**1")), 2);
    }

    #[test]
    fn empty_observations_are_worst() {
        let space = SearchSpace::binary(2);
        let pop =
            EvaluatedPopulation::new(space, vec!["00".parse().unwrap()], vec![1.0]).unwrap();
        assert_eq!(mean_fitness(&pop, &ps("11")).unwrap(), WORST);
        assert_eq!(benefit(&pop, &ps("11")).unwrap(), 0.0);
        assert_eq!(atomicity(&pop, &ps("11")).unwrap(), 0.0);
    }

    #[test]
    fn universal_pattern() {
        let pop = onemax_pop(4);
        assert!((benefit(&pop, &ps("****")).unwrap() - 1.0).abs() < 1e-12);
        assert!((mean_fitness(&pop, &ps("****")).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(atomicity(&pop, &ps("****")).unwrap(), 0.0);
    }

    #[test]
    fn singleton_contribution_is_zero() {
        let pop = onemax_pop(4);
        assert!(contribution(&pop, &ps("*1**"), 1).unwrap().abs() < 1e-12);
        assert!(atomicity(&pop, &ps("*1**")).unwrap().abs() < 1e-12);
        assert!(contribution(&pop, &ps("*1**"), 0).is_err());
    }

    #[test]
    fn fused_atomicity_matches_per_cell_route() {
        let pop = onemax_pop(6);
        for pattern in ["11*0**", "1*0*11", "000000", "1*****"] {
            let p = ps(pattern);
            let direct = p
                .fixed()
                .map(|(k, _)| contribution(&pop, &p, k).unwrap())
                .fold(f64::INFINITY, f64::min);
            let direct = if direct.is_infinite() { 0.0 } else { direct };
            assert!((atomicity(&pop, &p).unwrap() - direct).abs() < 1e-12, "{pattern}");
        }
    }

    #[test]
    fn remap_rules() {
        assert_eq!(remap(&[3.0]), vec![0.5]);
        assert_eq!(remap(&[1.0, 3.0, 2.0]), vec![0.0, 1.0, 0.5]);
        assert_eq!(remap(&[WORST, 2.0, 4.0]), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn aggregate_degenerate_and_dominant() {
        assert_eq!(aggregate(&[triple(3, 1.0, 0.2)]), vec![0.5]);
        let scores = aggregate(&[triple(3, 2.0, 0.5), triple(1, 1.0, 0.1), triple(2, 1.5, 0.0)]);
        assert!((scores[0] - 1.0).abs() < 1e-12);
        let opposed = aggregate(&[triple(4, 1.0, 0.3), triple(1, 2.0, 0.3)]);
        assert!((opposed[0] - 0.5).abs() < 1e-12);
        assert!((opposed[1] - 0.5).abs() < 1e-12);
    }
}
