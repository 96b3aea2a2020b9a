//! The evaluated reference population that every partial-solution metric is
//! computed against.

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::space::{FullSolution, PartialSolution, SearchSpace};

/// Reference population with raw and normalized fitness plus one membership
/// mask per `(position, value)` pair.
///
/// Normalized fitness is `(raw - min) / Σ(raw - min)`, so it sums to one. A
/// population with constant fitness gets the uniform weight `1/|pop|`.
#[derive(Clone, Debug)]
pub struct EvaluatedPopulation {
    space: SearchSpace,
    members: Vec<FullSolution>,
    raw_fitness: Vec<f64>,
    norm_fitness: Vec<f64>,
    masks: Vec<Vec<Bitset>>,
    mask_benefit: Vec<Vec<f64>>,
    mask_raw_sum: Vec<Vec<f64>>,
    mask_count: Vec<Vec<usize>>,
    total_norm: f64,
    total_raw: f64,
}

impl EvaluatedPopulation {
    pub fn new(
        space: SearchSpace,
        members: Vec<FullSolution>,
        raw_fitness: Vec<f64>,
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidConfig("population must not be empty".into()));
        }
        if members.len() != raw_fitness.len() {
            return Err(Error::LengthMismatch {
                expected: members.len(),
                actual: raw_fitness.len(),
            });
        }
        if raw_fitness.iter().any(|f| !f.is_finite()) {
            return Err(Error::InvalidConfig("fitness values must be finite".into()));
        }
        for x in &members {
            space.check_full(x)?;
        }

        let norm_fitness = normalize(&raw_fitness);
        let size = members.len();
        let mut masks: Vec<Vec<Bitset>> = space
            .cardinalities()
            .iter()
            .map(|&c| vec![Bitset::zeros(size); c as usize])
            .collect();
        for (i, x) in members.iter().enumerate() {
            for (pos, &v) in x.values().iter().enumerate() {
                masks[pos][v as usize].insert(i);
            }
        }

        let sum_over = |mask: &Bitset, weights: &[f64]| -> f64 {
            mask.iter_ones().map(|i| weights[i]).sum()
        };
        let mask_benefit = masks
            .iter()
            .map(|per_value| per_value.iter().map(|m| sum_over(m, &norm_fitness)).collect())
            .collect();
        let mask_raw_sum = masks
            .iter()
            .map(|per_value| per_value.iter().map(|m| sum_over(m, &raw_fitness)).collect())
            .collect();
        let mask_count = masks
            .iter()
            .map(|per_value| per_value.iter().map(Bitset::count_ones).collect())
            .collect();
        let total_norm = norm_fitness.iter().sum();
        let total_raw = raw_fitness.iter().sum();

        Ok(Self {
            space,
            members,
            raw_fitness,
            norm_fitness,
            masks,
            mask_benefit,
            mask_raw_sum,
            mask_count,
            total_norm,
            total_raw,
        })
    }

    /// Evaluates `members` with `fitness` and builds the population.
    pub fn evaluate<F>(space: SearchSpace, members: Vec<FullSolution>, mut fitness: F) -> Result<Self>
    where
        F: FnMut(&FullSolution) -> f64,
    {
        let raw = members.iter().map(&mut fitness).collect();
        Self::new(space, members, raw)
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[FullSolution] {
        &self.members
    }

    pub fn raw_fitness(&self) -> &[f64] {
        &self.raw_fitness
    }

    pub fn norm_fitness(&self) -> &[f64] {
        &self.norm_fitness
    }

    pub(crate) fn mask(&self, position: usize, value: u32) -> &Bitset {
        &self.masks[position][value as usize]
    }

    pub(crate) fn mask_benefit(&self, position: usize, value: u32) -> f64 {
        self.mask_benefit[position][value as usize]
    }

    pub(crate) fn mask_raw_sum(&self, position: usize, value: u32) -> f64 {
        self.mask_raw_sum[position][value as usize]
    }

    pub(crate) fn mask_count(&self, position: usize, value: u32) -> usize {
        self.mask_count[position][value as usize]
    }

    pub(crate) fn total_norm(&self) -> f64 {
        self.total_norm
    }

    pub(crate) fn total_raw(&self) -> f64 {
        self.total_raw
    }

    /// Indices of the members that contain `ps`, in member order.
    pub fn observations(&self, ps: &PartialSolution) -> Result<Vec<usize>> {
        self.check_len(ps)?;
        Ok(match self.observation_mask(ps) {
            Some(mask) => mask.iter_ones().collect(),
            None => (0..self.len()).collect(),
        })
    }

    /// Intersection of the fixed cells' masks; `None` for the universal PS.
    pub(crate) fn observation_mask(&self, ps: &PartialSolution) -> Option<Bitset> {
        let mut fixed = ps.fixed();
        let (p0, v0) = fixed.next()?;
        let mut mask = self.mask(p0, v0).clone();
        for (p, v) in fixed {
            mask.and_assign(self.mask(p, v));
        }
        Some(mask)
    }

    pub(crate) fn check_len(&self, ps: &PartialSolution) -> Result<()> {
        if ps.len() != self.space.len() {
            return Err(Error::LengthMismatch {
                expected: self.space.len(),
                actual: ps.len(),
            });
        }
        Ok(())
    }

    /// Indices of the `count` highest raw-fitness members; ties go to the
    /// lower index.
    pub fn top_indices(&self, count: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.raw_fitness[b]
                .total_cmp(&self.raw_fitness[a])
                .then(a.cmp(&b))
        });
        order.truncate(count);
        order
    }
}

fn normalize(raw: &[f64]) -> Vec<f64> {
    let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let spread: f64 = raw.iter().map(|f| f - min).sum();
    if spread > 0.0 {
        raw.iter().map(|f| (f - min) / spread).collect()
    } else {
        vec![1.0 / raw.len() as f64; raw.len()]
    }
}
