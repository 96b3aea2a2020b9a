//! Search spaces, full solutions and partial solutions.
//!
//! A [`PartialSolution`] is a pattern over the same positions as a
//! [`FullSolution`], where every cell is either a fixed value or the wildcard
//! `*`. Patterns print as compact strings (`1*0*1`) when every value fits in a
//! single digit and as comma-separated cells (`12,*,3`) otherwise.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Per-position cardinalities of a discrete search space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchSpace {
    cardinalities: Vec<u32>,
}

impl SearchSpace {
    pub fn new(cardinalities: Vec<u32>) -> Result<Self> {
        if cardinalities.is_empty() {
            return Err(Error::InvalidSpace("at least one position is required".into()));
        }
        if let Some(pos) = cardinalities.iter().position(|&c| c < 2) {
            return Err(Error::InvalidSpace(format!(
                "cardinality at position {pos} must be at least 2"
            )));
        }
        Ok(Self { cardinalities })
    }

    /// `n` binary positions.
    pub fn binary(n: usize) -> Self {
        assert!(n >= 1, "a search space needs at least one position");
        Self {
            cardinalities: vec![2; n],
        }
    }

    pub fn len(&self) -> usize {
        self.cardinalities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cardinalities.is_empty()
    }

    pub fn cardinalities(&self) -> &[u32] {
        &self.cardinalities
    }

    pub fn cardinality(&self, position: usize) -> u32 {
        self.cardinalities[position]
    }

    pub fn is_binary(&self) -> bool {
        self.cardinalities.iter().all(|&c| c == 2)
    }

    /// Total number of full solutions, saturating at `u64::MAX`.
    pub fn size(&self) -> u64 {
        self.cardinalities
            .iter()
            .fold(1u64, |acc, &c| acc.saturating_mul(u64::from(c)))
    }

    pub fn check_full(&self, x: &FullSolution) -> Result<()> {
        self.check_len(x.len())?;
        for (position, (&value, &cardinality)) in
            x.values().iter().zip(&self.cardinalities).enumerate()
        {
            if value >= cardinality {
                return Err(Error::ValueOutOfRange {
                    position,
                    value,
                    cardinality,
                });
            }
        }
        Ok(())
    }

    pub fn check_partial(&self, ps: &PartialSolution) -> Result<()> {
        self.check_len(ps.len())?;
        for (position, (cell, &cardinality)) in ps.cells().iter().zip(&self.cardinalities).enumerate()
        {
            if let Some(value) = *cell {
                if value >= cardinality {
                    return Err(Error::ValueOutOfRange {
                        position,
                        value,
                        cardinality,
                    });
                }
            }
        }
        Ok(())
    }

    fn check_len(&self, actual: usize) -> Result<()> {
        if actual != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual,
            });
        }
        Ok(())
    }

    /// Enumerates every full solution in lexicographic order (last position
    /// varies fastest). Only sensible for small spaces.
    pub fn enumerate(&self) -> impl Iterator<Item = FullSolution> + '_ {
        let total = self.size();
        (0..total).map(move |mut index| {
            let mut values = vec![0u32; self.len()];
            for (slot, &c) in values.iter_mut().zip(&self.cardinalities).rev() {
                *slot = (index % u64::from(c)) as u32;
                index /= u64::from(c);
            }
            FullSolution::new(values)
        })
    }
}

/// A complete assignment of one value to every position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FullSolution(Vec<u32>);

impl FullSolution {
    pub fn new(values: Vec<u32>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, position: usize) -> u32 {
        self.0[position]
    }

    pub fn into_values(self) -> Vec<u32> {
        self.0
    }

    /// Whether this solution agrees with every fixed cell of `ps`.
    pub fn contains(&self, ps: &PartialSolution) -> Result<bool> {
        if ps.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: ps.len(),
            });
        }
        Ok(self.contains_unchecked(ps))
    }

    pub(crate) fn contains_unchecked(&self, ps: &PartialSolution) -> bool {
        ps.cells()
            .iter()
            .zip(&self.0)
            .all(|(cell, &value)| cell.is_none_or(|fixed| fixed == value))
    }
}

/// A pattern where each position is either fixed to a value or left as `*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialSolution(Vec<Option<u32>>);

impl PartialSolution {
    pub fn new(cells: Vec<Option<u32>>) -> Self {
        Self(cells)
    }

    /// The all-wildcard pattern, contained in every solution.
    pub fn universal(n: usize) -> Self {
        Self(vec![None; n])
    }

    pub fn from_full(x: &FullSolution) -> Self {
        Self(x.values().iter().copied().map(Some).collect())
    }

    pub fn to_full(&self) -> Result<FullSolution> {
        self.0
            .iter()
            .enumerate()
            .map(|(i, cell)| cell.ok_or(Error::UnfixedCell(i)))
            .collect::<Result<Vec<_>>>()
            .map(FullSolution)
    }

    pub fn cells(&self) -> &[Option<u32>] {
        &self.0
    }

    pub fn get(&self, position: usize) -> Option<u32> {
        self.0[position]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_universal(&self) -> bool {
        self.0.iter().all(Option::is_none)
    }

    pub fn is_fully_fixed(&self) -> bool {
        self.0.iter().all(Option::is_some)
    }

    /// Number of wildcard cells.
    pub fn simplicity(&self) -> usize {
        self.0.iter().filter(|c| c.is_none()).count()
    }

    pub fn fixed_count(&self) -> usize {
        self.len() - self.simplicity()
    }

    /// `(position, value)` for every fixed cell, in position order.
    pub fn fixed(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, cell)| cell.map(|v| (i, v)))
    }

    /// True when no position holds two distinct fixed values.
    /// Patterns of different lengths are never mergeable.
    pub fn mergeable(&self, other: &PartialSolution) -> bool {
        self.len() == other.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|pair| !matches!(pair, (Some(a), Some(b)) if a != b))
    }

    pub fn merge(&self, other: &PartialSolution) -> Result<PartialSolution> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        self.0
            .iter()
            .zip(&other.0)
            .enumerate()
            .map(|(i, (a, b))| match (a, b) {
                (Some(x), Some(y)) if x != y => Err(Error::NotMergeable(i)),
                _ => Ok(a.or(*b)),
            })
            .collect::<Result<Vec<_>>>()
            .map(PartialSolution)
    }

    fn require_fixed(&self, k: usize) -> Result<u32> {
        if k >= self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: k + 1,
            });
        }
        self.0[k].ok_or(Error::PositionNotFixed(k))
    }

    /// Keeps only the fixed cell at `k`.
    pub fn isolate(&self, k: usize) -> Result<PartialSolution> {
        let value = self.require_fixed(k)?;
        let mut cells = vec![None; self.len()];
        cells[k] = Some(value);
        Ok(PartialSolution(cells))
    }

    /// Replaces the fixed cell at `k` with a wildcard.
    pub fn exclude(&self, k: usize) -> Result<PartialSolution> {
        self.require_fixed(k)?;
        let mut cells = self.0.clone();
        cells[k] = None;
        Ok(PartialSolution(cells))
    }

    pub fn with_cell(&self, position: usize, cell: Option<u32>) -> PartialSolution {
        let mut cells = self.0.clone();
        cells[position] = cell;
        PartialSolution(cells)
    }

    /// Every pattern obtained by turning one fixed cell into a wildcard.
    pub fn simplifications(&self) -> Vec<PartialSolution> {
        self.fixed()
            .map(|(k, _)| self.with_cell(k, None))
            .collect()
    }

    /// Every pattern obtained by fixing one wildcard to one of its values.
    pub fn specializations(&self, space: &SearchSpace) -> Vec<PartialSolution> {
        let mut out = Vec::new();
        for (i, cell) in self.0.iter().enumerate() {
            if cell.is_none() {
                for value in 0..space.cardinality(i) {
                    out.push(self.with_cell(i, Some(value)));
                }
            }
        }
        out
    }
}

fn write_cells<T: Copy>(
    f: &mut fmt::Formatter<'_>,
    cells: &[T],
    value: impl Fn(T) -> Option<u32>,
) -> fmt::Result {
    let compact = cells.iter().all(|&c| value(c).is_none_or(|v| v < 10));
    for (i, &cell) in cells.iter().enumerate() {
        if !compact && i > 0 {
            f.write_str(",")?;
        }
        match value(cell) {
            Some(v) => write!(f, "{v}")?,
            None => f.write_str("*")?,
        }
    }
    Ok(())
}

fn parse_cells(s: &str) -> Result<Vec<Option<u32>>> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty pattern".into()));
    }
    let parse_one = |token: &str| -> Result<Option<u32>> {
        match token.trim() {
            "*" => Ok(None),
            t => t
                .parse::<u32>()
                .map(Some)
                .map_err(|_| Error::Parse(format!("invalid cell {t:?}"))),
        }
    };
    if s.contains(',') {
        s.split(',').map(parse_one).collect()
    } else {
        s.char_indices()
            .map(|(i, _)| parse_one(&s[i..i + 1]))
            .collect()
    }
}

impl fmt::Display for PartialSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_cells(f, &self.0, |c| c)
    }
}

impl fmt::Display for FullSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_cells(f, &self.0, Some)
    }
}

impl FromStr for PartialSolution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_cells(s).map(PartialSolution)
    }
}

impl FromStr for FullSolution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_cells(s)?
            .into_iter()
            .enumerate()
            .map(|(i, cell)| cell.ok_or(Error::UnfixedCell(i)))
            .collect::<Result<Vec<_>>>()
            .map(FullSolution)
    }
}

macro_rules! serde_via_string {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

serde_via_string!(PartialSolution);
serde_via_string!(FullSolution);
