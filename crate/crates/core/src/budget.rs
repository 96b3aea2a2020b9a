//! Fitness functions and evaluation accounting.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::space::{FullSolution, SearchSpace};

/// A fitness function to be maximized over a search space.
pub trait Fitness: Sync {
    fn space(&self) -> &SearchSpace;
    fn evaluate(&self, x: &FullSolution) -> f64;
}

impl<F: Fitness + ?Sized> Fitness for &F {
    fn space(&self) -> &SearchSpace {
        (**self).space()
    }

    fn evaluate(&self, x: &FullSolution) -> f64 {
        (**self).evaluate(x)
    }
}

/// Wraps a fitness function, counting calls and refusing any past `budget`.
pub struct CountingFitness<F> {
    inner: F,
    budget: u64,
    used: AtomicU64,
}

impl<F: Fitness> CountingFitness<F> {
    pub fn new(inner: F, budget: u64) -> Self {
        Self {
            inner,
            budget,
            used: AtomicU64::new(0),
        }
    }

    pub fn unbounded(inner: F) -> Self {
        Self::new(inner, u64::MAX)
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn remaining(&self) -> u64 {
        self.budget.saturating_sub(self.used())
    }

    pub fn space(&self) -> &SearchSpace {
        self.inner.space()
    }

    pub fn inner(&self) -> &F {
        &self.inner
    }

    /// Evaluates `x` if budget remains.
    pub fn try_evaluate(&self, x: &FullSolution) -> Option<f64> {
        self.used
            .fetch_update(Ordering::Relaxed, Ordering::Relaxed, |used| {
                (used < self.budget).then_some(used + 1)
            })
            .ok()
            .map(|_| self.inner.evaluate(x))
    }
}

/// Plain evaluation always counts and never refuses, so callers that cannot
/// stop early can be audited against the budget afterwards.
impl<F: Fitness> Fitness for CountingFitness<F> {
    fn space(&self) -> &SearchSpace {
        self.inner.space()
    }

    fn evaluate(&self, x: &FullSolution) -> f64 {
        self.used.fetch_add(1, Ordering::Relaxed);
        self.inner.evaluate(x)
    }
}

/// Counts aggregate-score evaluations of partial solutions.
#[derive(Debug, Default)]
pub struct PsEvalCounter {
    used: AtomicU64,
}

impl PsEvalCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&self, count: usize) {
        self.used.fetch_add(count as u64, Ordering::Relaxed);
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }
}
