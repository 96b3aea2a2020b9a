//! A direct transcription of the metric definitions, used as an oracle.

use pscatalog_core::metrics::{self, WORST};
use pscatalog_core::{EvaluatedPopulation, FullSolution, PartialSolution, SearchSpace};
use rand::Rng;

pub const TOL: f64 = 1e-9;

pub struct Naive<'a> {
    members: &'a [FullSolution],
    raw: &'a [f64],
    norm: Vec<f64>,
}

impl<'a> Naive<'a> {
    pub fn new(members: &'a [FullSolution], raw: &'a [f64]) -> Self {
        let min = raw.iter().cloned().fold(f64::INFINITY, f64::min);
        let total: f64 = raw.iter().map(|f| f - min).sum();
        let norm = if total == 0.0 {
            vec![1.0 / raw.len() as f64; raw.len()]
        } else {
            raw.iter().map(|f| (f - min) / total).collect()
        };
        Self { members, raw, norm }
    }

    pub fn observations(&self, ps: &PartialSolution) -> Vec<usize> {
        (0..self.members.len())
            .filter(|&i| {
                ps.cells()
                    .iter()
                    .enumerate()
                    .all(|(p, c)| c.is_none_or(|v| self.members[i].values()[p] == v))
            })
            .collect()
    }

    pub fn mean_fitness(&self, ps: &PartialSolution) -> f64 {
        let obs = self.observations(ps);
        if obs.is_empty() {
            WORST
        } else {
            obs.iter().map(|&i| self.raw[i]).sum::<f64>() / obs.len() as f64
        }
    }

    pub fn benefit(&self, ps: &PartialSolution) -> f64 {
        self.observations(ps).iter().map(|&i| self.norm[i]).sum()
    }

    pub fn contribution(&self, ps: &PartialSolution, k: usize) -> f64 {
        let mut isolated = vec![None; ps.len()];
        isolated[k] = ps.get(k);
        let mut excluded = ps.cells().to_vec();
        excluded[k] = None;
        let p_ab = self.benefit(ps);
        let p_a = self.benefit(&PartialSolution::new(isolated));
        let p_b = self.benefit(&PartialSolution::new(excluded));
        if p_ab == 0.0 || p_a == 0.0 || p_b == 0.0 {
            0.0
        } else {
            p_ab * (p_ab / (p_a * p_b)).ln()
        }
    }

    pub fn atomicity(&self, ps: &PartialSolution) -> f64 {
        let fixed: Vec<usize> = (0..ps.len()).filter(|&k| ps.get(k).is_some()).collect();
        if fixed.is_empty() {
            return 0.0;
        }
        fixed
            .iter()
            .map(|&k| self.contribution(ps, k))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Every pattern over `space`.
pub fn all_patterns(space: &SearchSpace) -> Vec<PartialSolution> {
    let mut out = vec![Vec::new()];
    for &c in space.cardinalities() {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Option<u32>>| {
                (0..c).map(Some).chain([None]).map(move |cell| {
                    let mut next = prefix.clone();
                    next.push(cell);
                    next
                })
            })
            .collect();
    }
    out.into_iter().map(PartialSolution::new).collect()
}

fn close(a: f64, b: f64) -> bool {
    (a == WORST && b == WORST) || (a - b).abs() <= TOL
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

/// Compares every metric of every pattern over `space` with the naive
/// definitions; the error names the first mismatch.
pub fn check_population(space: &SearchSpace, members: Vec<FullSolution>, raw: Vec<f64>) -> Result<(), String> {
    let pop = EvaluatedPopulation::new(space.clone(), members.clone(), raw.clone()).map_err(|e| e.to_string())?;
    let naive = Naive::new(&members, &raw);
    for (a, b) in pop.norm_fitness().iter().zip(&naive.norm) {
        ensure!(close(*a, *b), "normalized fitness {a} vs {b}");
    }
    for ps in all_patterns(space) {
        let t = metrics::metrics(&pop, &ps).map_err(|e| e.to_string())?;
        let stars = ps.cells().iter().filter(|c| c.is_none()).count();
        ensure!(t.simplicity == stars, "{ps}: simplicity {} vs {stars}", t.simplicity);
        let mean = naive.mean_fitness(&ps);
        ensure!(close(t.mean_fitness, mean), "{ps}: mean fitness {} vs {mean}", t.mean_fitness);
        let single = metrics::mean_fitness(&pop, &ps).map_err(|e| e.to_string())?;
        ensure!(close(single, mean), "{ps}: mean fitness {single} vs {mean}");
        let benefit = naive.benefit(&ps);
        let got = metrics::benefit(&pop, &ps).map_err(|e| e.to_string())?;
        ensure!(close(got, benefit), "{ps}: benefit {got} vs {benefit}");
        let atomicity = naive.atomicity(&ps);
        ensure!(close(t.atomicity, atomicity), "{ps}: atomicity {} vs {atomicity}", t.atomicity);
        let got = metrics::atomicity(&pop, &ps).map_err(|e| e.to_string())?;
        ensure!(close(got, atomicity), "{ps}: atomicity {got} vs {atomicity}");
        for k in (0..ps.len()).filter(|&k| ps.get(k).is_some()) {
            let got = metrics::contribution(&pop, &ps, k).map_err(|e| e.to_string())?;
            let want = naive.contribution(&ps, k);
            ensure!(close(got, want), "{ps}: contribution at {k} {got} vs {want}");
        }
        let obs = pop.observations(&ps).map_err(|e| e.to_string())?;
        ensure!(obs == naive.observations(&ps), "{ps}: observations differ");
    }

    let universal = PartialSolution::universal(space.len());
    let b = metrics::benefit(&pop, &universal).map_err(|e| e.to_string())?;
    ensure!((b - 1.0).abs() <= TOL, "benefit of the universal pattern is {b}");
    let a = metrics::atomicity(&pop, &universal).map_err(|e| e.to_string())?;
    ensure!(a == 0.0, "atomicity of the universal pattern is {a}");
    for i in 0..space.len() {
        for v in 0..space.cardinality(i) {
            let single = universal.with_cell(i, Some(v));
            let a = metrics::atomicity(&pop, &single).map_err(|e| e.to_string())?;
            ensure!(a.abs() <= TOL, "atomicity of {single} is {a}");
        }
    }
    Ok(())
}

pub fn random_population<R: Rng>(space: &SearchSpace, size: usize, rng: &mut R) -> Vec<FullSolution> {
    (0..size)
        .map(|_| {
            FullSolution::new(
                space
                    .cardinalities()
                    .iter()
                    .map(|&c| rng.random_range(0..c))
                    .collect(),
            )
        })
        .collect()
}

