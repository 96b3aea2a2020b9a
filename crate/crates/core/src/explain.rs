//! Global and local explanations rendered from a catalog.
//!
//! A global explanation lists the catalog with its metrics and points out
//! pairs of patterns that cannot appear in the same solution. A local
//! explanation lists the catalog patterns a given solution contains.

use std::fmt;

use crate::benchmarks::BenchmarkProblem;
use crate::catalog::{CatalogEntry, PsCatalog};
use crate::error::Result;
use crate::space::FullSolution;

#[derive(Clone, Debug, PartialEq)]
pub struct GlobalExplanation {
    pub entries: Vec<CatalogEntry>,
    /// Index pairs `(i, j)`, `i < j`, of non-mergeable entries.
    pub conflicts: Vec<(usize, usize)>,
    /// Per entry, whether it is one of the problem's known targets.
    pub is_target: Option<Vec<bool>>,
}

pub fn explain_global(catalog: &PsCatalog, problem: Option<&BenchmarkProblem>) -> GlobalExplanation {
    let entries = catalog.entries.clone();
    let mut conflicts = Vec::new();
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            if !entries[i].pattern.mergeable(&entries[j].pattern) {
                conflicts.push((i, j));
            }
        }
    }
    let is_target = problem.map(|p| {
        entries
            .iter()
            .map(|e| p.targets().contains(&e.pattern))
            .collect()
    });
    GlobalExplanation {
        entries,
        conflicts,
        is_target,
    }
}

fn write_row(f: &mut fmt::Formatter<'_>, rank: usize, e: &CatalogEntry, note: &str) -> fmt::Result {
    let mean = if e.metrics.mean_fitness.is_finite() {
        format!("{:.4}", e.metrics.mean_fitness)
    } else {
        "-inf".into()
    };
    writeln!(
        f,
        "{:>4}  {:>6.4}  {:>12}  {:>10}  {:>10.6}  {}{}",
        rank, e.score, mean, e.metrics.simplicity, e.metrics.atomicity, e.pattern, note
    )
}

fn write_header(f: &mut fmt::Formatter<'_>) -> fmt::Result {
    writeln!(
        f,
        "{:>4}  {:>6}  {:>12}  {:>10}  {:>10}  pattern",
        "rank", "score", "mean_fitness", "simplicity", "atomicity"
    )
}

impl fmt::Display for GlobalExplanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return writeln!(f, "Global explanation: the catalog is empty.");
        }
        writeln!(
            f,
            "Global explanation: {} partial solutions associated with high fitness",
            self.entries.len()
        )?;
        write_header(f)?;
        for (i, e) in self.entries.iter().enumerate() {
            let note = match &self.is_target {
                Some(flags) if flags[i] => "  [target]",
                _ => "",
            };
            write_row(f, i + 1, e, note)?;
        }
        if self.conflicts.is_empty() {
            writeln!(f, "\nNo conflicting pairs: every pair of patterns can coexist.")
        } else {
            writeln!(
                f,
                "\nConflicting pairs ({}): beneficial traits that cannot coexist",
                self.conflicts.len()
            )?;
            for &(i, j) in &self.conflicts {
                writeln!(
                    f,
                    "  #{} {}  x  #{} {}",
                    i + 1,
                    self.entries[i].pattern,
                    j + 1,
                    self.entries[j].pattern
                )?;
            }
            Ok(())
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalExplanation {
    pub solution: FullSolution,
    /// `(catalog rank index, entry)` for every contained pattern.
    pub contained: Vec<(usize, CatalogEntry)>,
}

pub fn explain_local(solution: &FullSolution, catalog: &PsCatalog) -> Result<LocalExplanation> {
    let mut contained = Vec::new();
    for (i, e) in catalog.entries.iter().enumerate() {
        if solution.contains(&e.pattern)? {
            contained.push((i, e.clone()));
        }
    }
    Ok(LocalExplanation {
        solution: solution.clone(),
        contained,
    })
}

impl fmt::Display for LocalExplanation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.contained.is_empty() {
            return writeln!(
                f,
                "Local explanation for {}: contains none of the catalog patterns.",
                self.solution
            );
        }
        writeln!(
            f,
            "Local explanation for {}: contains {} catalog pattern(s)",
            self.solution,
            self.contained.len()
        )?;
        write_header(f)?;
        for (i, e) in &self.contained {
            write_row(f, i + 1, e, "")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::MetricTriple;

    fn catalog(patterns: &[&str]) -> PsCatalog {
        PsCatalog::new(
            patterns
                .iter()
                .map(|p| {
                    let pattern: crate::space::PartialSolution = p.parse().unwrap();
                    CatalogEntry {
                        metrics: MetricTriple {
                            simplicity: pattern.simplicity(),
                            mean_fitness: 1.0,
                            atomicity: 0.1,
                        },
                        pattern,
                        score: 0.5,
                    }
                })
                .collect(),
            0,
        )
    }

    #[test]
    fn conflicting_pair_is_flagged() {
        let g = explain_global(&catalog(&["**00", "*11*"]), None);
        assert_eq!(g.conflicts, vec![(0, 1)]);
        assert!(g.to_string().contains("**00  x  #2 *11*"));
    }

    #[test]
    fn empty_and_compatible_catalogs() {
        let empty = explain_global(&PsCatalog::default(), None);
        assert!(empty.conflicts.is_empty());
        assert!(empty.to_string().contains("empty"));
        let ok = explain_global(&catalog(&["1***", "*1**", "**1*"]), None);
        assert!(ok.conflicts.is_empty());
    }

    #[test]
    fn local_lists_contained_patterns() {
        let c = catalog(&["111***", "***00*", "*****1", "0*****"]);
        let l = explain_local(&"111001".parse().unwrap(), &c).unwrap();
        let ranks: Vec<usize> = l.contained.iter().map(|(i, _)| *i).collect();
        assert_eq!(ranks, vec![0, 1, 2]);

        let none = explain_local(&"000110".parse().unwrap(), &catalog(&["111***"])).unwrap();
        assert!(none.contained.is_empty());
        let universal = explain_local(&"000110".parse().unwrap(), &catalog(&["******"])).unwrap();
        assert_eq!(universal.contained.len(), 1);
    }
}
