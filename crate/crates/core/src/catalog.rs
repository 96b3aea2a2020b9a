//! The ranked catalog of mined partial solutions and its file formats.
//!
//! The tab-separated format has one entry per line:
//! `score<TAB>mean_fitness<TAB>simplicity<TAB>atomicity<TAB>pattern`.
//! Lines starting with `#` are comments. A mean fitness of `-inf` marks a
//! pattern with no observations.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{MetricTriple, WORST};
use crate::space::PartialSolution;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub pattern: PartialSolution,
    pub metrics: MetricTriple,
    /// Aggregate score in `[0, 1]`.
    pub score: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PsCatalog {
    /// Descending by score.
    pub entries: Vec<CatalogEntry>,
    pub evals_used: u64,
}

const HEADER: &str = "# score\tmean_fitness\tsimplicity\tatomicity\tpattern";

impl PsCatalog {
    pub fn new(entries: Vec<CatalogEntry>, evals_used: u64) -> Self {
        Self {
            entries,
            evals_used,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn patterns(&self) -> impl Iterator<Item = &PartialSolution> {
        self.entries.iter().map(|e| &e.pattern)
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{HEADER}")?;
        for e in &self.entries {
            let mean = if e.metrics.mean_fitness.is_finite() {
                e.metrics.mean_fitness.to_string()
            } else {
                "-inf".to_string()
            };
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                e.score, mean, e.metrics.simplicity, e.metrics.atomicity, e.pattern
            )?;
        }
        Ok(())
    }

    pub fn to_tsv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_tsv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("catalog output is UTF-8")
    }

    /// Parses the tab-separated format. `evals_used` is not stored there and
    /// reads back as 0.
    pub fn read_tsv<R: BufRead>(input: R) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |what: &str| Error::Parse(format!("line {}: {what}", lineno + 1));
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 5 {
                return Err(bad("expected 5 tab-separated fields"));
            }
            let float = |s: &str| s.parse::<f64>().map_err(|_| bad("invalid number"));
            let mean_fitness = if fields[1] == "-inf" {
                WORST
            } else {
                float(fields[1])?
            };
            entries.push(CatalogEntry {
                score: float(fields[0])?,
                metrics: MetricTriple {
                    simplicity: fields[2].parse().map_err(|_| bad("invalid simplicity"))?,
                    mean_fitness,
                    atomicity: float(fields[3])?,
                },
                pattern: fields[4].parse()?,
            });
        }
        Ok(Self::new(entries, 0))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PsCatalog {
        PsCatalog::new(
            vec![
                CatalogEntry {
                    pattern: "11**".parse().unwrap(),
                    metrics: MetricTriple {
                        simplicity: 2,
                        mean_fitness: 1.25,
                        atomicity: 0.031,
                    },
                    score: 0.875,
                },
                CatalogEntry {
                    pattern: "0000".parse().unwrap(),
                    metrics: MetricTriple {
                        simplicity: 0,
                        mean_fitness: WORST,
                        atomicity: 0.0,
                    },
                    score: 0.0,
                },
            ],
            42,
        )
    }

    #[test]
    fn tsv_layout() {
        let text = sample().to_tsv_string();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "0.875\t1.25\t2\t0.031\t11**");
        assert_eq!(lines[2], "0\t-inf\t0\t0\t0000");
    }

    #[test]
    fn tsv_and_json_read_back() {
        let catalog = sample();
        let back = PsCatalog::read_tsv(catalog.to_tsv_string().as_bytes()).unwrap();
        assert_eq!(back.entries, catalog.entries);
        let json = PsCatalog::from_json(&catalog.to_json().unwrap()).unwrap();
        assert_eq!(json, catalog);
    }

    #[test]
    fn malformed_tsv_is_rejected() {
        assert!(PsCatalog::read_tsv("0.5\t1\t2\n".as_bytes()).is_err());
        assert!(PsCatalog::read_tsv("x\t1\t2\t0\t1*\n".as_bytes()).is_err());
    }
}
