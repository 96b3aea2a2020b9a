use std::io::Write;

use serde::Serialize;

use super::{Cell, CellResult, Experiment};
use crate::benchmarks::ProblemKind;
use crate::error::Result;

/// One CSV line per cell. Wall-clock time is left out so that repeated runs
/// produce identical files.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CsvRow {
    pub experiment: String,
    pub problem: String,
    pub algorithm: String,
    pub variant: Option<String>,
    pub population_size: Option<usize>,
    pub archive: Option<bool>,
    pub ref_size: Option<usize>,
    pub generations: Option<usize>,
    pub budget: Option<u64>,
    pub share_percent: Option<u32>,
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub evals_mean: Option<f64>,
    pub evals_std: Option<f64>,
    pub mean_best_fitness: Option<f64>,
    pub max_f_evals: u64,
    pub f_budget: u64,
    pub max_psi_evals: u64,
    pub psi_budget: u64,
    pub budget_violations: usize,
}

impl From<&CellResult> for CsvRow {
    fn from(r: &CellResult) -> Self {
        let mut row = CsvRow {
            experiment: r.experiment.to_string(),
            problem: r.problem.to_string(),
            algorithm: r.cell.algorithm().into(),
            variant: None,
            population_size: None,
            archive: None,
            ref_size: None,
            generations: None,
            budget: None,
            share_percent: None,
            runs: r.runs,
            successes: r.successes,
            success_rate: r.success_rate(),
            evals_mean: r.evals_mean,
            evals_std: r.evals_std,
            mean_best_fitness: r.mean_best_fitness,
            max_f_evals: r.max_f_evals,
            f_budget: r.f_budget,
            max_psi_evals: r.max_psi_evals,
            psi_budget: r.psi_budget,
            budget_violations: r.budget_violations,
        };
        match r.cell {
            Cell::Miner {
                variant,
                population_size,
                use_archive,
            } => {
                row.variant = Some(variant.name().into());
                row.population_size = Some(population_size);
                row.archive = Some(use_archive);
            }
            Cell::PsGa { population_size } => row.population_size = Some(population_size),
            Cell::HillClimber => {}
            Cell::ReferencePopulation { ref_size, generations } => {
                row.ref_size = Some(ref_size);
                row.generations = Some(generations);
            }
            Cell::PickAndMerge { budget, share_percent } => {
                row.budget = Some(budget);
                row.share_percent = Some(share_percent);
            }
            Cell::FullGa { budget } | Cell::Umda { budget } => row.budget = Some(budget),
        }
        row
    }
}

pub fn write_csv<W: Write>(results: &[CellResult], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for r in results {
        writer.serialize(CsvRow::from(r))?;
    }
    writer.flush()?;
    Ok(())
}

fn percent(r: Option<&CellResult>) -> String {
    r.map_or_else(|| "n/a".into(), |r| format!("{:.0}%", 100.0 * r.success_rate()))
}

fn fitness(r: Option<&CellResult>) -> String {
    match r.and_then(|r| r.mean_best_fitness) {
        Some(f) => format!("{f:.2}"),
        None => "n/a".into(),
    }
}

fn table(header: &[String], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].len())
                .chain(std::iter::once(header[c].len()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(s, &w)| format!("{s:<w$}"))
            .collect();
        format!("| {} |\n", padded.join(" | "))
    };
    let mut out = line(header);
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&line(&rule));
    for r in rows {
        out.push_str(&line(r));
    }
    out
}

fn problems(results: &[CellResult]) -> Vec<ProblemKind> {
    let mut out: Vec<ProblemKind> = Vec::new();
    for r in results {
        if !out.contains(&r.problem) {
            out.push(r.problem);
        }
    }
    out
}

fn distinct<T: PartialEq + Copy>(values: impl Iterator<Item = T>) -> Vec<T> {
    let mut out = Vec::new();
    for v in values {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn lookup<'a>(results: &'a [CellResult], problem: ProblemKind, cell: &Cell) -> Option<&'a CellResult> {
    super::find(results, problem, cell)
}

/// Success-rate tables laid out per experiment: T1 as configurations by
/// problem, T2 as reference size by generations, T3 as budget share by
/// total budget (followed by the mean best fitness of the same grid).
pub fn markdown(results: &[CellResult]) -> String {
    let Some(first) = results.first() else {
        return "No results.\n".into();
    };
    let problems = problems(results);
    match first.experiment {
        Experiment::T1 => t1_markdown(results, &problems),
        Experiment::T2 => t2_markdown(results, &problems),
        Experiment::T3 => t3_markdown(results, &problems),
    }
}

fn t1_markdown(results: &[CellResult], problems: &[ProblemKind]) -> String {
    let mut header: Vec<String> = ["Local search", "Pop. size", "Archive"].map(String::from).to_vec();
    header.extend(problems.iter().map(|p| p.to_string()));
    let cells: Vec<&Cell> = {
        let mut seen: Vec<&Cell> = Vec::new();
        for r in results {
            if !seen.contains(&&r.cell) {
                seen.push(&r.cell);
            }
        }
        seen
    };
    let rows: Vec<Vec<String>> = cells
        .into_iter()
        .map(|cell| {
            let mut row = match cell {
                Cell::Miner {
                    variant,
                    population_size,
                    use_archive,
                } => vec![
                    variant.name().to_string(),
                    population_size.to_string(),
                    if *use_archive { "yes" } else { "no" }.to_string(),
                ],
                Cell::PsGa { population_size } => {
                    vec!["PS-GA".into(), population_size.to_string(), "-".into()]
                }
                _ => vec!["Hill climber".into(), "-".into(), "-".into()],
            };
            row.extend(problems.iter().map(|&p| percent(lookup(results, p, cell))));
            row
        })
        .collect();
    format!("## T1: target recovery\n\n{}", table(&header, &rows))
}

fn t2_markdown(results: &[CellResult], problems: &[ProblemKind]) -> String {
    let grid: Vec<(usize, usize)> = results
        .iter()
        .filter_map(|r| match r.cell {
            Cell::ReferencePopulation { ref_size, generations } => Some((ref_size, generations)),
            _ => None,
        })
        .collect();
    let sizes = distinct(grid.iter().map(|g| g.0));
    let generations = distinct(grid.iter().map(|g| g.1));
    let mut out = String::from("## T2: reference population size and evolution\n");
    for &p in problems {
        let mut header = vec!["|P_Ref|".to_string()];
        header.extend(generations.iter().map(|g| format!("gen {g}")));
        let rows: Vec<Vec<String>> = sizes
            .iter()
            .map(|&ref_size| {
                let mut row = vec![ref_size.to_string()];
                row.extend(generations.iter().map(|&generations| {
                    percent(lookup(results, p, &Cell::ReferencePopulation { ref_size, generations }))
                }));
                row
            })
            .collect();
        out.push_str(&format!("\n### {p}\n\n{}", table(&header, &rows)));
    }
    out
}

fn t3_markdown(results: &[CellResult], problems: &[ProblemKind]) -> String {
    let budgets = distinct(results.iter().filter_map(|r| match r.cell {
        Cell::PickAndMerge { budget, .. } | Cell::FullGa { budget } | Cell::Umda { budget } => Some(budget),
        _ => None,
    }));
    let shares = distinct(results.iter().filter_map(|r| match r.cell {
        Cell::PickAndMerge { share_percent, .. } => Some(share_percent),
        _ => None,
    }));
    let mut out = String::from("## T3: optimisation under a shared evaluation budget\n");
    let row_cells = |budget: u64| -> Vec<(String, Cell)> {
        let mut cells: Vec<(String, Cell)> = shares
            .iter()
            .map(|&share_percent| (format!("{share_percent}%"), Cell::PickAndMerge { budget, share_percent }))
            .collect();
        cells.push(("GA".into(), Cell::FullGa { budget }));
        cells.push(("UMDA".into(), Cell::Umda { budget }));
        cells
    };
    let labels: Vec<String> = row_cells(0).into_iter().map(|(l, _)| l).collect();
    let mut header = vec!["Share".to_string()];
    header.extend(budgets.iter().map(|b| b.to_string()));
    for &p in problems {
        for (title, render) in [
            ("success rate", percent as fn(Option<&CellResult>) -> String),
            ("mean best fitness", fitness),
        ] {
            let rows: Vec<Vec<String>> = labels
                .iter()
                .enumerate()
                .map(|(i, label)| {
                    let mut row = vec![label.clone()];
                    row.extend(budgets.iter().map(|&b| render(lookup(results, p, &row_cells(b)[i].1))));
                    row
                })
                .collect();
            out.push_str(&format!("\n### {p}: {title}\n\n{}", table(&header, &rows)));
        }
    }
    out
}
