//! Aggregation of run records into one table per algorithm setting:
//! one row per problem, one column per accuracy level (or a single FEV
//! column), and an `Average` footer over the rows.

use std::io::Write;

use anyhow::{bail, Result};

use crate::records::{level_column, timestamp_line, Metric, RunRecord};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    pub runs: usize,
}

impl Stats {
    pub fn of(values: &[f64]) -> Stats {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
        Stats { mean: v.iter().sum::<f64>() / n as f64, median, min: v[0], max: v[n - 1], runs: n }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub problem: String,
    pub columns: Vec<Stats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub algorithm: String,
    pub params: String,
    pub metric: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<SummaryRow>,
    /// Mean of the row means, per column.
    pub average: Vec<f64>,
}

/// Summarizes records of a single algorithm setting. Rows keep the order in
/// which problems first appear.
pub fn summarize(records: &[RunRecord]) -> Result<SummaryTable> {
    let Some(first) = records.first() else {
        bail!("nothing to summarize");
    };
    let levels = first.metric.levels();
    for r in records {
        if r.algorithm != first.algorithm || r.params != first.params {
            bail!(
                "records mix settings: {} [{}] and {} [{}]",
                first.algorithm,
                first.params,
                r.algorithm,
                r.params
            );
        }
        if r.metric.kind() != first.metric.kind() {
            bail!("records mix metrics {} and {}", first.metric.kind(), r.metric.kind());
        }
        if r.metric.levels() != levels {
            bail!("records disagree on accuracy levels");
        }
    }

    let mut problems: Vec<&str> = Vec::new();
    for r in records {
        if !problems.contains(&r.problem.as_str()) {
            problems.push(&r.problem);
        }
    }
    let columns: Vec<String> = match first.metric {
        Metric::PeakRatio(_) => levels.iter().map(|&e| level_column(e)).collect(),
        Metric::Fev(_) => vec!["fev".into()],
    };
    let rows: Vec<SummaryRow> = problems
        .iter()
        .map(|&p| {
            let group: Vec<&RunRecord> = records.iter().filter(|r| r.problem == p).collect();
            let columns = (0..columns.len())
                .map(|k| {
                    let values: Vec<f64> = group
                        .iter()
                        .map(|r| match &r.metric {
                            Metric::PeakRatio(v) => v[k].1,
                            Metric::Fev(v) => *v,
                        })
                        .collect();
                    Stats::of(&values)
                })
                .collect();
            SummaryRow { problem: p.to_string(), columns }
        })
        .collect();
    let average = (0..columns.len())
        .map(|k| rows.iter().map(|r| r.columns[k].mean).sum::<f64>() / rows.len() as f64)
        .collect();
    Ok(SummaryTable {
        algorithm: first.algorithm.clone(),
        params: first.params.clone(),
        metric: first.metric.kind(),
        columns,
        rows,
        average,
    })
}

/// Splits records by (algorithm, params), keeping first-appearance order.
pub fn split_settings(records: &[RunRecord]) -> Vec<Vec<RunRecord>> {
    let mut groups: Vec<Vec<RunRecord>> = Vec::new();
    for r in records {
        match groups.iter_mut().find(|g| g[0].algorithm == r.algorithm && g[0].params == r.params) {
            Some(g) => g.push(r.clone()),
            None => groups.push(vec![r.clone()]),
        }
    }
    groups
}

impl SummaryTable {
    fn format(&self, v: f64) -> String {
        if self.metric == "pr" {
            format!("{v:.3}")
        } else {
            format!("{v:.6e}")
        }
    }

    /// Means only, one row per problem plus the `Average` footer.
    pub fn write_table<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(timestamp_line().as_bytes())?;
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["problem".to_string()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![row.problem.clone()];
            rec.extend(row.columns.iter().map(|s| self.format(s.mean)));
            w.write_record(&rec)?;
        }
        let mut footer = vec!["Average".to_string()];
        footer.extend(self.average.iter().map(|&v| self.format(v)));
        w.write_record(&footer)?;
        w.flush()?;
        Ok(())
    }

    /// Long form: one line per (problem, column) with mean, median, min and max.
    pub fn write_stats<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(timestamp_line().as_bytes())?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["problem", "algorithm", "params", "measure", "runs", "mean", "median", "min", "max"])?;
        for row in &self.rows {
            for (name, s) in self.columns.iter().zip(&row.columns) {
                w.write_record([
                    row.problem.clone(),
                    self.algorithm.clone(),
                    self.params.clone(),
                    name.clone(),
                    s.runs.to_string(),
                    s.mean.to_string(),
                    s.median.to_string(),
                    s.min.to_string(),
                    s.max.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Human-readable rendering for the terminal.
    pub fn render(&self) -> String {
        let mut s = format!("{} {}\n", self.algorithm, self.params);
        s += &format!("{:<22}", "problem");
        for c in &self.columns {
            s += &format!("{c:>14}");
        }
        s.push('\n');
        for row in &self.rows {
            s += &format!("{:<22}", row.problem);
            for st in &row.columns {
                s += &format!("{:>14}", self.format(st.mean));
            }
            s.push('\n');
        }
        s += &format!("{:<22}", "Average");
        for &v in &self.average {
            s += &format!("{:>14}", self.format(v));
        }
        s.push('\n');
        s
    }
}
