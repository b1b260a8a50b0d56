//! Per-run result records and their CSV form.
//!
//! Every CSV written here starts with a `# generated <unix seconds>` line;
//! readers skip `#` lines, so files differ only in that line between
//! identical runs. Wall-clock times never enter these files.

use std::io::{Read, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    /// Peak ratio at each accuracy level.
    PeakRatio(Vec<(f64, f64)>),
    /// Function error value of the best solution.
    Fev(f64),
}

impl Metric {
    pub fn kind(&self) -> &'static str {
        match self {
            Metric::PeakRatio(_) => "pr",
            Metric::Fev(_) => "fev",
        }
    }

    pub fn levels(&self) -> Vec<f64> {
        match self {
            Metric::PeakRatio(v) => v.iter().map(|(e, _)| *e).collect(),
            Metric::Fev(_) => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub problem: String,
    pub algorithm: String,
    /// Non-default parameters, `key=value` joined by `;`.
    pub params: String,
    pub seed: u64,
    pub fes_used: u64,
    pub metric: Metric,
    pub trace: Option<String>,
    /// Informational only; kept out of the CSV.
    pub wall_seconds: f64,
}

pub fn level_column(level: f64) -> String {
    format!("eps-{level:e}")
}

fn parse_level_column(name: &str) -> Option<f64> {
    name.strip_prefix("eps-")?.parse().ok()
}

pub fn timestamp_line() -> String {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    format!("# generated {secs}\n")
}

/// Drops `#` comment lines, for comparing two generated files.
pub fn strip_comments(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect()
}

const FIXED_COLUMNS: [&str; 7] = ["problem", "algorithm", "params", "seed", "fes_used", "metric", "fev"];

pub fn write_runs<W: Write>(mut out: W, records: &[RunRecord]) -> Result<()> {
    let levels = records
        .iter()
        .find(|r| matches!(r.metric, Metric::PeakRatio(_)))
        .map(|r| r.metric.levels())
        .unwrap_or_default();
    for r in records {
        if matches!(r.metric, Metric::PeakRatio(_)) && r.metric.levels() != levels {
            bail!("records disagree on accuracy levels");
        }
    }
    out.write_all(timestamp_line().as_bytes())?;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(levels.iter().map(|&e| level_column(e)));
    header.push("trace".into());
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.problem.clone(),
            r.algorithm.clone(),
            r.params.clone(),
            r.seed.to_string(),
            r.fes_used.to_string(),
            r.metric.kind().to_string(),
        ];
        match &r.metric {
            Metric::Fev(v) => {
                row.push(v.to_string());
                row.extend(levels.iter().map(|_| String::new()));
            }
            Metric::PeakRatio(values) => {
                row.push(String::new());
                row.extend(values.iter().map(|(_, v)| v.to_string()));
            }
        }
        row.push(r.trace.clone().unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_runs<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header = rdr.headers()?.clone();
    let col = |name: &str| header.iter().position(|h| h == name).ok_or_else(|| anyhow!("missing column {name}"));
    let fixed: Vec<usize> = FIXED_COLUMNS.iter().map(|c| col(c)).collect::<Result<_>>()?;
    let trace = col("trace")?;
    let levels: Vec<(usize, f64)> =
        header.iter().enumerate().filter_map(|(i, h)| parse_level_column(h).map(|e| (i, e))).collect();

    let mut out = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row?;
        let ctx = || format!("record {}", line + 1);
        let get = |i: usize| row.get(i).unwrap_or("");
        let metric = match get(fixed[5]) {
            "fev" => Metric::Fev(get(fixed[6]).parse().with_context(ctx)?),
            "pr" => Metric::PeakRatio(
                levels
                    .iter()
                    .map(|&(i, e)| Ok((e, get(i).parse::<f64>().with_context(ctx)?)))
                    .collect::<Result<_>>()?,
            ),
            other => bail!("{}: unknown metric {other:?}", ctx()),
        };
        out.push(RunRecord {
            problem: get(fixed[0]).to_string(),
            algorithm: get(fixed[1]).to_string(),
            params: get(fixed[2]).to_string(),
            seed: get(fixed[3]).parse().with_context(ctx)?,
            fes_used: get(fixed[4]).parse().with_context(ctx)?,
            metric,
            trace: Some(get(trace)).filter(|s| !s.is_empty()).map(str::to_string),
            wall_seconds: 0.0,
        });
    }
    Ok(out)
}

/// Wall times go to a plain-text sidecar: one `problem seed seconds` line per run.
pub fn write_wall_times<W: Write>(mut out: W, records: &[RunRecord]) -> Result<()> {
    for r in records {
        writeln!(out, "{} {} {:.3}", r.problem, r.seed, r.wall_seconds)?;
    }
    Ok(())
}
