//! Experiment configuration: a TOML file whose every key can also be given
//! as a command-line flag of the same name. Flags win.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ceda2_core::benchmarks::problem_by_id;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

pub const DEFAULT_ACCURACY_LEVELS: [f64; 5] = ceda2_core::niching::DEFAULT_ACCURACY_LEVELS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Eda2,
    Ceda2,
    DstsDemo,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Eda2 => "eda2",
            Algorithm::Ceda2 => "ceda2",
            Algorithm::DstsDemo => "dsts-demo",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "eda2" => Ok(Algorithm::Eda2),
            "ceda2" => Ok(Algorithm::Ceda2),
            "dsts-demo" => Ok(Algorithm::DstsDemo),
            other => bail!("unknown algorithm {other:?}"),
        }
    }
}

/// Fully resolved experiment settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub problem: Vec<String>,
    pub algorithm: Algorithm,
    pub runs: u64,
    /// Run `r` uses seed `seed + r`.
    pub seed: u64,
    pub out: PathBuf,
    pub jobs: usize,
    /// EDA² population `p`; C-EDA² derives `4(D + 1)` when unset.
    pub population: Option<usize>,
    /// EDA² archive length `l`; defaults to 10 standalone and 5 per cluster.
    pub archive_length: Option<usize>,
    pub selection_ratio: f64,
    pub alpha: f64,
    /// C-EDA² initial sample size; `1000 + 10D²` when unset.
    pub init_count: Option<usize>,
    /// C-EDA² per-cluster stagnation accuracy.
    pub accuracy: f64,
    pub accuracy_levels: Vec<f64>,
    /// Overrides the problem's evaluation budget.
    pub max_fes: Option<u64>,
    /// Write one per-generation (EDA²) or per-restart (C-EDA²) CSV per run.
    pub traces: bool,
    pub sweep_population: Vec<usize>,
    pub sweep_archive_length: Vec<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: Vec::new(),
            algorithm: Algorithm::Ceda2,
            runs: 1,
            seed: 0,
            out: PathBuf::from("results"),
            jobs: 1,
            population: None,
            archive_length: None,
            selection_ratio: 0.35,
            alpha: 0.8,
            init_count: None,
            accuracy: 1e-8,
            accuracy_levels: DEFAULT_ACCURACY_LEVELS.to_vec(),
            max_fes: None,
            traces: false,
            sweep_population: vec![50, 80, 110, 140, 170, 200],
            sweep_archive_length: vec![5, 10, 15, 20, 25, 30],
        }
    }
}

/// Command-line counterparts of every config key.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Problem id, e.g. cec2013/f4 or study/elliptic-d20. Repeatable.
    #[arg(long)]
    pub problem: Vec<String>,
    #[arg(long, value_enum)]
    pub algorithm: Option<Algorithm>,
    #[arg(long)]
    pub runs: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long = "archive-length")]
    pub archive_length: Option<usize>,
    #[arg(long = "selection-ratio")]
    pub selection_ratio: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long = "init-count")]
    pub init_count: Option<usize>,
    #[arg(long)]
    pub accuracy: Option<f64>,
    #[arg(long = "accuracy-levels", value_delimiter = ',')]
    pub accuracy_levels: Option<Vec<f64>>,
    #[arg(long = "max-fes")]
    pub max_fes: Option<u64>,
    #[arg(long)]
    pub traces: Option<bool>,
    #[arg(long = "sweep-population", value_delimiter = ',')]
    pub sweep_population: Option<Vec<usize>>,
    #[arg(long = "sweep-archive-length", value_delimiter = ',')]
    pub sweep_archive_length: Option<Vec<usize>>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(rename_all = "kebab-case", deny_unknown_fields)]
        struct Partial {
            problem: Option<Vec<String>>,
            algorithm: Option<Algorithm>,
            runs: Option<u64>,
            seed: Option<u64>,
            out: Option<PathBuf>,
            jobs: Option<usize>,
            population: Option<usize>,
            archive_length: Option<usize>,
            selection_ratio: Option<f64>,
            alpha: Option<f64>,
            init_count: Option<usize>,
            accuracy: Option<f64>,
            accuracy_levels: Option<Vec<f64>>,
            max_fes: Option<u64>,
            traces: Option<bool>,
            sweep_population: Option<Vec<usize>>,
            sweep_archive_length: Option<Vec<usize>>,
        }
        let p: Partial = toml::from_str(text).context("parsing experiment config")?;
        let d = Self::default();
        Ok(Self {
            problem: p.problem.unwrap_or(d.problem),
            algorithm: p.algorithm.unwrap_or(d.algorithm),
            runs: p.runs.unwrap_or(d.runs),
            seed: p.seed.unwrap_or(d.seed),
            out: p.out.unwrap_or(d.out),
            jobs: p.jobs.unwrap_or(d.jobs),
            population: p.population.or(d.population),
            archive_length: p.archive_length.or(d.archive_length),
            selection_ratio: p.selection_ratio.unwrap_or(d.selection_ratio),
            alpha: p.alpha.unwrap_or(d.alpha),
            init_count: p.init_count.or(d.init_count),
            accuracy: p.accuracy.unwrap_or(d.accuracy),
            accuracy_levels: p.accuracy_levels.unwrap_or(d.accuracy_levels),
            max_fes: p.max_fes.or(d.max_fes),
            traces: p.traces.unwrap_or(d.traces),
            sweep_population: p.sweep_population.unwrap_or(d.sweep_population),
            sweep_archive_length: p.sweep_archive_length.unwrap_or(d.sweep_archive_length),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Reads `path` if given (else starts from defaults) and applies `flags` on top.
    pub fn load(path: Option<&Path>, flags: &Overrides) -> Result<Self> {
        let mut config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                Self::from_toml(&text)?
            }
            None => Self::default(),
        };
        config.apply(flags);
        Ok(config)
    }

    pub fn apply(&mut self, f: &Overrides) {
        if !f.problem.is_empty() {
            self.problem = f.problem.clone();
        }
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = &f.$field {
                    self.$field = v.clone();
                }
            )*};
        }
        take!(algorithm, runs, seed, out, jobs, selection_ratio, alpha, accuracy, accuracy_levels, traces);
        take!(sweep_population, sweep_archive_length);
        if f.population.is_some() {
            self.population = f.population;
        }
        if f.archive_length.is_some() {
            self.archive_length = f.archive_length;
        }
        if f.init_count.is_some() {
            self.init_count = f.init_count;
        }
        if f.max_fes.is_some() {
            self.max_fes = f.max_fes;
        }
    }

    /// Configuration errors that must surface before any run starts.
    pub fn validate(&self) -> Result<()> {
        if self.problem.is_empty() {
            bail!("no problem given");
        }
        for id in &self.problem {
            problem_by_id(id).with_context(|| format!("problem {id:?}"))?;
        }
        if self.runs == 0 {
            bail!("runs must be at least 1");
        }
        if self.jobs == 0 {
            bail!("jobs must be at least 1");
        }
        if self.accuracy_levels.is_empty() || self.accuracy_levels.iter().any(|e| !(*e > 0.0)) {
            bail!("accuracy levels must be positive");
        }
        if !(self.selection_ratio > 0.0 && self.selection_ratio < 1.0) {
            bail!("selection-ratio must lie in (0, 1)");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            bail!("alpha must lie in (0, 1)");
        }
        Ok(())
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.runs).map(|r| self.seed + r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_keys_and_flags() {
        let c = ExperimentConfig::from_toml(
            r#"
problem = ["cec2013/f1", "cec2013/f2"]
algorithm = "ceda2"
runs = 50
seed = 7
accuracy-levels = [0.1, 0.001]
"#,
        )
        .unwrap();
        assert_eq!(c.runs, 50);
        assert_eq!(c.accuracy_levels, vec![0.1, 0.001]);
        assert_eq!(c.alpha, 0.8);
        assert_eq!(c.seeds().take(2).collect::<Vec<_>>(), vec![7, 8]);

        let mut c2 = c.clone();
        c2.apply(&Overrides { runs: Some(3), problem: vec!["cec2013/f5".into()], ..Default::default() });
        assert_eq!(c2.runs, 3);
        assert_eq!(c2.problem, vec!["cec2013/f5".to_string()]);
        assert_eq!(c2.seed, 7);

        assert!(ExperimentConfig::from_toml("bogus = 1").is_err());
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn validation_catches_bad_problems() {
        let mut c = ExperimentConfig { problem: vec!["cec2013/f99".into()], ..Default::default() };
        assert!(c.validate().is_err());
        c.problem = vec!["cec2013/f3".into()];
        assert!(c.validate().is_ok());
        c.jobs = 0;
        assert!(c.validate().is_err());
    }
}
