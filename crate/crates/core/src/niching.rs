//! The clustered restart optimizer and its multimodal metrics.
//!
//! Every restart samples `N` uniform points, keeps the best `⌊τN⌋`, clusters
//! them with [`dsts`](crate::dsts), and evolves each cluster with EDA² until
//! its population median stagnates. The best individual of every cluster run
//! is appended to a [`SolutionArchive`]. Restarts repeat until the problem's
//! evaluation budget is spent; the budget and the archive are the only state
//! carried from one restart to the next.

use rand::Rng;

use crate::benchmarks::{EvalBudget, Problem};
use crate::dsts::{cluster, ClusteringInput};
use crate::eda2::{run_eda2, selected_count, truncation_select, BoundHandling, Eda2Params, TerminationPolicy};
use crate::error::{invalid, Result};
use crate::individual::{euclidean, Individual};

/// Error values below this are reported as exactly zero.
pub const FEV_ZERO_THRESHOLD: f64 = 1e-8;

/// The five accuracy levels peak ratios are reported at.
pub const DEFAULT_ACCURACY_LEVELS: [f64; 5] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];

#[derive(Debug, Clone, PartialEq)]
pub struct Ceda2Config {
    /// Uniform samples drawn at the start of every restart.
    pub init_count: usize,
    pub selection_ratio: f64,
    pub alpha: f64,
    /// EDA² population per cluster.
    pub cluster_population: usize,
    pub cluster_archive_length: usize,
    pub stagnation_window: usize,
    /// A cluster run stops once its median settles to within this over the window.
    pub accuracy: f64,
    pub bound_handling: BoundHandling,
    /// Overrides the problem's MaxFEs when set.
    pub max_fes: Option<u64>,
}

impl Ceda2Config {
    /// Defaults for a `dimension`-D problem: `N = 1000 + 10D²`, `τ = 0.35`,
    /// `α = 0.8`, `p = 4(D + 1)`, `l = 5`.
    pub fn for_dimension(dimension: usize) -> Self {
        Self {
            init_count: 1000 + 10 * dimension * dimension,
            selection_ratio: 0.35,
            alpha: 0.8,
            cluster_population: 4 * (dimension + 1),
            cluster_archive_length: 5,
            stagnation_window: 5,
            accuracy: 1e-8,
            bound_handling: BoundHandling::Resample,
            max_fes: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.init_count < 2 {
            return Err(invalid("the initial sample needs at least two solutions"));
        }
        if selected_count(self.selection_ratio, self.init_count) == 0 {
            return Err(invalid("the selection ratio keeps no initial solution"));
        }
        if self.stagnation_window == 0 {
            return Err(invalid("stagnation window must be at least 1"));
        }
        if !(self.accuracy >= 0.0) {
            return Err(invalid("stagnation accuracy must be non-negative"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        self.cluster_params(crate::Sense::Maximize).validate()
    }

    fn cluster_params(&self, sense: crate::Sense) -> Eda2Params {
        Eda2Params::new(self.cluster_population, self.selection_ratio, self.cluster_archive_length, sense)
            .with_bound_handling(self.bound_handling)
    }
}

/// Best solution of every completed cluster run, in the order they finished.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolutionArchive {
    pub entries: Vec<Individual>,
}

impl SolutionArchive {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Summary of one pass of the restart loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RestartRecord {
    pub restart: usize,
    pub clusters: usize,
    /// Clusters actually evolved before the budget ran out.
    pub clusters_evolved: usize,
    /// Total evaluations spent so far in the run.
    pub fes_used: u64,
    pub archive_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ceda2Outcome {
    pub archive: SolutionArchive,
    pub restarts: Vec<RestartRecord>,
    pub fes_used: u64,
}

/// One restart: sample, select, cluster, evolve each cluster best-center
/// first. Appends one entry per evolved cluster.
pub fn restart_iteration<R: Rng + ?Sized>(
    problem: &Problem,
    config: &Ceda2Config,
    restart: usize,
    budget: &mut EvalBudget,
    archive: &mut SolutionArchive,
    rng: &mut R,
) -> Result<RestartRecord> {
    let sense = problem.sense();
    let bounds = problem.bounds();
    let mut record = RestartRecord { restart, clusters: 0, clusters_evolved: 0, fes_used: 0, archive_size: 0 };
    let finish = |mut record: RestartRecord, budget: &EvalBudget, archive: &SolutionArchive| {
        record.fes_used = budget.used();
        record.archive_size = archive.len();
        record
    };

    let mut initial = Vec::with_capacity(config.init_count);
    for _ in 0..config.init_count {
        let x = bounds.sample_uniform(rng);
        let index = budget.used();
        match budget.evaluate(problem, &x) {
            Ok(f) => initial.push(Individual::new(x, f, index)),
            Err(_) => return Ok(finish(record, budget, archive)),
        }
    }

    let selected = truncation_select(&initial, config.selection_ratio, sense, 0)?;
    let members = selected.members();
    let input = ClusteringInput::new(
        members.iter().map(|m| m.genome.clone()).collect(),
        members.iter().map(|m| m.fitness).collect(),
        sense,
        config.alpha,
    )?;
    let clustering = cluster(&input)?;
    let groups = clustering.clusters();
    record.clusters = groups.len();

    // Cluster ids already run best center first.
    for group in groups {
        if budget.is_exhausted() {
            break;
        }
        let seed: Vec<Individual> = group.iter().map(|&i| members[i].clone()).collect();
        let result = run_eda2(
            problem,
            bounds,
            config.cluster_params(sense),
            TerminationPolicy::with_stagnation(u64::MAX, config.stagnation_window, config.accuracy),
            Some(seed),
            budget,
            rng,
        )?;
        record.clusters_evolved += 1;
        if let Some(best) = result.best {
            archive.entries.push(best);
        }
    }
    Ok(finish(record, budget, archive))
}

/// Runs restarts until the evaluation budget is spent and returns every
/// per-cluster best together with per-restart records.
pub fn run_ceda2_traced<R: Rng + ?Sized>(problem: &Problem, config: &Ceda2Config, rng: &mut R) -> Result<Ceda2Outcome> {
    config.validate()?;
    let mut budget = EvalBudget::new(config.max_fes.unwrap_or(problem.max_fes()));
    let mut archive = SolutionArchive::default();
    let mut restarts = Vec::new();
    while !budget.is_exhausted() {
        let record = restart_iteration(problem, config, restarts.len(), &mut budget, &mut archive, rng)?;
        restarts.push(record);
    }
    Ok(Ceda2Outcome { fes_used: budget.used(), archive, restarts })
}

pub fn run_ceda2<R: Rng + ?Sized>(problem: &Problem, config: &Ceda2Config, rng: &mut R) -> Result<SolutionArchive> {
    Ok(run_ceda2_traced(problem, config, rng)?.archive)
}

/// Which global optima an archive has located at one accuracy level.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakReport {
    pub accuracy_level: f64,
    pub found_mask: Vec<bool>,
    pub peak_ratio: f64,
}

impl PeakReport {
    pub fn found(&self) -> usize {
        self.found_mask.iter().filter(|&&f| f).count()
    }
}

/// An entry detects optimum `o` when its value is within `epsilon` of the
/// global optimum value, `o` is its nearest known optimum, and `o` lies
/// within the problem's niche radius. Each optimum counts once.
pub fn peak_ratio(archive: &SolutionArchive, problem: &Problem, epsilon: f64) -> PeakReport {
    let optima = problem.global_optima();
    let mut found = vec![false; optima.len()];
    for entry in &archive.entries {
        if !((entry.fitness - problem.global_optimum_value()).abs() <= epsilon) {
            continue;
        }
        let nearest = optima
            .iter()
            .enumerate()
            .map(|(k, o)| (k, euclidean(&entry.genome, o)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((k, d)) = nearest {
            if d <= problem.niche_radius() {
                found[k] = true;
            }
        }
    }
    let count = found.iter().filter(|&&f| f).count();
    PeakReport { accuracy_level: epsilon, peak_ratio: count as f64 / optima.len() as f64, found_mask: found }
}

/// Absolute error of `best` against the global optimum value, reported as
/// zero below [`FEV_ZERO_THRESHOLD`].
pub fn fev(best: &Individual, problem: &Problem) -> f64 {
    fev_of_value(best.fitness, problem.global_optimum_value())
}

pub fn fev_of_value(fitness: f64, optimum: f64) -> f64 {
    let raw = (fitness - optimum).abs();
    if raw < FEV_ZERO_THRESHOLD {
        0.0
    } else {
        raw
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::make_cec2013_problem;
    use crate::seeded_rng;

    fn entry(problem: &Problem, x: Vec<f64>) -> Individual {
        let f = problem.value(&x);
        Individual::new(x, f, 0)
    }

    #[test]
    fn fev_threshold() {
        assert_eq!(fev_of_value(5.0, 5.0), 0.0);
        assert_eq!(fev_of_value(1.0 + 5e-9, 1.0), 0.0);
        assert!((fev_of_value(2e-3, 0.0) - 2e-3).abs() < 1e-18);
    }

    #[test]
    fn exact_copies_of_optima_give_full_ratio() {
        let p = make_cec2013_problem(6).unwrap();
        let archive = SolutionArchive { entries: p.global_optima().iter().map(|o| entry(&p, o.clone())).collect() };
        for eps in DEFAULT_ACCURACY_LEVELS {
            assert_eq!(peak_ratio(&archive, &p, eps).peak_ratio, 1.0);
        }
        assert_eq!(peak_ratio(&SolutionArchive::default(), &p, 0.1).peak_ratio, 0.0);
    }

    #[test]
    fn duplicates_count_once() {
        let p = make_cec2013_problem(1).unwrap();
        let archive = SolutionArchive { entries: vec![entry(&p, vec![0.0]); 5] };
        let r = peak_ratio(&archive, &p, 1e-3);
        assert_eq!(r.found_mask, vec![true, false]);
        assert_eq!(r.peak_ratio, 0.5);
    }

    #[test]
    fn starved_budget_yields_empty_archive() {
        let p = make_cec2013_problem(4).unwrap();
        let mut config = Ceda2Config::for_dimension(2);
        config.max_fes = Some(500);
        let out = run_ceda2_traced(&p, &config, &mut seeded_rng(1)).unwrap();
        assert!(out.archive.is_empty());
        assert_eq!(out.fes_used, 500);
        assert_eq!(peak_ratio(&out.archive, &p, 0.1).peak_ratio, 0.0);
    }

    #[test]
    fn config_defaults_and_validation() {
        let c = Ceda2Config::for_dimension(20);
        assert_eq!(c.init_count, 5000);
        assert_eq!(c.cluster_population, 84);
        assert!(c.validate().is_ok());
        let bad = Ceda2Config { init_count: 1, ..c.clone() };
        assert!(bad.validate().is_err());
        let bad = Ceda2Config { alpha: 1.5, ..c };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn restarts_locate_both_trap_peaks() {
        let p = make_cec2013_problem(1).unwrap();
        let config = Ceda2Config::for_dimension(1);
        let mut budget = EvalBudget::new(p.max_fes());
        let mut archive = SolutionArchive::default();
        let mut rng = seeded_rng(4);
        while peak_ratio(&archive, &p, 1e-5).peak_ratio < 1.0 && !budget.is_exhausted() {
            let n = archive.len();
            restart_iteration(&p, &config, 0, &mut budget, &mut archive, &mut rng).unwrap();
            assert!(archive.len() >= n);
        }
        assert_eq!(peak_ratio(&archive, &p, 1e-5).peak_ratio, 1.0);
    }
}
