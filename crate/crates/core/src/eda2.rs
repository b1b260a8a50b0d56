//! The archive-based Gaussian EDA.
//!
//! Each generation keeps the best `⌊τp⌋` individuals, estimates the mean
//! from them and the covariance from them pooled with the archived
//! selections of the previous `l` generations, then samples `p − 1` new
//! individuals and carries the best-so-far over unchanged.
//!
//! [`Eda2`] exposes the loop one generation at a time; [`run_eda2`] drives
//! it to termination.

use rand::Rng;

use crate::benchmarks::{EvalBudget, Objective};
use crate::error::{invalid, Error, Result};
use crate::gaussian_model::{
    estimate_covariance_with_archive, estimate_mean, Archive, GaussianModel, SelectedSet,
};
use crate::individual::{Bounds, Individual, Sense};

/// What happens to sampled coordinates that leave the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundHandling {
    /// Redraw uniformly within the coordinate's interval.
    #[default]
    Resample,
    /// Mirror across the violated bound, redrawing uniformly if the mirror
    /// image is still outside.
    Reflect,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eda2Params {
    pub population_size: usize,
    pub selection_ratio: f64,
    pub archive_length: usize,
    pub sense: Sense,
    pub bound_handling: BoundHandling,
}

impl Eda2Params {
    pub fn new(population_size: usize, selection_ratio: f64, archive_length: usize, sense: Sense) -> Self {
        Self { population_size, selection_ratio, archive_length, sense, bound_handling: BoundHandling::Resample }
    }

    pub fn with_bound_handling(mut self, handling: BoundHandling) -> Self {
        self.bound_handling = handling;
        self
    }

    pub fn selected_count(&self) -> usize {
        selected_count(self.selection_ratio, self.population_size)
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(invalid("population size must be at least 2"));
        }
        if !(self.selection_ratio > 0.0 && self.selection_ratio < 1.0) {
            return Err(invalid(format!("selection ratio {} outside (0, 1)", self.selection_ratio)));
        }
        if self.selected_count() == 0 {
            return Err(invalid(format!(
                "selection ratio {} selects nobody from {} individuals",
                self.selection_ratio, self.population_size
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TerminationPolicy {
    /// Evaluations this run may spend, on top of whatever the shared budget allows.
    pub max_fes: u64,
    pub stagnation_window: usize,
    pub stagnation_accuracy: f64,
    pub stagnation_enabled: bool,
}

impl TerminationPolicy {
    /// Run until the evaluation budget is spent.
    pub fn budget_only(max_fes: u64) -> Self {
        Self { max_fes, stagnation_window: 5, stagnation_accuracy: 0.0, stagnation_enabled: false }
    }

    /// Also stop once the population median stops improving by `accuracy`
    /// over `window` generations.
    pub fn with_stagnation(max_fes: u64, window: usize, accuracy: f64) -> Self {
        Self { max_fes, stagnation_window: window, stagnation_accuracy: accuracy, stagnation_enabled: true }
    }
}

/// Population statistics after one complete generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationRecord {
    pub generation: u64,
    /// Evaluations spent by this run so far.
    pub fes_used: u64,
    pub best_fitness: f64,
    pub median_fitness: f64,
    pub mean_fitness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    BudgetExhausted,
    Stagnation,
    DegenerateModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eda2Result {
    /// Best individual evaluated in the run; `None` only when nothing could be evaluated.
    pub best: Option<Individual>,
    pub fes_used: u64,
    pub generations: u64,
    pub history: Vec<GenerationRecord>,
    pub stop: StopReason,
}

/// Number of individuals a truncation with `ratio` keeps out of `len`.
pub fn selected_count(ratio: f64, len: usize) -> usize {
    // The tolerance absorbs products like 0.29 * 100 = 28.999999999999996.
    (ratio * len as f64 + 1e-9).floor() as usize
}

/// Keeps the `⌊ratio·|population|⌋` best individuals, older evaluations
/// winning fitness ties.
pub fn truncation_select(
    population: &[Individual],
    ratio: f64,
    sense: Sense,
    generation: u64,
) -> Result<SelectedSet> {
    if population.iter().any(|i| !i.is_evaluated()) {
        return Err(invalid("truncation selection needs an evaluated population"));
    }
    let k = selected_count(ratio, population.len());
    if k == 0 {
        return Err(invalid(format!("ratio {ratio} selects nobody from {} individuals", population.len())));
    }
    let mut ranked: Vec<&Individual> = population.iter().collect();
    ranked.sort_by(|a, b| a.cmp_best_first(b, sense));
    SelectedSet::new(ranked.into_iter().take(k).cloned().collect(), generation)
}

/// Resamples every out-of-box coordinate uniformly within its interval.
pub fn bound_repair<R: Rng + ?Sized>(x: Vec<f64>, bounds: &Bounds, rng: &mut R) -> Vec<f64> {
    bounds.repair(x, rng)
}

/// Mirrors out-of-box coordinates back inside; those still outside after
/// one reflection are resampled uniformly.
pub fn bound_reflect<R: Rng + ?Sized>(mut x: Vec<f64>, bounds: &Bounds, rng: &mut R) -> Vec<f64> {
    for ((v, &lo), &hi) in x.iter_mut().zip(bounds.lower()).zip(bounds.upper()) {
        if *v < lo {
            *v = 2.0 * lo - *v;
        } else if *v > hi {
            *v = 2.0 * hi - *v;
        }
    }
    bounds.repair(x, rng)
}

/// `true` iff the latest median `m_t` is within `accuracy` (strictly) of every
/// median `m_{t−window} … m_{t−1}`, in either direction. A noisy median that
/// happens to dip below an older value therefore does not count as converged.
pub fn stagnation_check(medians: &[f64], window: usize, accuracy: f64, sense: Sense) -> bool {
    if window == 0 || medians.len() < window + 1 {
        return false;
    }
    let recent = &medians[medians.len() - 1 - window..];
    let latest = recent[window];
    recent[..window].iter().all(|&m| sense.improvement(m, latest).abs() < accuracy)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// One EDA² run, advanced a generation at a time.
pub struct Eda2<'a, O: Objective + ?Sized> {
    objective: &'a O,
    bounds: &'a Bounds,
    params: Eda2Params,
    termination: TerminationPolicy,
    generation: u64,
    population: Vec<Individual>,
    /// The first generation estimates from every seed member instead of
    /// truncating. That set is neither archived nor part of the stagnation
    /// window, since its size and spread differ from a regular population.
    seed_all_first: bool,
    archive: Archive,
    best: Option<Individual>,
    fes_used: u64,
    history: Vec<GenerationRecord>,
    last_selected: Option<SelectedSet>,
    last_model: Option<GaussianModel>,
    stop: Option<StopReason>,
}

impl<'a, O: Objective + ?Sized> Eda2<'a, O> {
    /// Builds and evaluates the initial population: `init` if given, else
    /// `p` uniform points in `bounds`.
    pub fn start<R: Rng + ?Sized>(
        objective: &'a O,
        bounds: &'a Bounds,
        params: Eda2Params,
        termination: TerminationPolicy,
        init: Option<Vec<Individual>>,
        budget: &mut EvalBudget,
        rng: &mut R,
    ) -> Result<Self> {
        params.validate()?;
        if termination.stagnation_enabled && termination.stagnation_window == 0 {
            return Err(invalid("stagnation window must be at least 1"));
        }
        let n = bounds.dimension();
        if objective.dimension() != n {
            return Err(invalid(format!(
                "objective dimension {} does not match bounds dimension {n}",
                objective.dimension()
            )));
        }
        if let Some(init) = &init {
            if init.is_empty() {
                return Err(invalid("initial population must not be empty"));
            }
            if init.iter().any(|i| i.dimension() != n) {
                return Err(invalid("initial individuals must match the bounds dimension"));
            }
        }

        let seed_all_first = init.as_ref().is_some_and(|i| i.len() != params.population_size);
        let archive = Archive::new(params.archive_length);
        let mut run = Self {
            objective,
            bounds,
            params,
            termination,
            generation: 0,
            population: Vec::new(),
            seed_all_first,
            archive,
            best: None,
            fes_used: 0,
            history: Vec::new(),
            last_selected: None,
            last_model: None,
            stop: None,
        };

        let candidates = match init {
            Some(init) => init,
            None => (0..run.params.population_size)
                .map(|_| Individual::unevaluated(bounds.sample_uniform(rng)))
                .collect(),
        };
        for ind in candidates {
            let ind = if ind.is_evaluated() {
                ind
            } else {
                match run.evaluate(ind.genome, budget) {
                    Some(ind) => ind,
                    None => {
                        run.stop = Some(StopReason::BudgetExhausted);
                        break;
                    }
                }
            };
            run.offer_best(&ind);
            run.population.push(ind);
        }
        if run.stop.is_none() {
            run.record();
        }
        Ok(run)
    }

    fn exhausted(&self, budget: &EvalBudget) -> bool {
        budget.is_exhausted() || self.fes_used >= self.termination.max_fes
    }

    fn evaluate(&mut self, genome: Vec<f64>, budget: &mut EvalBudget) -> Option<Individual> {
        if self.fes_used >= self.termination.max_fes {
            return None;
        }
        let index = budget.used();
        let fitness = budget.evaluate(self.objective, &genome).ok()?;
        self.fes_used += 1;
        Some(Individual::new(genome, fitness, index))
    }

    fn offer_best(&mut self, candidate: &Individual) {
        let better = match &self.best {
            None => true,
            Some(b) => candidate.cmp_best_first(b, self.params.sense).is_lt(),
        };
        if better {
            self.best = Some(candidate.clone());
        }
    }

    fn record(&mut self) {
        let mut values: Vec<f64> = self.population.iter().map(|i| i.fitness).collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let median = median(&mut values);
        self.history.push(GenerationRecord {
            generation: self.generation,
            fes_used: self.fes_used,
            best_fitness: self.best.as_ref().map_or(f64::NAN, |b| b.fitness),
            median_fitness: median,
            mean_fitness: mean,
        });
    }

    fn check_termination(&self, budget: &EvalBudget) -> Option<StopReason> {
        if self.exhausted(budget) {
            return Some(StopReason::BudgetExhausted);
        }
        if self.termination.stagnation_enabled {
            let skip = usize::from(self.seed_all_first);
            let medians: Vec<f64> = self.history.iter().skip(skip).map(|h| h.median_fitness).collect();
            if stagnation_check(
                &medians,
                self.termination.stagnation_window,
                self.termination.stagnation_accuracy,
                self.params.sense,
            ) {
                return Some(StopReason::Stagnation);
            }
        }
        None
    }

    /// Runs one generation. Returns the stop reason once the run has ended;
    /// further calls are no-ops.
    pub fn step<R: Rng + ?Sized>(&mut self, budget: &mut EvalBudget, rng: &mut R) -> Result<Option<StopReason>> {
        if let Some(stop) = self.stop {
            return Ok(Some(stop));
        }
        if let Some(stop) = self.check_termination(budget) {
            self.stop = Some(stop);
            return Ok(Some(stop));
        }

        let t = self.generation;
        let selected = if t == 0 && self.seed_all_first {
            SelectedSet::new(self.population.clone(), t)?
        } else {
            truncation_select(&self.population, self.params.selection_ratio, self.params.sense, t)?
        };
        let mean = estimate_mean(&selected);
        let covariance = estimate_covariance_with_archive(&selected, &self.archive, &mean)?;
        if !(t == 0 && self.seed_all_first) {
            self.archive.push(selected.clone())?;
        }
        self.last_selected = Some(selected);

        let model = match GaussianModel::build(mean, covariance) {
            Ok(model) => model,
            Err(Error::DegenerateModel { .. }) => {
                self.stop = Some(StopReason::DegenerateModel);
                return Ok(self.stop);
            }
            Err(e) => return Err(e),
        };

        let elite = self.best.clone().expect("an evaluated population has a best member");
        let mut next = Vec::with_capacity(self.params.population_size);
        next.push(elite);
        for _ in 1..self.params.population_size {
            let x = match self.params.bound_handling {
                BoundHandling::Resample => bound_repair(model.sample_one(rng), self.bounds, rng),
                BoundHandling::Reflect => bound_reflect(model.sample_one(rng), self.bounds, rng),
            };
            match self.evaluate(x, budget) {
                Some(ind) => {
                    self.offer_best(&ind);
                    next.push(ind);
                }
                None => {
                    self.last_model = Some(model);
                    self.stop = Some(StopReason::BudgetExhausted);
                    return Ok(self.stop);
                }
            }
        }
        self.last_model = Some(model);
        self.population = next;
        self.generation += 1;
        self.record();
        Ok(None)
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    /// Archive as it will be used by the next call to [`step`](Self::step).
    pub fn archive(&self) -> &Archive {
        &self.archive
    }

    pub fn best(&self) -> Option<&Individual> {
        self.best.as_ref()
    }

    pub fn fes_used(&self) -> u64 {
        self.fes_used
    }

    pub fn history(&self) -> &[GenerationRecord] {
        &self.history
    }

    pub fn last_selected(&self) -> Option<&SelectedSet> {
        self.last_selected.as_ref()
    }

    pub fn last_model(&self) -> Option<&GaussianModel> {
        self.last_model.as_ref()
    }

    pub fn into_result(self) -> Eda2Result {
        Eda2Result {
            best: self.best,
            fes_used: self.fes_used,
            generations: self.generation,
            history: self.history,
            stop: self.stop.unwrap_or(StopReason::BudgetExhausted),
        }
    }
}

/// Runs EDA² until the termination policy fires, the shared `budget` runs
/// out, or the model degenerates.
pub fn run_eda2<O: Objective + ?Sized, R: Rng + ?Sized>(
    objective: &O,
    bounds: &Bounds,
    params: Eda2Params,
    termination: TerminationPolicy,
    init: Option<Vec<Individual>>,
    budget: &mut EvalBudget,
    rng: &mut R,
) -> Result<Eda2Result> {
    if budget.is_exhausted() {
        params.validate()?;
        let best = init
            .iter()
            .flatten()
            .filter(|i| i.is_evaluated())
            .min_by(|a, b| a.cmp_best_first(b, params.sense))
            .cloned();
        return Ok(Eda2Result { best, fes_used: 0, generations: 0, history: Vec::new(), stop: StopReason::BudgetExhausted });
    }
    let mut run = Eda2::start(objective, bounds, params, termination, init, budget, rng)?;
    while run.step(budget, rng)?.is_none() {}
    Ok(run.into_result())
}
