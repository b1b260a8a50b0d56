//! Benchmark problems and evaluation accounting.
//!
//! Problems are addressed by string id: `cec2013/f1` … `cec2013/f20` for the
//! niching suite and `study/elliptic-d<D>` / `study/rosenbrock-d<D>` for the
//! shifted, rotated parameter-study functions.

pub mod basic;
pub mod cec2013;
pub mod composition;
pub mod optima;
pub mod study;

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::individual::{euclidean, Bounds, Sense};

pub use cec2013::make_cec2013_problem;
pub use composition::{make_composition, random_rotation, BasicFunction, Composition, CompositionSpec};
pub use study::{make_cec2005_study_problem, StudyFunction};

/// Anything that maps a point to an objective value.
pub trait Objective {
    fn dimension(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
}

/// Wraps a closure of fixed dimension as an [`Objective`].
pub struct FnObjective<F> {
    dimension: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64> FnObjective<F> {
    pub fn new(dimension: usize, f: F) -> Self {
        Self { dimension, f }
    }
}

impl<F: Fn(&[f64]) -> f64> Objective for FnObjective<F> {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Counts objective evaluations against a hard cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalBudget {
    max_fes: u64,
    used: u64,
}

impl EvalBudget {
    pub fn new(max_fes: u64) -> Self {
        Self { max_fes, used: 0 }
    }

    pub fn max_fes(&self) -> u64 {
        self.max_fes
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.max_fes - self.used
    }

    pub fn is_exhausted(&self) -> bool {
        self.used >= self.max_fes
    }

    /// Evaluates `x`, charging one evaluation, or fails without calling the
    /// objective when the cap is reached.
    pub fn evaluate<O: Objective + ?Sized>(&mut self, objective: &O, x: &[f64]) -> Result<f64> {
        if self.is_exhausted() {
            return Err(Error::BudgetExhausted { max_fes: self.max_fes });
        }
        self.used += 1;
        Ok(objective.value(x))
    }
}

pub type ObjectiveFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A benchmark: objective, search box, direction, known global optima and
/// evaluation budget.
#[derive(Clone)]
pub struct Problem {
    name: String,
    bounds: Bounds,
    sense: Sense,
    global_optimum_value: f64,
    global_optima: Vec<Vec<f64>>,
    niche_radius: f64,
    max_fes: u64,
    function: ObjectiveFn,
}

/// Largest allowed gap between a listed optimum's value and the stated optimum value.
pub const OPTIMUM_SELF_CHECK_TOLERANCE: f64 = 1e-6;

impl Problem {
    /// Builds a problem and checks every listed optimum lies in the box and
    /// attains `global_optimum_value`. The niche radius is half the smallest
    /// distance between two optima, or the box diagonal for a single optimum.
    pub fn new(
        name: impl Into<String>,
        bounds: Bounds,
        sense: Sense,
        global_optimum_value: f64,
        global_optima: Vec<Vec<f64>>,
        max_fes: u64,
        function: ObjectiveFn,
    ) -> Result<Self> {
        let name = name.into();
        if global_optima.is_empty() {
            return Err(invalid(format!("{name}: at least one global optimum is required")));
        }
        if max_fes == 0 {
            return Err(invalid(format!("{name}: MaxFEs must be positive")));
        }
        for (k, o) in global_optima.iter().enumerate() {
            if !bounds.contains(o) {
                return Err(invalid(format!("{name}: optimum {k} lies outside the bounds")));
            }
            let v = function(o);
            if !((v - global_optimum_value).abs() <= OPTIMUM_SELF_CHECK_TOLERANCE) {
                return Err(invalid(format!(
                    "{name}: optimum {k} evaluates to {v}, expected {global_optimum_value}"
                )));
            }
        }
        let niche_radius = default_niche_radius(&global_optima, &bounds);
        if !(niche_radius > 0.0) {
            return Err(invalid(format!("{name}: duplicate global optima")));
        }
        Ok(Self { name, bounds, sense, global_optimum_value, global_optima, niche_radius, max_fes, function })
    }

    pub fn with_max_fes(mut self, max_fes: u64) -> Self {
        self.max_fes = max_fes;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.bounds.dimension()
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn global_optimum_value(&self) -> f64 {
        self.global_optimum_value
    }

    pub fn global_optima(&self) -> &[Vec<f64>] {
        &self.global_optima
    }

    pub fn niche_radius(&self) -> f64 {
        self.niche_radius
    }

    pub fn max_fes(&self) -> u64 {
        self.max_fes
    }

    /// Uncounted evaluation. Optimizers should go through [`evaluate`].
    pub fn value(&self, x: &[f64]) -> f64 {
        (self.function)(x)
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dimension", &self.dimension())
            .field("sense", &self.sense)
            .field("global_optimum_value", &self.global_optimum_value)
            .field("optima", &self.global_optima.len())
            .field("niche_radius", &self.niche_radius)
            .field("max_fes", &self.max_fes)
            .finish()
    }
}

impl Objective for Problem {
    fn dimension(&self) -> usize {
        self.bounds.dimension()
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.function)(x)
    }
}

/// Counted evaluation of `problem` at `x`.
pub fn evaluate(problem: &Problem, x: &[f64], budget: &mut EvalBudget) -> Result<f64> {
    budget.evaluate(problem, x)
}

fn default_niche_radius(optima: &[Vec<f64>], bounds: &Bounds) -> f64 {
    if optima.len() == 1 {
        return bounds.diagonal();
    }
    let mut min = f64::INFINITY;
    for (i, a) in optima.iter().enumerate() {
        for b in &optima[i + 1..] {
            min = min.min(euclidean(a, b));
        }
    }
    0.5 * min
}

/// Resolves a problem id such as `cec2013/f7` or `study/elliptic-d20`.
pub fn problem_by_id(id: &str) -> Result<Problem> {
    let unknown = || Error::UnknownProblem(id.to_string());
    let (family, name) = id.split_once('/').ok_or_else(unknown)?;
    match family {
        "cec2013" => {
            let n: usize = name.strip_prefix('f').and_then(|s| s.parse().ok()).ok_or_else(unknown)?;
            if !(1..=20).contains(&n) {
                return Err(unknown());
            }
            make_cec2013_problem(n)
        }
        "study" => {
            let (which, dim) = name.split_once("-d").ok_or_else(unknown)?;
            let which = match which {
                "elliptic" => StudyFunction::Elliptic,
                "rosenbrock" => StudyFunction::Rosenbrock,
                _ => return Err(unknown()),
            };
            let dim: usize = dim.parse().map_err(|_| unknown())?;
            if dim < 2 {
                return Err(unknown());
            }
            make_cec2005_study_problem(which, dim, study::STUDY_SEED)
        }
        _ => Err(unknown()),
    }
}
