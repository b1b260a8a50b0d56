use std::cmp::Ordering;

use rand::Rng;

use crate::error::{invalid, Result};

/// Optimization direction of an objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    /// `true` if `a` is strictly better than `b`.
    #[inline]
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Maximize => a > b,
            Sense::Minimize => a < b,
        }
    }

    /// Orders fitness values from best to worst.
    #[inline]
    pub fn best_first(self, a: f64, b: f64) -> Ordering {
        match self {
            Sense::Maximize => b.total_cmp(&a),
            Sense::Minimize => a.total_cmp(&b),
        }
    }

    /// Signed improvement from `before` to `after`; positive means better.
    #[inline]
    pub fn improvement(self, before: f64, after: f64) -> f64 {
        match self {
            Sense::Maximize => after - before,
            Sense::Minimize => before - after,
        }
    }
}

/// A candidate solution with its cached objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: Vec<f64>,
    /// Objective value in the problem's native sense; `NaN` until evaluated.
    pub fitness: f64,
    /// Position in the evaluation sequence of the run that produced it.
    pub eval_index: u64,
}

impl Individual {
    pub fn unevaluated(genome: Vec<f64>) -> Self {
        Self { genome, fitness: f64::NAN, eval_index: 0 }
    }

    pub fn new(genome: Vec<f64>, fitness: f64, eval_index: u64) -> Self {
        Self { genome, fitness, eval_index }
    }

    pub fn is_evaluated(&self) -> bool {
        !self.fitness.is_nan()
    }

    pub fn dimension(&self) -> usize {
        self.genome.len()
    }

    /// Strict total order from best to worst: fitness first, then older
    /// evaluations first.
    pub fn cmp_best_first(&self, other: &Self, sense: Sense) -> Ordering {
        sense
            .best_first(self.fitness, other.fitness)
            .then(self.eval_index.cmp(&other.eval_index))
    }
}

/// Axis-aligned search box.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(invalid(format!(
                "bounds need matching non-empty lower/upper, got {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.iter().zip(&upper).any(|(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite()) {
            return Err(invalid("every bound must satisfy low < high and be finite"));
        }
        Ok(Self { lower, upper })
    }

    /// The same interval on every coordinate.
    pub fn uniform(dimension: usize, low: f64, high: f64) -> Result<Self> {
        Self::new(vec![low; dimension], vec![high; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x.iter().zip(self.lower.iter().zip(&self.upper)).all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    pub fn diagonal(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| rng.random_range(lo..=hi))
            .collect()
    }

    /// Redraws every out-of-range coordinate uniformly inside its interval;
    /// in-range coordinates pass through untouched.
    pub fn repair<R: Rng + ?Sized>(&self, mut x: Vec<f64>, rng: &mut R) -> Vec<f64> {
        for ((v, &lo), &hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            if !(lo <= *v && *v <= hi) {
                *v = rng.random_range(lo..=hi);
            }
        }
        x
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
