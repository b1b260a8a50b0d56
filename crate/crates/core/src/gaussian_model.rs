//! Multivariate Gaussian models estimated from selected solutions.
//!
//! The mean always comes from the current selection alone. The covariance
//! can additionally pool an [`Archive`] of the selections made in the last
//! few generations, which stretches the model along the direction the mean
//! has been moving.

use std::collections::VecDeque;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::individual::Individual;

/// Relative starting jitter for the regularization ladder.
const JITTER_START: f64 = 1e-10;
/// Largest diagonal jitter tried before declaring the model degenerate.
const JITTER_CAP: f64 = 1e6;

/// The solutions chosen by selection in one generation.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectedSet {
    members: Vec<Individual>,
    generation: u64,
}

impl SelectedSet {
    pub fn new(members: Vec<Individual>, generation: u64) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(invalid("selected set must not be empty"));
        };
        let n = first.dimension();
        if n == 0 {
            return Err(invalid("genomes must have at least one coordinate"));
        }
        if members.iter().any(|m| m.dimension() != n) {
            return Err(invalid("all selected genomes must share one dimension"));
        }
        Ok(Self { members, generation })
    }

    /// Convenience constructor for bare points (fitness left unevaluated).
    pub fn from_points(points: Vec<Vec<f64>>, generation: u64) -> Result<Self> {
        Self::new(points.into_iter().map(Individual::unevaluated).collect(), generation)
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn dimension(&self) -> usize {
        self.members[0].dimension()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// FIFO window over the selections of the most recent generations.
///
/// Holds at most `capacity` sets; pushing into a full archive evicts the
/// oldest set. A capacity of zero keeps the archive permanently empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Archive {
    sets: VecDeque<SelectedSet>,
    capacity: usize,
}

impl Archive {
    pub fn new(capacity: usize) -> Self {
        Self { sets: VecDeque::with_capacity(capacity), capacity }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Stored sets, oldest first.
    pub fn sets(&self) -> impl ExactSizeIterator<Item = &SelectedSet> {
        self.sets.iter()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Total number of archived individuals, counted with multiplicity.
    pub fn member_count(&self) -> usize {
        self.sets.iter().map(SelectedSet::len).sum()
    }

    pub fn members(&self) -> impl Iterator<Item = &Individual> {
        self.sets.iter().flat_map(|s| s.members.iter())
    }

    pub fn generations(&self) -> Vec<u64> {
        self.sets.iter().map(SelectedSet::generation).collect()
    }

    pub fn push(&mut self, selected: SelectedSet) -> Result<()> {
        if let Some(newest) = self.sets.back() {
            if selected.generation <= newest.generation {
                return Err(invalid(format!(
                    "archive push out of order: generation {} after {}",
                    selected.generation, newest.generation
                )));
            }
        }
        if self.capacity == 0 {
            return Ok(());
        }
        if self.sets.len() == self.capacity {
            self.sets.pop_front();
        }
        self.sets.push_back(selected);
        Ok(())
    }
}

/// Coordinate-wise arithmetic mean of the selected genomes.
pub fn estimate_mean(selected: &SelectedSet) -> DVector<f64> {
    let n = selected.dimension();
    let mut sum = DVector::zeros(n);
    for m in &selected.members {
        for (s, v) in sum.iter_mut().zip(&m.genome) {
            *s += v;
        }
    }
    sum / selected.len() as f64
}

/// Biased (divide by count) scatter of the selected genomes about `mean`.
pub fn estimate_covariance(selected: &SelectedSet, mean: &DVector<f64>) -> Result<DMatrix<f64>> {
    scatter(selected.members.iter(), selected.len(), mean)
}

/// Scatter about `mean` of the multiset union of every archived member and
/// the current selection, divided by the pooled count.
pub fn estimate_covariance_with_archive(
    selected: &SelectedSet,
    archive: &Archive,
    mean: &DVector<f64>,
) -> Result<DMatrix<f64>> {
    let count = selected.len() + archive.member_count();
    scatter(archive.members().chain(selected.members.iter()), count, mean)
}

fn scatter<'a>(
    members: impl Iterator<Item = &'a Individual>,
    count: usize,
    mean: &DVector<f64>,
) -> Result<DMatrix<f64>> {
    let n = mean.len();
    let mut deviations = DMatrix::zeros(n, count);
    for (k, m) in members.enumerate() {
        if m.dimension() != n {
            return Err(invalid(format!(
                "genome of dimension {} does not match mean of dimension {n}",
                m.dimension()
            )));
        }
        for (i, (x, mu)) in m.genome.iter().zip(mean.iter()).enumerate() {
            deviations[(i, k)] = x - mu;
        }
    }
    let mut cov = &deviations * deviations.transpose();
    cov /= count as f64;
    Ok(cov)
}

/// A Gaussian with a cached lower-triangular factor for sampling and density
/// evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModel {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
    factor: DMatrix<f64>,
    jitter_applied: f64,
}

impl GaussianModel {
    /// Symmetrizes `covariance` and factorizes it, adding a growing diagonal
    /// jitter when the plain factorization fails.
    pub fn build(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let n = mean.len();
        if n == 0 || covariance.nrows() != n || covariance.ncols() != n {
            return Err(invalid(format!(
                "covariance of shape {}x{} does not match mean of dimension {n}",
                covariance.nrows(),
                covariance.ncols()
            )));
        }
        if mean.iter().chain(covariance.iter()).any(|v| !v.is_finite()) {
            return Err(Error::DegenerateModel { jitter: 0.0 });
        }
        let covariance = (&covariance + covariance.transpose()) * 0.5;

        if let Some(chol) = covariance.clone().cholesky() {
            return Ok(Self { mean, factor: chol.unpack(), covariance, jitter_applied: 0.0 });
        }

        let mut jitter = JITTER_START * (covariance.trace() / n as f64).max(1.0);
        while jitter <= JITTER_CAP {
            let mut shifted = covariance.clone();
            for i in 0..n {
                shifted[(i, i)] += jitter;
            }
            if let Some(chol) = shifted.cholesky() {
                return Ok(Self { mean, factor: chol.unpack(), covariance, jitter_applied: jitter });
            }
            jitter *= 10.0;
        }
        Err(Error::DegenerateModel { jitter: jitter / 10.0 })
    }

    pub fn dimension(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    /// The symmetrized covariance before regularization.
    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// Lower-triangular `L` with `L Lᵀ` equal to the regularized covariance.
    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    pub fn jitter_applied(&self) -> f64 {
        self.jitter_applied
    }

    pub fn regularized_covariance(&self) -> DMatrix<f64> {
        let mut c = self.covariance.clone();
        for i in 0..self.dimension() {
            c[(i, i)] += self.jitter_applied;
        }
        c
    }

    /// Draws one point as `mean + L z` with `z` standard normal.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let n = self.dimension();
        let z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let x = &self.mean + &self.factor * z;
        x.iter().copied().collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<Vec<f64>> {
        (0..count).map(|_| self.sample_one(rng)).collect()
    }

    /// Natural log of the density under the regularized covariance.
    pub fn log_density(&self, x: &[f64]) -> Result<f64> {
        let n = self.dimension();
        if x.len() != n {
            return Err(invalid(format!("point of dimension {} for model of dimension {n}", x.len())));
        }
        let diff = DVector::from_iterator(n, x.iter().zip(self.mean.iter()).map(|(a, m)| a - m));
        let y = self
            .factor
            .solve_lower_triangular(&diff)
            .ok_or(Error::DegenerateModel { jitter: self.jitter_applied })?;
        let log_det: f64 = 2.0 * self.factor.diagonal().iter().map(|d| d.ln()).sum::<f64>();
        Ok(-0.5 * (n as f64 * (2.0 * PI).ln() + log_det + y.norm_squared()))
    }
}
