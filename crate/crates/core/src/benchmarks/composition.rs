//! Composition functions: several shifted, scaled and rotated base functions
//! blended with distance-based weights.
//!
//! Each component `i` is normalized so that it reaches `2000` at the corner
//! `5·1` of the domain, and its weight decays like a Gaussian of width `σᵢ`
//! around its shift point. At a shift point the matching component has
//! weight one and all others vanish, so every component with the smallest
//! bias contributes one global optimum. The result is negated so the suite
//! stays a maximization problem with optimum value `−min(bias)`.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{basic, Problem};
use crate::error::{invalid, Result};
use crate::individual::{euclidean, Bounds, Sense};

/// Scale each normalized component reaches at the domain corner.
const NORMALIZED_HEIGHT: f64 = 2000.0;
const DOMAIN: f64 = 5.0;
/// Shift points are drawn from this inner box so none sits on the boundary.
const SHIFT_RANGE: f64 = 4.0;
const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasicFunction {
    Sphere,
    Rastrigin,
    Griewank,
    Weierstrass,
    ExpandedGriewankRosenbrock,
}

impl BasicFunction {
    pub fn eval(self, z: &[f64]) -> f64 {
        match self {
            BasicFunction::Sphere => basic::sphere(z),
            BasicFunction::Rastrigin => basic::rastrigin(z),
            BasicFunction::Griewank => basic::griewank(z),
            BasicFunction::Weierstrass => basic::weierstrass(z),
            BasicFunction::ExpandedGriewankRosenbrock => basic::expanded_griewank_rosenbrock(z),
        }
    }
}

/// Component list with per-component width `σ`, scale `λ` and bias.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionSpec {
    pub components: Vec<BasicFunction>,
    pub sigmas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub biases: Vec<f64>,
    pub rotated: bool,
}

impl CompositionSpec {
    fn zero_bias(components: Vec<BasicFunction>, sigmas: Vec<f64>, lambdas: Vec<f64>, rotated: bool) -> Self {
        let biases = vec![0.0; components.len()];
        Self { components, sigmas, lambdas, biases, rotated }
    }

    pub fn cf1() -> Self {
        use BasicFunction::*;
        Self::zero_bias(
            vec![Griewank, Griewank, Weierstrass, Weierstrass, Sphere, Sphere],
            vec![1.0; 6],
            vec![1.0, 1.0, 8.0, 8.0, 1.0 / 5.0, 1.0 / 5.0],
            false,
        )
    }

    pub fn cf2() -> Self {
        use BasicFunction::*;
        Self::zero_bias(
            vec![Rastrigin, Rastrigin, Weierstrass, Weierstrass, Griewank, Griewank, Sphere, Sphere],
            vec![1.0; 8],
            vec![1.0, 1.0, 10.0, 10.0, 1.0 / 10.0, 1.0 / 10.0, 1.0 / 7.0, 1.0 / 7.0],
            false,
        )
    }

    pub fn cf3() -> Self {
        use BasicFunction::*;
        Self::zero_bias(
            vec![
                ExpandedGriewankRosenbrock,
                ExpandedGriewankRosenbrock,
                Weierstrass,
                Weierstrass,
                Griewank,
                Griewank,
            ],
            vec![1.0, 1.0, 2.0, 2.0, 2.0, 2.0],
            vec![1.0 / 4.0, 1.0 / 10.0, 2.0, 1.0, 2.0, 5.0],
            true,
        )
    }

    pub fn cf4() -> Self {
        use BasicFunction::*;
        Self::zero_bias(
            vec![
                Rastrigin,
                Rastrigin,
                ExpandedGriewankRosenbrock,
                ExpandedGriewankRosenbrock,
                Weierstrass,
                Weierstrass,
                Griewank,
                Griewank,
            ],
            vec![1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0],
            vec![4.0, 1.0, 4.0, 1.0, 1.0 / 10.0, 1.0 / 5.0, 1.0 / 10.0, 1.0 / 40.0],
            true,
        )
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// A fully specified composition function (minimization form, before negation).
#[derive(Debug, Clone)]
pub struct Composition {
    spec: CompositionSpec,
    shifts: Vec<Vec<f64>>,
    rotations: Vec<DMatrix<f64>>,
    fmax: Vec<f64>,
    dim: usize,
}

impl Composition {
    pub fn new(spec: CompositionSpec, shifts: Vec<Vec<f64>>, rotations: Vec<DMatrix<f64>>) -> Result<Self> {
        let k = spec.len();
        if k == 0 {
            return Err(invalid("a composition needs at least one component"));
        }
        if spec.sigmas.len() != k || spec.lambdas.len() != k || spec.biases.len() != k {
            return Err(invalid("sigma, lambda and bias lists must match the component count"));
        }
        if shifts.len() != k || rotations.len() != k {
            return Err(invalid(format!(
                "{k} components but {} shifts and {} rotations",
                shifts.len(),
                rotations.len()
            )));
        }
        let dim = shifts[0].len();
        if dim == 0 || shifts.iter().any(|s| s.len() != dim) {
            return Err(invalid("shift points must share a non-zero dimension"));
        }
        for (i, r) in rotations.iter().enumerate() {
            if r.shape() != (dim, dim) {
                return Err(invalid(format!("rotation {i} is not {dim}x{dim}")));
            }
            let defect = (r.transpose() * r - DMatrix::identity(dim, dim)).abs().max();
            if !(defect <= ORTHOGONALITY_TOLERANCE) {
                return Err(invalid(format!("rotation {i} is not orthogonal (defect {defect:e})")));
            }
        }
        let mut comp = Self { spec, shifts, rotations, fmax: Vec::new(), dim };
        let corner = vec![DOMAIN; dim];
        comp.fmax = (0..k).map(|i| comp.component_raw(i, &corner, false)).collect();
        Ok(comp)
    }

    /// `fᵢ(((x − oᵢ)/λᵢ) Mᵢ)`, or without the shift when `shifted` is false.
    fn component_raw(&self, i: usize, x: &[f64], shifted: bool) -> f64 {
        let lambda = self.spec.lambdas[i];
        let r = &self.rotations[i];
        let scaled: Vec<f64> = x
            .iter()
            .zip(&self.shifts[i])
            .map(|(v, o)| if shifted { (v - o) / lambda } else { v / lambda })
            .collect();
        // Row vector times matrix.
        let z: Vec<f64> = (0..self.dim).map(|c| (0..self.dim).map(|row| scaled[row] * r[(row, c)]).sum()).collect();
        self.spec.components[i].eval(&z)
    }

    fn weights(&self, x: &[f64]) -> Vec<f64> {
        let mut w: Vec<f64> = self
            .shifts
            .iter()
            .zip(&self.spec.sigmas)
            .map(|(o, s)| {
                let d2: f64 = x.iter().zip(o).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2 / (2.0 * self.dim as f64 * s * s)).exp()
            })
            .collect();
        let max = w.iter().copied().fold(0.0, f64::max);
        let damp = 1.0 - max.powi(10);
        for v in w.iter_mut() {
            if *v != max {
                *v *= damp;
            }
        }
        let sum: f64 = w.iter().sum();
        if sum == 0.0 {
            vec![1.0 / w.len() as f64; w.len()]
        } else {
            w.into_iter().map(|v| v / sum).collect()
        }
    }

    /// Weighted sum of normalized components; minimized at the shifts.
    pub fn raw_value(&self, x: &[f64]) -> f64 {
        self.weights(x)
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let normalized = NORMALIZED_HEIGHT * self.component_raw(i, x, true) / self.fmax[i];
                w * (normalized + self.spec.biases[i])
            })
            .sum()
    }

    /// Maximization form used by the suite.
    pub fn value(&self, x: &[f64]) -> f64 {
        -self.raw_value(x)
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn shifts(&self) -> &[Vec<f64>] {
        &self.shifts
    }

    pub fn rotations(&self) -> &[DMatrix<f64>] {
        &self.rotations
    }

    /// Shift points of the components with the smallest bias.
    pub fn global_optima(&self) -> Vec<Vec<f64>> {
        let min = self.spec.biases.iter().copied().fold(f64::INFINITY, f64::min);
        self.shifts
            .iter()
            .zip(&self.spec.biases)
            .filter(|(_, &b)| b == min)
            .map(|(s, _)| s.clone())
            .collect()
    }

    pub fn optimum_value(&self) -> f64 {
        -self.spec.biases.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `R`'s diagonal folded into `Q`.
pub fn random_rotation<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..dim {
        if r[(c, c)] < 0.0 {
            q.column_mut(c).neg_mut();
        }
    }
    q
}

/// Seeded shift points in `[−4, 4]^dim`, kept at least `min_separation` apart.
fn random_shifts<R: Rng + ?Sized>(count: usize, dim: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let min_separation = 1.0;
    let mut shifts: Vec<Vec<f64>> = Vec::with_capacity(count);
    while shifts.len() < count {
        let candidate: Vec<f64> = (0..dim).map(|_| rng.random_range(-SHIFT_RANGE..=SHIFT_RANGE)).collect();
        if shifts.iter().all(|s| euclidean(s, &candidate) >= min_separation) {
            shifts.push(candidate);
        }
    }
    shifts
}

/// Builds a composition problem on `[−5, 5]^dim` with shifts (and, for
/// rotated specs, rotations) drawn deterministically from `seed`.
pub fn make_composition(name: &str, spec: &CompositionSpec, dim: usize, max_fes: u64, seed: u64) -> Result<Problem> {
    let mut rng = crate::seeded_rng(seed);
    let shifts = random_shifts(spec.len(), dim, &mut rng);
    let rotations = (0..spec.len())
        .map(|_| if spec.rotated { random_rotation(dim, &mut rng) } else { DMatrix::identity(dim, dim) })
        .collect();
    let comp = Composition::new(spec.clone(), shifts, rotations)?;
    composition_problem(name, comp, max_fes)
}

/// Wraps an explicit composition as a [`Problem`].
pub fn composition_problem(name: &str, comp: Composition, max_fes: u64) -> Result<Problem> {
    let dim = comp.dimension();
    let optima = comp.global_optima();
    let value = comp.optimum_value();
    let comp = Arc::new(comp);
    Problem::new(
        name,
        Bounds::uniform(dim, -DOMAIN, DOMAIN)?,
        Sense::Maximize,
        value,
        optima,
        max_fes,
        Arc::new(move |x: &[f64]| comp.value(x)),
    )
}
