//! Shifted and rotated elliptic and Rosenbrock functions for parameter
//! studies of the single-basin optimizer. Both are minimized with optimum
//! value zero at the shift point.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::composition::random_rotation;
use super::{basic, Problem};
use crate::error::{invalid, Result};
use crate::individual::{Bounds, Sense};

/// Seed used when a study problem is requested by id.
pub const STUDY_SEED: u64 = 2005;
pub const STUDY_MAX_FES: u64 = 200_000;
const DOMAIN: f64 = 100.0;
const SHIFT_RANGE: f64 = 80.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyFunction {
    Elliptic,
    Rosenbrock,
}

impl StudyFunction {
    pub fn id_name(self) -> &'static str {
        match self {
            StudyFunction::Elliptic => "elliptic",
            StudyFunction::Rosenbrock => "rosenbrock",
        }
    }
}

/// `f(x) = base(M (x − o))` for the elliptic, and `base(M (x − o) + 1)` for
/// Rosenbrock so its optimum also lands on `o`.
#[derive(Debug, Clone)]
pub struct ShiftedRotated {
    which: StudyFunction,
    shift: DVector<f64>,
    rotation: DMatrix<f64>,
}

impl ShiftedRotated {
    pub fn new(which: StudyFunction, shift: Vec<f64>, rotation: DMatrix<f64>) -> Result<Self> {
        let d = shift.len();
        if rotation.shape() != (d, d) {
            return Err(invalid("rotation shape must match the shift dimension"));
        }
        Ok(Self { which, shift: DVector::from_vec(shift), rotation })
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let diff = DVector::from_column_slice(x) - &self.shift;
        let z = &self.rotation * diff;
        match self.which {
            StudyFunction::Elliptic => basic::high_conditioned_elliptic(z.as_slice()),
            StudyFunction::Rosenbrock => {
                let z: Vec<f64> = z.iter().map(|v| v + 1.0).collect();
                basic::rosenbrock(&z)
            }
        }
    }

    pub fn shift(&self) -> &[f64] {
        self.shift.as_slice()
    }
}

/// Seeded shifted-rotated study problem on `[−100, 100]^dimension`.
pub fn make_cec2005_study_problem(which: StudyFunction, dimension: usize, seed: u64) -> Result<Problem> {
    if dimension < 2 {
        return Err(invalid("study problems need at least two dimensions"));
    }
    let mut rng = crate::seeded_rng(seed ^ ((dimension as u64) << 32) ^ (which as u64));
    let shift: Vec<f64> = (0..dimension).map(|_| rng.random_range(-SHIFT_RANGE..=SHIFT_RANGE)).collect();
    let rotation = random_rotation(dimension, &mut rng);
    let f = Arc::new(ShiftedRotated::new(which, shift.clone(), rotation)?);
    Problem::new(
        format!("study/{}-d{dimension}", which.id_name()),
        Bounds::uniform(dimension, -DOMAIN, DOMAIN)?,
        Sense::Minimize,
        0.0,
        vec![shift],
        STUDY_MAX_FES,
        Arc::new(move |x: &[f64]| f.value(x)),
    )
}
