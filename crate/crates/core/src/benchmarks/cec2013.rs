//! The twenty functions of the CEC'2013 niching suite. All are maximized.
//!
//! f1–f10 are closed forms. f11–f20 are compositions whose shifts and
//! rotations come from a fixed seed rather than the competition's data
//! files, so their landscapes are structurally equivalent but not identical
//! to the published ones.

use std::f64::consts::PI;
use std::sync::Arc;

use super::composition::{make_composition, CompositionSpec};
use super::optima;
use super::{ObjectiveFn, Problem};
use crate::error::{invalid, Result};
use crate::individual::{Bounds, Sense};

/// Dimension, number of global optima and MaxFEs of every function.
pub const TABLE: [(usize, usize, u64); 20] = [
    (1, 2, 50_000),
    (1, 5, 50_000),
    (1, 1, 50_000),
    (2, 4, 50_000),
    (2, 2, 50_000),
    (2, 18, 200_000),
    (2, 36, 200_000),
    (3, 81, 400_000),
    (3, 216, 400_000),
    (2, 12, 200_000),
    (2, 6, 200_000),
    (2, 8, 200_000),
    (2, 6, 200_000),
    (3, 6, 400_000),
    (3, 8, 400_000),
    (5, 6, 400_000),
    (5, 8, 400_000),
    (10, 6, 400_000),
    (10, 8, 400_000),
    (20, 8, 400_000),
];

/// Base of the per-function seeds used for the composition functions:
/// function `id` uses `COMPOSITION_SEED_BASE + id`.
pub const COMPOSITION_SEED_BASE: u64 = 2013_0000;

pub fn five_uneven_peak_trap(x: &[f64]) -> f64 {
    let x = x[0];
    match x {
        x if x < 2.5 => 80.0 * (2.5 - x),
        x if x < 5.0 => 64.0 * (x - 2.5),
        x if x < 7.5 => 64.0 * (7.5 - x),
        x if x < 12.5 => 28.0 * (x - 7.5),
        x if x < 17.5 => 28.0 * (17.5 - x),
        x if x < 22.5 => 32.0 * (x - 17.5),
        x if x < 27.5 => 32.0 * (27.5 - x),
        x => 80.0 * (x - 27.5),
    }
}

pub fn equal_maxima(x: &[f64]) -> f64 {
    (5.0 * PI * x[0]).sin().powi(6)
}

pub fn uneven_decreasing_maxima(x: &[f64]) -> f64 {
    let x = x[0];
    let envelope = (-2.0 * 2f64.ln() * ((x - 0.08) / 0.854).powi(2)).exp();
    envelope * (5.0 * PI * (x.powf(0.75) - 0.05)).sin().powi(6)
}

pub fn himmelblau(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    200.0 - (a * a + b - 11.0).powi(2) - (a + b * b - 7.0).powi(2)
}

pub fn six_hump_camel_back(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    let a2 = a * a;
    let b2 = b * b;
    -((4.0 - 2.1 * a2 + a2 * a2 / 3.0) * a2 + a * b + (4.0 * b2 - 4.0) * b2)
}

/// One factor of the Shubert product.
pub fn shubert_factor(x: f64) -> f64 {
    (1..=5).map(|j| j as f64 * ((j + 1) as f64 * x + j as f64).cos()).sum()
}

pub fn shubert(x: &[f64]) -> f64 {
    -x.iter().map(|&v| shubert_factor(v)).product::<f64>()
}

pub fn vincent(x: &[f64]) -> f64 {
    x.iter().map(|v| (10.0 * v.ln()).sin()).sum::<f64>() / x.len() as f64
}

pub fn modified_rastrigin(x: &[f64]) -> f64 {
    const K: [f64; 2] = [3.0, 4.0];
    -x.iter().zip(K).map(|(v, k)| 10.0 + 9.0 * (2.0 * PI * k * v).cos()).sum::<f64>()
}

/// Builds function `id` (1–20) with the dimension, optimum count and MaxFEs
/// of the suite.
pub fn make_cec2013_problem(id: usize) -> Result<Problem> {
    if !(1..=20).contains(&id) {
        return Err(invalid(format!("CEC'2013 niching function id {id} outside 1..=20")));
    }
    let (dim, _, max_fes) = TABLE[id - 1];
    let name = format!("cec2013/f{id}");
    let closed = |lo: f64, hi: f64, value: f64, optima: Vec<Vec<f64>>, f: ObjectiveFn| {
        Problem::new(name.clone(), Bounds::uniform(dim, lo, hi)?, Sense::Maximize, value, optima, max_fes, f)
    };
    match id {
        1 => closed(0.0, 30.0, 200.0, vec![vec![0.0], vec![30.0]], Arc::new(five_uneven_peak_trap)),
        2 => closed(
            0.0,
            1.0,
            1.0,
            (0..5).map(|k| vec![0.1 + 0.2 * k as f64]).collect(),
            Arc::new(equal_maxima),
        ),
        3 => {
            let optima = optima::stored(3);
            let value = uneven_decreasing_maxima(&optima[0]);
            closed(0.0, 1.0, value, optima, Arc::new(uneven_decreasing_maxima))
        }
        4 => closed(-6.0, 6.0, 200.0, optima::stored(4), Arc::new(himmelblau)),
        5 => {
            let optima = optima::stored(5);
            let value = six_hump_camel_back(&optima[0]);
            let bounds = Bounds::new(vec![-1.9, -1.1], vec![1.9, 1.1])?;
            Problem::new(name, bounds, Sense::Maximize, value, optima, max_fes, Arc::new(six_hump_camel_back))
        }
        6 | 8 => {
            let optima = optima::stored(id);
            let value = shubert(&optima[0]);
            closed(-10.0, 10.0, value, optima, Arc::new(shubert))
        }
        7 | 9 => closed(0.25, 10.0, 1.0, optima::stored(id), Arc::new(vincent)),
        10 => {
            let xs = [1.0 / 6.0, 0.5, 5.0 / 6.0];
            let ys = [0.125, 0.375, 0.625, 0.875];
            let optima = xs.iter().flat_map(|&x| ys.iter().map(move |&y| vec![x, y])).collect();
            closed(0.0, 1.0, -2.0, optima, Arc::new(modified_rastrigin))
        }
        _ => {
            let spec = match id {
                11 => CompositionSpec::cf1(),
                12 => CompositionSpec::cf2(),
                13 | 14 | 16 | 18 => CompositionSpec::cf3(),
                _ => CompositionSpec::cf4(),
            };
            make_composition(&name, &spec, dim, max_fes, COMPOSITION_SEED_BASE + id as u64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_inventory_matches_construction() {
        for id in 1..=20 {
            let p = make_cec2013_problem(id).unwrap();
            let (d, go, fes) = TABLE[id - 1];
            assert_eq!(p.dimension(), d, "f{id}");
            assert_eq!(p.global_optima().len(), go, "f{id}");
            assert_eq!(p.max_fes(), fes, "f{id}");
            assert_eq!(p.sense(), Sense::Maximize);
        }
        assert!(make_cec2013_problem(0).is_err());
        assert!(make_cec2013_problem(21).is_err());
    }

    #[test]
    fn known_values() {
        assert!((equal_maxima(&[0.1]) - 1.0).abs() < 1e-15);
        assert_eq!(five_uneven_peak_trap(&[0.0]), 200.0);
        assert_eq!(five_uneven_peak_trap(&[30.0]), 200.0);
        assert_eq!(himmelblau(&[3.0, 2.0]), 200.0);
        assert!((modified_rastrigin(&[0.5, 0.125]) + 2.0).abs() < 1e-12);
        let camel = make_cec2013_problem(5).unwrap();
        assert!((camel.global_optimum_value() - 1.031628453489877).abs() < 1e-12);
        let f6 = make_cec2013_problem(6).unwrap();
        assert!((f6.global_optimum_value() - 186.7309088310239).abs() < 1e-9);
        let f8 = make_cec2013_problem(8).unwrap();
        assert!((f8.global_optimum_value() - 2709.093505572820).abs() < 1e-8);
    }
}
