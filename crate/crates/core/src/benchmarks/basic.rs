//! Unshifted, unrotated base functions. All are minimized and vanish at the
//! origin except [`rosenbrock`], which vanishes at `(1, …, 1)`.

use std::f64::consts::PI;

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn rastrigin(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0).sum()
}

pub fn griewank(x: &[f64]) -> f64 {
    let sum: f64 = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
    let prod: f64 = x.iter().enumerate().map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos()).product();
    sum - prod + 1.0
}

const WEIERSTRASS_A: f64 = 0.5;
const WEIERSTRASS_B: f64 = 3.0;
const WEIERSTRASS_KMAX: i32 = 20;

pub fn weierstrass(x: &[f64]) -> f64 {
    let term = |v: f64| -> f64 {
        (0..=WEIERSTRASS_KMAX)
            .map(|k| WEIERSTRASS_A.powi(k) * (2.0 * PI * WEIERSTRASS_B.powi(k) * (v + 0.5)).cos())
            .sum()
    };
    let offset = x.len() as f64 * term(0.0);
    x.iter().map(|&v| term(v)).sum::<f64>() - offset
}

fn griewank_of_rosenbrock(a: f64, b: f64) -> f64 {
    let r = 100.0 * (a * a - b).powi(2) + (1.0 - a).powi(2);
    1.0 + r * r / 4000.0 - r.cos()
}

/// Expanded Griewank-plus-Rosenbrock over consecutive coordinate pairs,
/// wrapping from the last coordinate back to the first. Shifted by one so
/// the minimum sits at the origin.
pub fn expanded_griewank_rosenbrock(x: &[f64]) -> f64 {
    let d = x.len();
    (0..d).map(|i| griewank_of_rosenbrock(x[i] + 1.0, x[(i + 1) % d] + 1.0)).sum()
}

/// Elliptic with condition number 10⁶ spread geometrically across the axes.
pub fn high_conditioned_elliptic(x: &[f64]) -> f64 {
    let d = x.len();
    if d == 1 {
        return x[0] * x[0];
    }
    x.iter()
        .enumerate()
        .map(|(i, v)| 1e6f64.powf(i as f64 / (d - 1) as f64) * v * v)
        .sum()
}

pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2).map(|w| 100.0 * (w[0] * w[0] - w[1]).powi(2) + (w[0] - 1.0).powi(2)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minima_are_zero() {
        for d in [1usize, 2, 5] {
            let z = vec![0.0; d];
            assert_eq!(sphere(&z), 0.0);
            assert!(rastrigin(&z).abs() < 1e-12);
            assert!(griewank(&z).abs() < 1e-12);
            assert!(weierstrass(&z).abs() < 1e-12);
            assert!(expanded_griewank_rosenbrock(&z).abs() < 1e-12);
            assert_eq!(high_conditioned_elliptic(&z), 0.0);
        }
        assert_eq!(rosenbrock(&[1.0, 1.0]), 0.0);
        assert_eq!(rosenbrock(&[1.0; 7]), 0.0);
    }

    #[test]
    fn elliptic_conditioning() {
        let mut e1 = vec![0.0; 20];
        e1[0] = 1.0;
        let mut ed = vec![0.0; 20];
        ed[19] = 1.0;
        let ratio = high_conditioned_elliptic(&e1) / high_conditioned_elliptic(&ed);
        assert!((ratio - 1e-6).abs() < 1e-18);
    }

    #[test]
    fn positive_away_from_minimum() {
        let x = [0.3, -1.2, 2.5];
        for f in [sphere, rastrigin, griewank, weierstrass, expanded_griewank_rosenbrock, high_conditioned_elliptic] {
            assert!(f(&x) > 0.0);
        }
    }
}
