//! Known global optima for the functions whose optima are found numerically,
//! and the plain-text table format they are stored in: one vector per line,
//! coordinates separated by single spaces, `#` starting a comment line.

use std::f64::consts::PI;

use super::cec2013::{shubert_factor, uneven_decreasing_maxima};
use crate::error::{invalid, Result};

/// Ids of the functions with a stored optima table.
pub const STORED_IDS: [usize; 7] = [3, 4, 5, 6, 7, 8, 9];

const F3: &str = include_str!("../../data/optima/cec2013-f3.txt");
const F4: &str = include_str!("../../data/optima/cec2013-f4.txt");
const F5: &str = include_str!("../../data/optima/cec2013-f5.txt");
const F6: &str = include_str!("../../data/optima/cec2013-f6.txt");
const F7: &str = include_str!("../../data/optima/cec2013-f7.txt");
const F8: &str = include_str!("../../data/optima/cec2013-f8.txt");
const F9: &str = include_str!("../../data/optima/cec2013-f9.txt");

/// File name of the stored table for function `id`.
pub fn file_name(id: usize) -> String {
    format!("cec2013-f{id}.txt")
}

pub(crate) fn stored(id: usize) -> Vec<Vec<f64>> {
    let text = match id {
        3 => F3,
        4 => F4,
        5 => F5,
        6 => F6,
        7 => F7,
        8 => F8,
        9 => F9,
        _ => panic!("no stored optima for f{id}"),
    };
    parse_table(text).expect("bundled optima tables are well-formed")
}

pub fn parse_table(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| tok.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| invalid(format!("line {}: {e}", lineno + 1)))?;
        if let Some(first) = rows.first() {
            let first: &Vec<f64> = first;
            if first.len() != row.len() {
                return Err(invalid(format!("line {}: expected {} columns", lineno + 1, first.len())));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn format_table(rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Recomputes the optima table for function `id` from scratch.
pub fn generate(id: usize) -> Option<Vec<Vec<f64>>> {
    match id {
        3 => Some(vec![vec![golden_max(|x| uneven_decreasing_maxima(&[x]), 0.06, 0.1)]]),
        4 => Some(
            [[3.0, 2.0], [-2.805118, 3.131312], [-3.779310, -3.283186], [3.584428, -1.848126]]
                .iter()
                .map(|s| newton_2d(*s, himmelblau_derivatives).to_vec())
                .collect(),
        ),
        5 => Some(
            [[0.0898, -0.7126], [-0.0898, 0.7126]]
                .iter()
                .map(|s| newton_2d(*s, camel_derivatives).to_vec())
                .collect(),
        ),
        6 => Some(shubert_optima(2)),
        8 => Some(shubert_optima(3)),
        7 => Some(vincent_optima(2)),
        9 => Some(vincent_optima(3)),
        _ => None,
    }
}

/// Golden-section search for the maximum of a unimodal function on `[lo, hi]`.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let a = hi - ratio * (hi - lo);
        let b = lo + ratio * (hi - lo);
        if f(a) < f(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    0.5 * (lo + hi)
}

type Derivatives = fn([f64; 2]) -> ([f64; 2], [[f64; 2]; 2]);

/// Newton iteration on the gradient of a smooth 2-D function.
pub(crate) fn newton_2d(mut x: [f64; 2], derivatives: Derivatives) -> [f64; 2] {
    for _ in 0..100 {
        let (g, h) = derivatives(x);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det == 0.0 {
            break;
        }
        let dx = (h[1][1] * g[0] - h[0][1] * g[1]) / det;
        let dy = (h[0][0] * g[1] - h[1][0] * g[0]) / det;
        x = [x[0] - dx, x[1] - dy];
        if dx.abs().max(dy.abs()) < 1e-15 {
            break;
        }
    }
    x
}

fn himmelblau_derivatives([x, y]: [f64; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
    let a = x * x + y - 11.0;
    let b = x + y * y - 7.0;
    let g = [-(4.0 * x * a + 2.0 * b), -(2.0 * a + 4.0 * y * b)];
    let hxy = -(4.0 * x + 4.0 * y);
    let h = [[-(4.0 * a + 8.0 * x * x + 2.0), hxy], [hxy, -(2.0 + 4.0 * b + 8.0 * y * y)]];
    (g, h)
}

fn camel_derivatives([x, y]: [f64; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
    let g = [-(8.0 * x - 8.4 * x.powi(3) + 2.0 * x.powi(5) + y), -(x + 16.0 * y.powi(3) - 8.0 * y)];
    let h = [[-(8.0 - 25.2 * x * x + 10.0 * x.powi(4)), -1.0], [-1.0, -(48.0 * y * y - 8.0)]];
    (g, h)
}

fn shubert_factor_d1(x: f64) -> f64 {
    (1..=5).map(|j| -((j * (j + 1)) as f64) * ((j + 1) as f64 * x + j as f64).sin()).sum()
}

fn shubert_factor_d2(x: f64) -> f64 {
    (1..=5).map(|j| -((j * (j + 1) * (j + 1)) as f64) * ((j + 1) as f64 * x + j as f64).cos()).sum()
}

/// Every stationary point of one Shubert factor on `[-10, 10]`.
fn shubert_factor_stationary_points() -> Vec<f64> {
    let steps = 200_000;
    let h = 20.0 / steps as f64;
    let mut out = Vec::new();
    let mut prev = shubert_factor_d1(-10.0);
    for k in 1..=steps {
        let x = -10.0 + k as f64 * h;
        let cur = shubert_factor_d1(x);
        if prev.signum() != cur.signum() {
            let mut r = x - 0.5 * h;
            for _ in 0..50 {
                let step = shubert_factor_d1(r) / shubert_factor_d2(r);
                r -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            out.push(r);
        }
        prev = cur;
    }
    out
}

/// Global maximizers of the negated Shubert product in `dim` dimensions:
/// exactly one coordinate sits on a global minimum of the factor, the others
/// on global maxima.
fn shubert_optima(dim: usize) -> Vec<Vec<f64>> {
    let stationary = shubert_factor_stationary_points();
    let values: Vec<f64> = stationary.iter().map(|&x| shubert_factor(x)).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pick = |target: f64| -> Vec<f64> {
        let mut xs: Vec<f64> = stationary
            .iter()
            .zip(&values)
            .filter(|(_, v)| (*v - target).abs() < 1e-9)
            .map(|(x, _)| *x)
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        xs
    };
    let lows = pick(min);
    let highs = pick(max);

    let mut out = Vec::new();
    for low_axis in 0..dim {
        let mut stack: Vec<Vec<f64>> = vec![Vec::new()];
        for axis in 0..dim {
            let choices = if axis == low_axis { &lows } else { &highs };
            stack = stack
                .into_iter()
                .flat_map(|prefix| {
                    choices.iter().map(move |&c| {
                        let mut v = prefix.clone();
                        v.push(c);
                        v
                    })
                })
                .collect();
        }
        out.extend(stack);
    }
    out.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    out
}

/// Points where every coordinate satisfies `sin(10 ln x) = 1` inside `[0.25, 10]`.
fn vincent_optima(dim: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (-5..5)
        .map(|k| ((PI / 2.0 + 2.0 * PI * k as f64) / 10.0).exp())
        .filter(|x| (0.25..=10.0).contains(x))
        .collect();
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&c| {
                    let mut v = prefix.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}
