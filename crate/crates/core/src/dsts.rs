//! Clustering by fitness rank and distance to the nearest better solution.
//!
//! Solutions are ranked from worst to best. Each one gets a relative
//! distance `δ`: the distance to its nearest strictly better solution (the
//! best solution takes the largest `δ` of all the others). Solutions whose
//! `δ` exceeds `α·(δ_max − δ_min)` become centers, and everything else joins
//! the cluster of its nearest better neighbour.
//!
//! "Better" is the strict total order from [`strict_fitness_order`]: equal
//! fitness values are ranked by index, lower index worse.

use crate::error::{invalid, Result};
use crate::individual::{euclidean, Sense};

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringInput {
    pub points: Vec<Vec<f64>>,
    pub fitness: Vec<f64>,
    pub sense: Sense,
    pub alpha: f64,
}

impl ClusteringInput {
    pub fn new(points: Vec<Vec<f64>>, fitness: Vec<f64>, sense: Sense, alpha: f64) -> Result<Self> {
        let input = Self { points, fitness, sense, alpha };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.points.len();
        if m == 0 {
            return Err(invalid("nothing to cluster"));
        }
        if self.fitness.len() != m {
            return Err(invalid(format!("{m} points but {} fitness values", self.fitness.len())));
        }
        let n = self.points[0].len();
        if self.points.iter().any(|p| p.len() != n) {
            return Err(invalid("points must share one dimension"));
        }
        if self.fitness.iter().any(|f| !f.is_finite()) {
            return Err(invalid("fitness values must be finite"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    /// Center point indices, best center first. Cluster id `k` belongs to `centers[k]`.
    pub centers: Vec<usize>,
    /// Cluster id of every point.
    pub labels: Vec<usize>,
    pub deltas: Vec<f64>,
    pub threshold: f64,
}

impl ClusteringResult {
    pub fn cluster_count(&self) -> usize {
        self.centers.len()
    }

    /// Member indices of every cluster, in input order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.centers.len()];
        for (i, &label) in self.labels.iter().enumerate() {
            out[label].push(i);
        }
        out
    }
}

/// Indices ordered from worst to best; ties put the lower index first.
pub fn strict_fitness_order(fitness: &[f64], sense: Sense) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    // best_first(b, a) sorts worst first; the stable sort keeps index order on ties.
    order.sort_by(|&a, &b| sense.best_first(fitness[b], fitness[a]));
    order
}

/// For every point, its nearest strictly better point and the distance to
/// it. The best point has no such neighbour.
fn nearest_better(points: &[Vec<f64>], order: &[usize]) -> Vec<Option<(usize, f64)>> {
    let mut out = vec![None; points.len()];
    // Walk best to worst; everything already visited is strictly better.
    let mut visited: Vec<usize> = Vec::with_capacity(points.len());
    for &i in order.iter().rev() {
        let mut nearest: Option<(usize, f64)> = None;
        for &j in &visited {
            let d = euclidean(&points[i], &points[j]);
            if nearest.is_none_or(|(_, best)| d < best) {
                nearest = Some((j, d));
            }
        }
        out[i] = nearest;
        visited.push(i);
    }
    out
}

/// Relative distance of every point under `order`.
pub fn relative_distances(input: &ClusteringInput, order: &[usize]) -> Vec<f64> {
    let m = input.len();
    if m == 1 {
        return vec![1.0];
    }
    let mut deltas: Vec<f64> = nearest_better(&input.points, order)
        .into_iter()
        .map(|nb| nb.map_or(f64::NAN, |(_, d)| d))
        .collect();
    let best = order[m - 1];
    deltas[best] = deltas
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, &d)| d)
        .fold(0.0, f64::max);
    deltas
}

/// Threshold `α·(δ_max − δ_min)` and every index strictly above it.
///
/// When every `δ` is zero nothing clears the threshold, and `best` becomes
/// the single center.
pub fn threshold_and_centers(deltas: &[f64], alpha: f64, best: usize) -> (f64, Vec<usize>) {
    let max = deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = deltas.iter().copied().fold(f64::INFINITY, f64::min);
    let threshold = alpha * (max - min);
    let centers: Vec<usize> = (0..deltas.len()).filter(|&i| deltas[i] > threshold).collect();
    if centers.is_empty() {
        (threshold, vec![best])
    } else {
        (threshold, centers)
    }
}

/// Labels every point with the cluster of its nearest better neighbour;
/// centers label themselves. Cluster ids follow the order of `centers`.
///
/// The best point must be a center, otherwise its label is undefined.
pub fn assign_members(input: &ClusteringInput, order: &[usize], centers: &[usize]) -> Result<Vec<usize>> {
    let m = input.len();
    let Some(&best) = order.last() else {
        return Err(invalid("nothing to assign"));
    };
    let mut center_id = vec![None; m];
    for (k, &c) in centers.iter().enumerate() {
        if c >= m {
            return Err(invalid(format!("center index {c} out of range")));
        }
        center_id[c] = Some(k);
    }
    if center_id[best].is_none() {
        return Err(invalid("the best point must be one of the centers"));
    }
    let parents = nearest_better(&input.points, order);
    let mut labels = vec![usize::MAX; m];
    for &i in order.iter().rev() {
        labels[i] = match (center_id[i], parents[i]) {
            (Some(k), _) => k,
            (None, Some((parent, _))) => labels[parent],
            (None, None) => unreachable!("only the best point lacks a better neighbour"),
        };
    }
    Ok(labels)
}

/// Full pipeline: order, relative distances, threshold and centers, labels.
pub fn cluster(input: &ClusteringInput) -> Result<ClusteringResult> {
    input.validate()?;
    let order = strict_fitness_order(&input.fitness, input.sense);
    let deltas = relative_distances(input, &order);
    let best = order[order.len() - 1];
    let (threshold, mut centers) = threshold_and_centers(&deltas, input.alpha, best);
    let rank = ranks(&order);
    centers.sort_by(|&a, &b| rank[b].cmp(&rank[a]));
    let labels = assign_members(input, &order, &centers)?;
    Ok(ClusteringResult { centers, labels, deltas, threshold })
}

/// Position of every index within `order`.
fn ranks(order: &[usize]) -> Vec<usize> {
    let mut rank = vec![0; order.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input_1d(xs: &[f64], fitness: &[f64]) -> ClusteringInput {
        ClusteringInput::new(xs.iter().map(|&x| vec![x]).collect(), fitness.to_vec(), Sense::Maximize, 0.5).unwrap()
    }

    #[test]
    fn order_examples() {
        assert_eq!(strict_fitness_order(&[3.0, 1.0, 2.0], Sense::Maximize), vec![1, 2, 0]);
        assert_eq!(strict_fitness_order(&[5.0, 5.0, 5.0], Sense::Maximize), vec![0, 1, 2]);
        assert_eq!(strict_fitness_order(&[5.0, 5.0, 5.0], Sense::Minimize), vec![0, 1, 2]);
        assert_eq!(strict_fitness_order(&[3.0, 1.0, 2.0], Sense::Minimize), vec![0, 2, 1]);
    }

    #[test]
    fn hand_enumerated_deltas() {
        let input = input_1d(&[0.0, 1.0, 3.0], &[1.0, 3.0, 2.0]);
        let order = strict_fitness_order(&input.fitness, input.sense);
        assert_eq!(relative_distances(&input, &order), vec![1.0, 2.0, 2.0]);
    }

    #[test]
    fn coincident_worse_point_has_zero_delta() {
        let input = input_1d(&[4.0, 4.0], &[1.0, 2.0]);
        let order = strict_fitness_order(&input.fitness, input.sense);
        assert_eq!(relative_distances(&input, &order)[0], 0.0);
    }

    #[test]
    fn threshold_examples() {
        let (th, centers) = threshold_and_centers(&[0.1, 0.2, 5.0, 0.15, 4.8], 0.8, 2);
        assert!((th - 0.8 * 4.9).abs() < 1e-12);
        assert_eq!(centers, vec![2, 4]);

        let (th, centers) = threshold_and_centers(&[0.7; 4], 0.8, 3);
        assert_eq!(th, 0.0);
        assert_eq!(centers, vec![0, 1, 2, 3]);

        let (_, centers) = threshold_and_centers(&[0.0; 4], 0.8, 2);
        assert_eq!(centers, vec![2]);
    }

    #[test]
    fn chained_assignment_in_one_dimension() {
        // Two peaks at x = 2 and x = 6. Point 4 (x = 4.2) is nearer to point 5
        // (x = 5) than to anything else better, so it joins the right cluster
        // through point 5.
        let xs = [1.0, 2.0, 3.0, 4.2, 5.0, 6.0];
        let fitness = [1.0, 6.0, 2.0, 0.5, 3.0, 5.0];
        let input = input_1d(&xs, &fitness);
        let order = strict_fitness_order(&input.fitness, input.sense);
        let labels = assign_members(&input, &order, &[1, 5]).unwrap();
        assert_eq!(labels, vec![0, 0, 0, 1, 1, 1]);

        let result = cluster(&ClusteringInput { alpha: 0.8, ..input }).unwrap();
        assert_eq!(result.centers, vec![1, 5]);
        assert_eq!(result.labels, vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn single_point_is_its_own_cluster() {
        let r = cluster(&input_1d(&[3.0], &[1.0])).unwrap();
        assert_eq!(r.centers, vec![0]);
        assert_eq!(r.labels, vec![0]);
        assert_eq!(r.deltas, vec![1.0]);
    }

    #[test]
    fn coincident_points_form_one_cluster() {
        let input = ClusteringInput::new(vec![vec![1.0, 1.0]; 5], vec![1.0, 2.0, 3.0, 4.0, 5.0], Sense::Maximize, 0.8)
            .unwrap();
        let r = cluster(&input).unwrap();
        assert_eq!(r.centers, vec![4]);
        assert!(r.labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn assignment_requires_best_center() {
        let input = input_1d(&[0.0, 1.0], &[1.0, 2.0]);
        let order = strict_fitness_order(&input.fitness, input.sense);
        assert!(assign_members(&input, &order, &[0]).is_err());
    }

    #[test]
    fn input_validation() {
        assert!(ClusteringInput::new(vec![], vec![], Sense::Maximize, 0.5).is_err());
        assert!(ClusteringInput::new(vec![vec![0.0]], vec![f64::NAN], Sense::Maximize, 0.5).is_err());
        assert!(ClusteringInput::new(vec![vec![0.0]], vec![1.0], Sense::Maximize, 1.0).is_err());
        assert!(ClusteringInput::new(vec![vec![0.0], vec![0.0, 1.0]], vec![1.0, 2.0], Sense::Maximize, 0.5).is_err());
    }
}
