//! Lloyd's k-means with k-means++ seeding and best-of-restarts selection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_RESTARTS: usize = 10;
pub const DEFAULT_MAX_ITERATIONS: usize = 300;

/// Relative slack allowed when checking that WCSS never increases between
/// Lloyd iterations; covers rounding in the centroid means.
pub const WCSS_MONOTONE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ClusterModel<T> {
    pub k: usize,
    pub centroids: Vec<Vec<T>>,
    /// Point index to cluster id.
    pub assignments: Vec<usize>,
    pub wcss: T,
    pub iterations_run: usize,
    /// Seed given to the fit. Models from [`kmeans_runs`] carry their own run seed.
    pub seed: u64,
    /// Which restart produced this model.
    pub restart: usize,
    /// WCSS after the seeding assignment and after every Lloyd iteration.
    pub wcss_trace: Vec<T>,
}

impl<T: Scalar> ClusterModel<T> {
    pub fn dimension(&self) -> usize {
        self.centroids.first().map_or(0, Vec::len)
    }

    /// Nearest centroid, ties to the lowest id.
    pub fn predict(&self, point: &[T]) -> usize {
        nearest(&self.centroids, point).0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansConfig {
    pub restarts: usize,
    pub max_iterations: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

#[inline]
pub(crate) fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

fn nearest<T: Scalar>(centroids: &[Vec<T>], point: &[T]) -> (usize, T) {
    let mut best = (0, sq_dist(&centroids[0], point));
    for (j, c) in centroids.iter().enumerate().skip(1) {
        let d = sq_dist(c, point);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

pub(crate) fn validate_points<T: Scalar>(points: &[Vec<T>]) -> Result<usize> {
    let first = points
        .first()
        .ok_or_else(|| Error::InvalidInput("no points to cluster".into()))?;
    let dim = first.len();
    if dim == 0 {
        return Err(Error::InvalidInput("points have zero dimension".into()));
    }
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("points must be finite".into()));
        }
    }
    Ok(dim)
}

/// k-means++: the first center is uniform, each next one is drawn with
/// probability proportional to the squared distance to the closest center.
fn seed_centroids<T: Scalar>(points: &[Vec<T>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<T>> {
    let n = points.len();
    let mut centroids = vec![points[rng.random_range(0..n)].clone()];
    let mut closest: Vec<f64> = points
        .iter()
        .map(|p| sq_dist(p, &centroids[0]).as_f64())
        .collect();
    while centroids.len() < k {
        let total: f64 = closest.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &d) in closest.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = points[pick].clone();
        for (d, p) in closest.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &c).as_f64());
        }
        centroids.push(c);
    }
    centroids
}

fn assign<T: Scalar>(points: &[Vec<T>], centroids: &[Vec<T>], out: &mut [usize]) -> T {
    let mut total = T::zero();
    for (a, p) in out.iter_mut().zip(points) {
        let (j, d) = nearest(centroids, p);
        *a = j;
        total += d;
    }
    total
}

fn total_cost<T: Scalar>(points: &[Vec<T>], centroids: &[Vec<T>], assignments: &[usize]) -> T {
    points
        .iter()
        .zip(assignments)
        .map(|(p, &a)| sq_dist(p, &centroids[a]))
        .sum()
}

/// Moves centroids to the mean of their members. An empty cluster takes the
/// point farthest from its own centroid (from clusters with more than one
/// member), and that point is reassigned to it.
fn update<T: Scalar>(points: &[Vec<T>], centroids: &mut [Vec<T>], assignments: &mut [usize]) {
    let dim = centroids[0].len();
    let k = centroids.len();
    let mut sums = vec![vec![T::zero(); dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &a) in points.iter().zip(assignments.iter()) {
        counts[a] += 1;
        for (s, &v) in sums[a].iter_mut().zip(p) {
            *s += v;
        }
    }
    for j in 0..k {
        if counts[j] > 0 {
            let n = T::of_usize(counts[j]);
            centroids[j] = sums[j].iter().map(|&s| s / n).collect();
        }
    }
    for j in 0..k {
        if counts[j] > 0 {
            continue;
        }
        let mut far: Option<(usize, T)> = None;
        for (i, p) in points.iter().enumerate() {
            let a = assignments[i];
            if counts[a] <= 1 {
                continue;
            }
            let d = sq_dist(p, &centroids[a]);
            if far.is_none_or(|(_, best)| d > best) {
                far = Some((i, d));
            }
        }
        if let Some((i, _)) = far {
            counts[assignments[i]] -= 1;
            assignments[i] = j;
            counts[j] = 1;
            centroids[j] = points[i].clone();
        }
    }
}

fn lloyd<T: Scalar>(points: &[Vec<T>], k: usize, seed: u64, max_iterations: usize) -> ClusterModel<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_centroids(points, k, &mut rng);
    let mut assignments = vec![0usize; points.len()];
    let mut wcss = assign(points, &centroids, &mut assignments);
    let mut trace = vec![wcss];
    let mut iterations = 0;
    let mut next = assignments.clone();
    while iterations < max_iterations {
        iterations += 1;
        update(points, &mut centroids, &mut assignments);
        let current = assignments.clone();
        let new_wcss = assign(points, &centroids, &mut next);
        debug_assert!(
            new_wcss.as_f64() <= wcss.as_f64() * (1.0 + WCSS_MONOTONE_RTOL) + f64::MIN_POSITIVE,
            "WCSS increased: {wcss} -> {new_wcss}"
        );
        wcss = new_wcss;
        trace.push(wcss);
        std::mem::swap(&mut assignments, &mut next);
        if assignments == current {
            break;
        }
    }
    ClusterModel {
        k,
        centroids,
        assignments,
        wcss,
        iterations_run: iterations,
        seed,
        restart: 0,
        wcss_trace: trace,
    }
}

/// Every restart's model, in restart order. Each run's seed is drawn from a
/// generator seeded with `seed`.
pub fn kmeans_runs<T: Scalar>(
    points: &[Vec<T>],
    k: usize,
    seed: u64,
    config: &KMeansConfig,
) -> Result<Vec<ClusterModel<T>>> {
    validate_points(points)?;
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if k > points.len() {
        return Err(Error::TooFewPoints {
            needed: k,
            got: points.len(),
        });
    }
    if config.restarts == 0 {
        return Err(Error::InvalidInput("restarts must be at least 1".into()));
    }
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    let run_seeds: Vec<u64> = (0..config.restarts).map(|_| seeder.random()).collect();
    Ok(run_seeds
        .par_iter()
        .enumerate()
        .map(|(r, &s)| {
            let mut m = lloyd(points, k, s, config.max_iterations);
            m.restart = r;
            m
        })
        .collect())
}

pub fn kmeans_fit_with<T: Scalar>(
    points: &[Vec<T>],
    k: usize,
    seed: u64,
    config: &KMeansConfig,
) -> Result<ClusterModel<T>> {
    // first restart wins ties, independent of scheduling
    let mut best = kmeans_runs(points, k, seed, config)?
        .into_iter()
        .reduce(|a, b| if b.wcss < a.wcss { b } else { a })
        .expect("at least one restart");
    best.seed = seed;
    Ok(best)
}

/// Best-WCSS model over `restarts` independent k-means++ runs.
pub fn kmeans_fit<T: Scalar>(points: &[Vec<T>], k: usize, seed: u64, restarts: usize) -> Result<ClusterModel<T>> {
    kmeans_fit_with(
        points,
        k,
        seed,
        &KMeansConfig {
            restarts,
            ..KMeansConfig::default()
        },
    )
}

/// Sum of squared distances from each point to its assigned centroid.
pub fn wcss<T: Scalar>(model: &ClusterModel<T>, points: &[Vec<T>]) -> Result<T> {
    if points.len() != model.assignments.len() {
        return Err(Error::LengthMismatch {
            left: model.assignments.len(),
            right: points.len(),
        });
    }
    for p in points {
        if p.len() != model.dimension() {
            return Err(Error::DimensionMismatch {
                expected: model.dimension(),
                got: p.len(),
            });
        }
    }
    Ok(total_cost(points, &model.centroids, &model.assignments))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[&[f64]]) -> Vec<Vec<f64>> {
        v.iter().map(|p| p.to_vec()).collect()
    }

    #[test]
    fn symmetric_four_points() {
        let p = pts(&[&[0.0, 0.0], &[0.0, 1.0], &[10.0, 0.0], &[10.0, 1.0]]);
        let m = kmeans_fit(&p, 2, 7, 10).unwrap();
        assert_eq!(m.wcss, 1.0);
        let mut c = m.centroids.clone();
        c.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
        assert_eq!(c, vec![vec![0.0, 0.5], vec![10.0, 0.5]]);
    }

    #[test]
    fn k_equals_n_has_zero_wcss() {
        let p = pts(&[&[1.0], &[5.0], &[9.0], &[2.0]]);
        assert_eq!(kmeans_fit(&p, 4, 1, 10).unwrap().wcss, 0.0);
    }

    #[test]
    fn wcss_of_explicit_model() {
        let m = ClusterModel {
            k: 1,
            centroids: vec![vec![1.0]],
            assignments: vec![0, 0],
            wcss: 0.0,
            iterations_run: 0,
            seed: 0,
            restart: 0,
            wcss_trace: vec![],
        };
        assert_eq!(wcss(&m, &pts(&[&[0.0], &[2.0]])).unwrap(), 2.0);
        assert!(wcss(&m, &pts(&[&[0.0, 1.0], &[2.0, 1.0]])).is_err());
    }

    #[test]
    fn identical_points() {
        let p = vec![vec![3.0, 3.0]; 6];
        for k in 1..=3 {
            assert_eq!(kmeans_fit(&p, k, 3, 4).unwrap().wcss, 0.0);
        }
    }

    #[test]
    fn errors() {
        let p = pts(&[&[0.0], &[1.0]]);
        assert!(matches!(kmeans_fit(&p, 3, 0, 1), Err(Error::TooFewPoints { .. })));
        assert!(kmeans_fit::<f64>(&[], 1, 0, 1).is_err());
        assert!(matches!(
            kmeans_fit(&pts(&[&[0.0], &[1.0, 2.0]]), 1, 0, 1),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(kmeans_fit(&p, 0, 0, 1).is_err());
    }

    #[test]
    fn empty_cluster_reseeded() {
        let p = pts(&[&[0.0], &[1.0], &[2.0], &[10.0]]);
        let mut centroids = vec![vec![1.0], vec![100.0]];
        let mut a = vec![0, 0, 0, 0];
        update(&p, &mut centroids, &mut a);
        assert_eq!(a, vec![0, 0, 0, 1]);
        assert_eq!(centroids[1], vec![10.0]);
    }

    #[test]
    fn f32_points() {
        let p: Vec<Vec<f32>> = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![10.0, 0.0], vec![10.0, 1.0]];
        assert_eq!(kmeans_fit(&p, 2, 1, 5).unwrap().wcss, 1.0);
    }
}
