use std::cmp::Ordering;

use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_training, majority, require_both_classes};
use crate::classify::spec::TreeParams;
use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", rename_all = "snake_case")]
pub enum Node<T> {
    Leaf {
        label: u8,
    },
    /// `x[feature] <= threshold` goes left.
    Split {
        feature: usize,
        threshold: T,
        left: usize,
        right: usize,
    },
}

/// CART classifier with Gini impurity, stored as a node arena rooted at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DecisionTree<T> {
    pub n_features: usize,
    pub nodes: Vec<Node<T>>,
}

/// Split quality as an exact fraction: the sum over both children of
/// `(pos^2 + neg^2) / size`. Larger is purer.
#[derive(Clone, Copy)]
struct Purity {
    num: u128,
    den: u128,
}

impl Purity {
    fn new(lp: u64, ln: u64, rp: u64, rn: u64) -> Self {
        let (lp, ln, rp, rn) = (lp as u128, ln as u128, rp as u128, rn as u128);
        let (nl, nr) = (lp + ln, rp + rn);
        Self {
            num: (lp * lp + ln * ln) * nr + (rp * rp + rn * rn) * nl,
            den: nl * nr,
        }
    }

    fn beats(&self, other: &Purity) -> bool {
        self.num * other.den > other.num * self.den
    }
}

struct Candidate<T> {
    feature: usize,
    threshold: T,
    purity: Purity,
}

fn total_cmp<T: Scalar>(a: T, b: T) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

fn midpoint<T: Scalar>(a: T, b: T) -> T {
    let m = a + (b - a) / T::lit(2.0);
    if m < b { m } else { a }
}

fn best_split<T: Scalar>(points: &[&[T]], labels: &[u8], idx: &[usize], features: &[usize]) -> Option<Candidate<T>> {
    let total_pos = idx.iter().filter(|&&i| labels[i] == 1).count() as u64;
    let m = idx.len() as u64;
    let mut best: Option<Candidate<T>> = None;
    let mut order = idx.to_vec();
    for &f in features {
        order.sort_by(|&a, &b| total_cmp(points[a][f], points[b][f]).then(a.cmp(&b)));
        let mut lp = 0u64;
        for i in 0..order.len() - 1 {
            lp += u64::from(labels[order[i]]);
            let (lo, hi) = (points[order[i]][f], points[order[i + 1]][f]);
            if lo == hi {
                continue;
            }
            let nl = i as u64 + 1;
            let purity = Purity::new(lp, nl - lp, total_pos - lp, (m - nl) - (total_pos - lp));
            if best.as_ref().is_none_or(|b| purity.beats(&b.purity)) {
                best = Some(Candidate {
                    feature: f,
                    threshold: midpoint(lo, hi),
                    purity,
                });
            }
        }
    }
    best
}

impl<T: Scalar> DecisionTree<T> {
    pub fn fit(points: &[&[T]], labels: &[u8], params: &TreeParams) -> Result<Self> {
        check_training(points, labels)?;
        require_both_classes(labels)?;
        let idx: Vec<usize> = (0..points.len()).collect();
        Ok(Self::grow(points, labels, idx, params, None))
    }

    /// Grows a tree over the rows in `idx` (repeats allowed). With a feature
    /// sampler, each split considers `count` features drawn without
    /// replacement; otherwise all features.
    pub(crate) fn grow(
        points: &[&[T]],
        labels: &[u8],
        idx: Vec<usize>,
        params: &TreeParams,
        mut sampler: Option<(usize, &mut ChaCha8Rng)>,
    ) -> Self {
        let d = points[0].len();
        let all: Vec<usize> = (0..d).collect();
        let mut nodes = vec![Node::Leaf { label: 0 }];
        let mut stack = vec![(0usize, idx, 0usize)];
        while let Some((id, idx, depth)) = stack.pop() {
            let pos = idx.iter().filter(|&&i| labels[i] == 1).count();
            let label = majority(pos, idx.len());
            let stop = idx.len() < params.min_samples_split
                || pos == 0
                || pos == idx.len()
                || params.max_depth.is_some_and(|m| depth >= m);
            if stop {
                nodes[id] = Node::Leaf { label };
                continue;
            }
            let features = match sampler.as_mut() {
                Some((count, rng)) if *count < d => {
                    let mut f = sample(*rng, d, *count).into_vec();
                    f.sort_unstable();
                    f
                }
                _ => all.clone(),
            };
            let Some(split) = best_split(points, labels, &idx, &features) else {
                nodes[id] = Node::Leaf { label };
                continue;
            };
            let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = idx
                .iter()
                .partition(|&&i| points[i][split.feature] <= split.threshold);
            let left = nodes.len();
            nodes.push(Node::Leaf { label: 0 });
            nodes.push(Node::Leaf { label: 0 });
            nodes[id] = Node::Split {
                feature: split.feature,
                threshold: split.threshold,
                left,
                right: left + 1,
            };
            // right first so the left subtree is numbered first
            stack.push((left + 1, right_idx, depth + 1));
            stack.push((left, left_idx, depth + 1));
        }
        Self { n_features: d, nodes }
    }

    pub fn predict_one(&self, x: &[T]) -> u8 {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { label } => return *label,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => id = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((id, d)) = stack.pop() {
            best = best.max(d);
            if let Node::Split { left, right, .. } = self.nodes[id] {
                stack.push((left, d + 1));
                stack.push((right, d + 1));
            }
        }
        best
    }
}
