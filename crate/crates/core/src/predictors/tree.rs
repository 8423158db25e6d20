//! Regression trees grown best-first and forests of them.
//!
//! A tree repeatedly splits the leaf whose best split gives the largest drop in
//! squared error until it has `max_leaves` leaves or no leaf can be improved.
//! Thresholds sit halfway between consecutive distinct feature values. Forest
//! members see the full training set and differ only through the features
//! offered at each split.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::rng::{self, Role};

#[derive(Debug, Clone)]
enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
pub struct Tree {
    nodes: Vec<Node>,
    leaves: usize,
}

struct Candidate {
    node: usize,
    best: Option<SplitChoice>,
}

struct SplitChoice {
    gain: f64,
    feature: usize,
    threshold: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

fn best_split(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    idx: &[usize],
    features: &[usize],
) -> Option<SplitChoice> {
    let m = idx.len();
    if m < 2 {
        return None;
    }
    let total: f64 = idx.iter().map(|&i| y[i]).sum();
    let mean = total / m as f64;
    let sse: f64 = idx.iter().map(|&i| (y[i] - mean) * (y[i] - mean)).sum();
    if sse <= 0.0 {
        return None;
    }
    let base = total * total / m as f64;
    let mut best: Option<(f64, usize, f64, usize)> = None;
    let mut order = idx.to_vec();
    for &f in features {
        order.sort_by(|&a, &b| x[(a, f)].total_cmp(&x[(b, f)]).then(a.cmp(&b)));
        let mut left = 0.0;
        for k in 0..m - 1 {
            left += y[order[k]];
            let (xa, xb) = (x[(order[k], f)], x[(order[k + 1], f)]);
            if xa == xb {
                continue;
            }
            let nl = (k + 1) as f64;
            let nr = (m - k - 1) as f64;
            let right = total - left;
            let gain = left * left / nl + right * right / nr - base;
            if best.map_or(true, |b| gain > b.0) {
                best = Some((gain, f, 0.5 * (xa + xb), k + 1));
            }
        }
    }
    let (gain, feature, threshold, _) = best?;
    if !(gain > 1e-12 * sse) {
        return None;
    }
    let (left, right): (Vec<usize>, Vec<usize>) =
        idx.iter().partition(|&&i| x[(i, feature)] <= threshold);
    Some(SplitChoice {
        gain,
        feature,
        threshold,
        left,
        right,
    })
}

fn feature_subset(p: usize, mtry: usize, rng: Option<&mut ChaCha8Rng>) -> Vec<usize> {
    let mut all: Vec<usize> = (0..p).collect();
    match rng {
        Some(r) if mtry < p => {
            for k in 0..mtry {
                let j = r.random_range(k..p);
                all.swap(k, j);
            }
            all.truncate(mtry);
            all.sort_unstable();
            all
        }
        _ => all,
    }
}

impl Tree {
    /// `mtry` features are offered at each split (all when `rng` is None).
    pub fn fit(
        x: &DMatrix<f64>,
        y: &DVector<f64>,
        max_leaves: usize,
        mtry: usize,
        mut rng: Option<&mut ChaCha8Rng>,
    ) -> Tree {
        let p = x.ncols();
        let mean = |idx: &[usize]| idx.iter().map(|&i| y[i]).sum::<f64>() / idx.len() as f64;
        let root: Vec<usize> = (0..x.nrows()).collect();
        let mut nodes = vec![Node::Leaf(mean(&root))];
        let feats = feature_subset(p, mtry, rng.as_deref_mut());
        let best = best_split(x, y, &root, &feats);
        let mut open = vec![Candidate { node: 0, best }];
        let mut leaves = 1;
        while leaves < max_leaves {
            let pick = open
                .iter()
                .enumerate()
                .filter_map(|(k, c)| c.best.as_ref().map(|b| (k, b.gain)))
                .fold(None, |acc: Option<(usize, f64)>, (k, g)| match acc {
                    Some((_, bg)) if bg >= g => acc,
                    _ => Some((k, g)),
                });
            let Some((k, _)) = pick else { break };
            let cand = open.remove(k);
            let split = cand.best.expect("picked candidate has a split");
            let (li, ri) = (nodes.len(), nodes.len() + 1);
            nodes.push(Node::Leaf(mean(&split.left)));
            nodes.push(Node::Leaf(mean(&split.right)));
            nodes[cand.node] = Node::Split {
                feature: split.feature,
                threshold: split.threshold,
                left: li,
                right: ri,
            };
            leaves += 1;
            for (node, idx) in [(li, split.left), (ri, split.right)] {
                let feats = feature_subset(p, mtry, rng.as_deref_mut());
                let best = best_split(x, y, &idx, &feats);
                open.push(Candidate { node, best });
            }
        }
        Tree { nodes, leaves }
    }

    pub fn leaves(&self) -> usize {
        self.leaves
    }

    pub fn predict_one(&self, q: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf(v) => return *v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if q[*feature] <= *threshold { *left } else { *right },
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Forest {
    pub trees: Vec<Tree>,
}

impl Forest {
    pub fn fit(
        x: &DMatrix<f64>,
        y: &DVector<f64>,
        n_trees: usize,
        max_leaves: usize,
        mtry: usize,
        seed: u64,
    ) -> Forest {
        let trees = (0..n_trees)
            .map(|t| {
                let mut r = rng::stream(seed, t as u64, Role::Forest, 0);
                Tree::fit(x, y, max_leaves, mtry, Some(&mut r))
            })
            .collect();
        Forest { trees }
    }

    pub fn predict_one(&self, q: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict_one(q)).sum::<f64>() / self.trees.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_split_example() {
        let x = DMatrix::from_column_slice(4, 1, &[1.0, 2.0, 3.0, 4.0]);
        let y = DVector::from_row_slice(&[0.0, 0.0, 10.0, 10.0]);
        let t = Tree::fit(&x, &y, 2, 1, None);
        assert_eq!(t.leaves(), 2);
        assert_eq!(t.predict_one(&[2.0]), 0.0);
        assert_eq!(t.predict_one(&[3.0]), 10.0);
        assert_eq!(t.predict_one(&[2.49]), 0.0);
        assert_eq!(t.predict_one(&[2.51]), 10.0);
    }

    #[test]
    fn full_tree_interpolates() {
        let mut r = rng::stream(1, 0, Role::TrainX, 0);
        let x = DMatrix::from_fn(40, 3, |_, _| rng::normal(&mut r));
        let y = DVector::from_fn(40, |_, _| rng::normal(&mut r));
        let t = Tree::fit(&x, &y, 40, 3, None);
        for i in 0..40 {
            let row: Vec<f64> = x.row(i).iter().cloned().collect();
            assert!((t.predict_one(&row) - y[i]).abs() < 1e-12);
        }
    }
}
