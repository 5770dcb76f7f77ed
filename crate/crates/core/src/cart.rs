//! Binary regression trees grown by greedy variance reduction.
//!
//! Splits are axis-aligned: `x[feature] <= threshold` goes left. Candidate
//! thresholds are midpoints between consecutive distinct feature values in
//! the node. Ties in split quality go to the lowest feature index, then the
//! lowest threshold. Leaves predict the mean target of their samples.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeParams {
    /// Nodes with fewer samples than this become leaves.
    pub min_split: usize,
    /// Smallest allowed child.
    pub min_leaf: usize,
    /// `None` grows until another stopping rule applies.
    pub max_depth: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            min_split: 2,
            min_leaf: 1,
            max_depth: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TreeNode {
    Internal {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        prediction: f64,
        n: usize,
    },
}

/// A fitted tree. Nodes live in an arena; index 0 is the root.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionTree {
    nodes: Vec<TreeNode>,
    feature_count: usize,
    sample_count: usize,
}

struct Split {
    feature: usize,
    threshold: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl RegressionTree {
    /// Fits a tree on `inputs[i] -> targets[i]`.
    pub fn fit<R: AsRef<[f64]>>(inputs: &[R], targets: &[f64], params: TreeParams) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::Empty("training rows"));
        }
        if inputs.len() != targets.len() {
            return Err(Error::LengthMismatch {
                expected: inputs.len(),
                got: targets.len(),
            });
        }
        let feature_count = inputs[0].as_ref().len();
        for row in inputs {
            if row.as_ref().len() != feature_count {
                return Err(Error::LengthMismatch {
                    expected: feature_count,
                    got: row.as_ref().len(),
                });
            }
        }
        if let Some((index, &value)) = targets.iter().enumerate().find(|(_, t)| !t.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        if params.min_leaf == 0 {
            return Err(Error::invalid("min_leaf must be at least 1"));
        }

        let rows: Vec<&[f64]> = inputs.iter().map(AsRef::as_ref).collect();
        let mut nodes = vec![TreeNode::Leaf { prediction: 0.0, n: 0 }];
        // (arena slot, samples, depth)
        let mut work = vec![(0usize, (0..rows.len()).collect::<Vec<_>>(), 0usize)];
        while let Some((slot, samples, depth)) = work.pop() {
            let can_split = samples.len() >= params.min_split
                && samples.len() >= 2 * params.min_leaf
                && params.max_depth.is_none_or(|d| depth < d);
            let split = if can_split {
                best_split(&rows, targets, &samples, params.min_leaf)
            } else {
                None
            };
            match split {
                None => {
                    let sum: f64 = samples.iter().map(|&i| targets[i]).sum();
                    nodes[slot] = TreeNode::Leaf {
                        prediction: sum / samples.len() as f64,
                        n: samples.len(),
                    };
                }
                Some(s) => {
                    let left = nodes.len();
                    let right = left + 1;
                    nodes.push(TreeNode::Leaf { prediction: 0.0, n: 0 });
                    nodes.push(TreeNode::Leaf { prediction: 0.0, n: 0 });
                    nodes[slot] = TreeNode::Internal {
                        feature: s.feature,
                        threshold: s.threshold,
                        left,
                        right,
                    };
                    work.push((right, s.right, depth + 1));
                    work.push((left, s.left, depth + 1));
                }
            }
        }
        Ok(Self {
            nodes,
            feature_count,
            sample_count: rows.len(),
        })
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.feature_count {
            return Err(Error::LengthMismatch {
                expected: self.feature_count,
                got: x.len(),
            });
        }
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                TreeNode::Leaf { prediction, .. } => return prediction,
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    /// `(nodes, leaves)`, counting internal and leaf nodes alike.
    pub fn size(&self) -> (usize, usize) {
        let leaves = self
            .nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count();
        (self.nodes.len(), leaves)
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn node(&self, index: usize) -> &TreeNode {
        &self.nodes[index]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn feature_count(&self) -> usize {
        self.feature_count
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }
}

/// Free-function form of [`RegressionTree::size`].
pub fn tree_size(tree: &RegressionTree) -> (usize, usize) {
    tree.size()
}

fn best_split(rows: &[&[f64]], targets: &[f64], samples: &[usize], min_leaf: usize) -> Option<Split> {
    let n = samples.len();
    let total: f64 = samples.iter().map(|&i| targets[i]).sum();
    let mean = total / n as f64;
    let sse: f64 = samples.iter().map(|&i| (targets[i] - mean).powi(2)).sum();
    if sse == 0.0 {
        return None;
    }
    let parent_score = total * total / n as f64;

    // Maximizing sL²/nL + sR²/nR is the same as minimizing child SSE.
    let mut best: Option<(f64, usize, f64, usize)> = None; // (gain, feature, threshold, left count)
    let mut best_order: Vec<usize> = Vec::new();
    let mut order = samples.to_vec();
    for f in 0..rows[0].len() {
        order.sort_by(|&a, &b| rows[a][f].total_cmp(&rows[b][f]).then(a.cmp(&b)));
        let mut left_sum = 0.0;
        for k in 0..n - 1 {
            left_sum += targets[order[k]];
            let (lo, hi) = (rows[order[k]][f], rows[order[k + 1]][f]);
            if lo == hi {
                continue;
            }
            let nl = k + 1;
            let nr = n - nl;
            if nl < min_leaf || nr < min_leaf {
                continue;
            }
            let right_sum = total - left_sum;
            let gain = left_sum * left_sum / nl as f64 + right_sum * right_sum / nr as f64 - parent_score;
            if best.is_none_or(|(g, ..)| gain > g) {
                let mut threshold = lo + (hi - lo) / 2.0;
                if threshold >= hi {
                    threshold = lo;
                }
                best = Some((gain, f, threshold, nl));
                best_order.clone_from(&order);
            }
        }
    }
    let (gain, feature, threshold, nl) = best?;
    // Gains at rounding-noise level are not real improvements.
    if gain <= sse * 1e-12 {
        return None;
    }
    let mut left = best_order[..nl].to_vec();
    let mut right = best_order[nl..].to_vec();
    left.sort_unstable();
    right.sort_unstable();
    Some(Split {
        feature,
        threshold,
        left,
        right,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fit1(xs: &[f64], ys: &[f64]) -> RegressionTree {
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        RegressionTree::fit(&rows, ys, TreeParams::default()).unwrap()
    }

    #[test]
    fn constant_targets_give_single_leaf() {
        let t = fit1(&[0.0, 1.0, 2.0], &[5.0, 5.0, 5.0]);
        assert_eq!(t.size(), (1, 1));
        assert_eq!(t.predict(&[-100.0]).unwrap(), 5.0);
        assert_eq!(t.predict(&[100.0]).unwrap(), 5.0);
    }

    /// Exhaustive oracle: score every candidate threshold by child SSE.
    fn best_threshold_by_enumeration(xs: &[f64], ys: &[f64]) -> f64 {
        let sse = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|y| (y - m).powi(2)).sum::<f64>()
        };
        let mut best = (f64::INFINITY, f64::NAN);
        for w in xs.windows(2) {
            let t = (w[0] + w[1]) / 2.0;
            let l: Vec<f64> = xs.iter().zip(ys).filter(|(x, _)| **x <= t).map(|(_, y)| *y).collect();
            let r: Vec<f64> = xs.iter().zip(ys).filter(|(x, _)| **x > t).map(|(_, y)| *y).collect();
            let s = sse(&l) + sse(&r);
            if s < best.0 {
                best = (s, t);
            }
        }
        best.1
    }

    #[test]
    fn step_function_splits_at_midpoint() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [0.0, 0.0, 10.0, 10.0];
        assert_eq!(best_threshold_by_enumeration(&xs, &ys), 1.5);
        let t = fit1(&xs, &ys);
        assert_eq!(t.size(), (3, 2));
        match t.node(t.root()) {
            TreeNode::Internal { feature, threshold, .. } => {
                assert_eq!((*feature, *threshold), (0, 1.5));
            }
            other => panic!("expected a split, got {other:?}"),
        }
        assert_eq!(t.predict(&[1.4]).unwrap(), 0.0);
        assert_eq!(t.predict(&[1.6]).unwrap(), 10.0);
        assert!(t.predict(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn tie_break_prefers_lowest_feature() {
        // Both features separate the targets perfectly.
        let rows = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        let t = RegressionTree::fit(&rows, &[1.0, 2.0], TreeParams::default()).unwrap();
        assert!(matches!(t.node(0), TreeNode::Internal { feature: 0, .. }));
    }

    #[test]
    fn fit_errors() {
        let empty: Vec<Vec<f64>> = vec![];
        assert!(RegressionTree::fit(&empty, &[], TreeParams::default()).is_err());
        let ragged = vec![vec![0.0], vec![1.0, 2.0]];
        assert!(RegressionTree::fit(&ragged, &[1.0, 2.0], TreeParams::default()).is_err());
        assert!(RegressionTree::fit(&[vec![0.0]], &[f64::NAN], TreeParams::default()).is_err());
    }

    #[test]
    fn min_leaf_and_depth_limit_respected() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        let stump = RegressionTree::fit(
            &rows,
            &ys,
            TreeParams {
                max_depth: Some(1),
                ..TreeParams::default()
            },
        )
        .unwrap();
        assert_eq!(stump.size(), (3, 2));
        let coarse = RegressionTree::fit(
            &rows,
            &ys,
            TreeParams {
                min_leaf: 4,
                ..TreeParams::default()
            },
        )
        .unwrap();
        for n in coarse.nodes() {
            if let TreeNode::Leaf { n, .. } = n {
                assert!(*n >= 4);
            }
        }
    }

    fn dataset() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
        (1usize..30).prop_flat_map(|k| {
            (
                prop::collection::vec(prop::collection::vec((0u8..6).prop_map(f64::from), 3), k),
                prop::collection::vec(-50.0f64..50.0, k),
            )
        })
    }

    fn leaf_counts_sum(t: &RegressionTree, at: usize) -> usize {
        match *t.node(at) {
            TreeNode::Leaf { n, .. } => {
                assert!(n > 0);
                n
            }
            TreeNode::Internal {
                left,
                right,
                feature,
                threshold,
            } => {
                assert!(feature < t.feature_count());
                assert!(threshold.is_finite());
                leaf_counts_sum(t, left) + leaf_counts_sum(t, right)
            }
        }
    }

    fn training_sse(t: &RegressionTree, rows: &[Vec<f64>], ys: &[f64]) -> f64 {
        rows.iter()
            .zip(ys)
            .map(|(r, y)| (t.predict(r).unwrap() - y).powi(2))
            .sum()
    }

    proptest! {
        #[test]
        fn structural_invariants((rows, ys) in dataset()) {
            let t = RegressionTree::fit(&rows, &ys, TreeParams::default()).unwrap();
            let (nodes, leaves) = t.size();
            prop_assert_eq!(nodes, 2 * leaves - 1);
            prop_assert!(leaves <= rows.len());
            prop_assert!(nodes <= 2 * rows.len() - 1);
            prop_assert_eq!(leaf_counts_sum(&t, t.root()), rows.len());
            let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for probe in [[0.0, 0.0, 0.0], [5.0, 5.0, 5.0], [2.5, 0.5, 4.0]] {
                let p = t.predict(&probe).unwrap();
                prop_assert!(p >= lo - 1e-9 && p <= hi + 1e-9);
            }
            prop_assert_eq!(&t, &RegressionTree::fit(&rows, &ys, TreeParams::default()).unwrap());
        }

        #[test]
        fn finer_trees_fit_at_least_as_well((rows, ys) in dataset()) {
            let mut last = f64::INFINITY;
            for min_split in [16, 8, 4, 2] {
                let t = RegressionTree::fit(&rows, &ys, TreeParams { min_split, ..TreeParams::default() }).unwrap();
                let e = training_sse(&t, &rows, &ys);
                prop_assert!(e <= last + 1e-6 * (1.0 + last.abs()));
                last = e;
            }
        }
    }
}
