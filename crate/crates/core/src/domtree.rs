//! Domination trees: a regression tree over decisions whose target is each
//! evaluated point's domination score, rendered as indented text with the
//! branch to the best-scoring leaf highlighted.

use std::fmt::Write as _;

use crate::cart::{RegressionTree, TreeNode, TreeParams};
use crate::dominance::domination_scores;
use crate::error::{Error, Result};
use crate::problem::{EvaluatedPoint, ObjectiveSchema};

const INDENT: &str = "|    ";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `x[feature] <= threshold`
    Le,
    /// `x[feature] > threshold`
    Gt,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathStep {
    pub feature: usize,
    pub branch: Branch,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominationTree {
    tree: RegressionTree,
    decision_names: Vec<String>,
    best_path: Vec<PathStep>,
    best_leaf: usize,
}

/// Scores every point by how many others it indicator-dominates and fits a
/// tree with default parameters from decisions to scores.
pub fn build_domination_tree(
    evaluated: &[EvaluatedPoint],
    schema: &ObjectiveSchema,
    names: &[String],
) -> Result<DominationTree> {
    if evaluated.len() < 2 {
        return Err(Error::invalid(format!(
            "a domination tree needs at least 2 evaluated points, got {}",
            evaluated.len()
        )));
    }
    let scores: Vec<f64> = domination_scores(evaluated, schema)?
        .into_iter()
        .map(|s| s as f64)
        .collect();
    let inputs: Vec<&[f64]> = evaluated.iter().map(|p| p.decisions()).collect();
    let tree = RegressionTree::fit(&inputs, &scores, TreeParams::default())?;
    DominationTree::from_tree(tree, names.to_vec())
}

impl DominationTree {
    pub fn from_tree(tree: RegressionTree, decision_names: Vec<String>) -> Result<Self> {
        if decision_names.len() != tree.feature_count() {
            return Err(Error::LengthMismatch {
                expected: tree.feature_count(),
                got: decision_names.len(),
            });
        }
        // Leftmost leaf with the largest prediction, found by a left-first walk.
        let mut best: Option<(usize, f64, Vec<PathStep>)> = None;
        let mut stack = vec![(tree.root(), Vec::new())];
        while let Some((node, path)) = stack.pop() {
            match *tree.node(node) {
                TreeNode::Leaf { prediction, .. } => {
                    if best.as_ref().is_none_or(|(_, p, _)| prediction > *p) {
                        best = Some((node, prediction, path));
                    }
                }
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let step = |branch| PathStep {
                        feature,
                        branch,
                        threshold,
                    };
                    let mut r = path.clone();
                    r.push(step(Branch::Gt));
                    stack.push((right, r));
                    let mut l = path;
                    l.push(step(Branch::Le));
                    stack.push((left, l));
                }
            }
        }
        let (best_leaf, _, best_path) = best.expect("a tree has at least one leaf");
        Ok(Self {
            tree,
            decision_names,
            best_path,
            best_leaf,
        })
    }

    pub fn tree(&self) -> &RegressionTree {
        &self.tree
    }

    pub fn decision_names(&self) -> &[String] {
        &self.decision_names
    }

    pub fn best_path(&self) -> &[PathStep] {
        &self.best_path
    }

    pub fn best_leaf_prediction(&self) -> f64 {
        match self.tree.node(self.best_leaf) {
            TreeNode::Leaf { prediction, .. } => *prediction,
            TreeNode::Internal { .. } => unreachable!("best_leaf always indexes a leaf"),
        }
    }

    /// Depth-first listing, one `|    ` per level. Each split prints its
    /// `<=` line, the left subtree, its `>` line, then the right subtree.
    /// Leaves print their mean score in parentheses. Lines on the path to
    /// the best leaf are wrapped in `**`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_node(self.tree.root(), 0, true, &mut out);
        out
    }

    fn render_node(&self, node: usize, depth: usize, on_path: bool, out: &mut String) {
        let line = |out: &mut String, text: String, marked: bool| {
            let pad = INDENT.repeat(depth);
            if marked {
                let _ = writeln!(out, "{pad}**{text}**");
            } else {
                let _ = writeln!(out, "{pad}{text}");
            }
        };
        match *self.tree.node(node) {
            TreeNode::Leaf { prediction, .. } => {
                line(out, format!("({})", format_score(prediction)), on_path && node == self.best_leaf);
            }
            TreeNode::Internal {
                feature,
                threshold,
                left,
                right,
            } => {
                let name = &self.decision_names[feature];
                let next = self.best_path.get(depth).map(|s| s.branch);
                let left_on = on_path && next == Some(Branch::Le);
                let right_on = on_path && next == Some(Branch::Gt);
                line(out, format!("{name}<={threshold}"), left_on);
                self.render_node(left, depth + 1, left_on, out);
                line(out, format!("{name}>{threshold}"), right_on);
                self.render_node(right, depth + 1, right_on, out);
            }
        }
    }
}

/// `(nodes, leaves)` of the underlying tree.
pub fn tree_stats(dt: &DominationTree) -> (usize, usize) {
    crate::cart::tree_size(&dt.tree)
}

fn format_score(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.1}")
    }
}
