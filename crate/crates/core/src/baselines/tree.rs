//! CART regression tree with exhaustive split search.
//!
//! At each node every candidate feature is sorted and every midpoint between
//! consecutive distinct values is scored by the summed squared error of the two
//! children. Leaves predict the mean target of their rows.

use ndarray::{ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeConfig {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
        }
    }
}

impl TreeConfig {
    pub fn with_max_depth(mut self, depth: usize) -> Self {
        self.max_depth = Some(depth);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_depth == Some(0) {
            return Err(Error::InvalidParameter("max_depth must be >= 1".into()));
        }
        if self.min_samples_split < 2 {
            return Err(Error::InvalidParameter(
                "min_samples_split must be >= 2".into(),
            ));
        }
        if self.min_samples_leaf < 1 {
            return Err(Error::InvalidParameter(
                "min_samples_leaf must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Rows with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// Sum of squared errors of the two children around their means.
    pub sse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

fn sse_of(sum: f64, sum_sq: f64, n: f64) -> f64 {
    (sum_sq - sum * sum / n).max(0.0)
}

/// Best split of `rows` over `features`, or `None` if no candidate leaves at
/// least `min_samples_leaf` rows on each side.
///
/// Ties keep the first candidate in (feature order, ascending threshold).
pub fn best_split(
    x: ArrayView2<f64>,
    y: &[f64],
    rows: &[usize],
    features: &[usize],
    min_samples_leaf: usize,
) -> Option<Split> {
    let n = rows.len();
    if n < 2 * min_samples_leaf.max(1) {
        return None;
    }
    let total: f64 = rows.iter().map(|&r| y[r]).sum();
    let total_sq: f64 = rows.iter().map(|&r| y[r] * y[r]).sum();

    let mut best: Option<Split> = None;
    let mut order: Vec<(f64, f64)> = Vec::with_capacity(n);
    for &feature in features {
        order.clear();
        order.extend(rows.iter().map(|&r| (x[[r, feature]], y[r])));
        order.sort_by(|a, b| a.0.total_cmp(&b.0));

        let (mut left_sum, mut left_sq) = (0.0, 0.0);
        for i in 0..n - 1 {
            let (value, target) = order[i];
            left_sum += target;
            left_sq += target * target;
            let n_left = i + 1;
            let next = order[i + 1].0;
            if value == next || n_left < min_samples_leaf || n - n_left < min_samples_leaf {
                continue;
            }
            let sse = sse_of(left_sum, left_sq, n_left as f64)
                + sse_of(total - left_sum, total_sq - left_sq, (n - n_left) as f64);
            if best.is_none_or(|b| sse < b.sse) {
                let mid = value + (next - value) / 2.0;
                let threshold = if mid < next { mid } else { value };
                best = Some(Split {
                    feature,
                    threshold,
                    sse,
                });
            }
        }
    }
    best
}

impl RegressionTree {
    pub fn fit(x: ArrayView2<f64>, y: &[f64], cfg: &TreeConfig) -> Result<Self> {
        let rows: Vec<usize> = (0..x.nrows()).collect();
        let features: Vec<usize> = (0..x.ncols()).collect();
        Self::fit_rows(x, y, &rows, &features, cfg)
    }

    /// Fit on `rows` of `x` (duplicates allowed), splitting only on `features`.
    pub fn fit_rows(
        x: ArrayView2<f64>,
        y: &[f64],
        rows: &[usize],
        features: &[usize],
        cfg: &TreeConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        if rows.is_empty() {
            return Err(Error::Empty("training set"));
        }
        if y.len() != x.nrows() {
            return Err(Error::LengthMismatch {
                left: y.len(),
                right: x.nrows(),
            });
        }

        let mut nodes = vec![Node::Leaf(0.0)];
        // (node slot, rows, depth)
        let mut pending = vec![(0usize, rows.to_vec(), 0usize)];
        while let Some((slot, node_rows, depth)) = pending.pop() {
            let n = node_rows.len();
            let mean = node_rows.iter().map(|&r| y[r]).sum::<f64>() / n as f64;
            let first = y[node_rows[0]];
            let pure = node_rows.iter().all(|&r| y[r] == first);
            let depth_reached = cfg.max_depth.is_some_and(|d| depth >= d);
            if pure || depth_reached || n < cfg.min_samples_split {
                nodes[slot] = Node::Leaf(mean);
                continue;
            }
            let Some(split) = best_split(x, y, &node_rows, features, cfg.min_samples_leaf) else {
                nodes[slot] = Node::Leaf(mean);
                continue;
            };
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = node_rows
                .iter()
                .partition(|&&r| x[[r, split.feature]] <= split.threshold);
            let left = nodes.len();
            nodes.push(Node::Leaf(0.0));
            let right = nodes.len();
            nodes.push(Node::Leaf(0.0));
            nodes[slot] = Node::Split {
                feature: split.feature,
                threshold: split.threshold,
                left,
                right,
            };
            pending.push((right, right_rows, depth + 1));
            pending.push((left, left_rows, depth + 1));
        }
        Ok(RegressionTree { nodes })
    }

    pub fn predict_row(&self, row: ArrayView1<f64>) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf(value) => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[feature] <= threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Vec<f64> {
        x.axis_iter(Axis(0))
            .map(|row| self.predict_row(row))
            .collect()
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf(_)))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Root split, if the root is not a leaf.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        match self.nodes[0] {
            Node::Leaf(_) => None,
            Node::Split {
                feature, threshold, ..
            } => Some((feature, threshold)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn step_function_splits_at_midpoint() {
        let x = array![[1.0], [2.0], [3.0], [4.0]];
        let y = [0.0, 0.0, 10.0, 10.0];
        let tree = RegressionTree::fit(x.view(), &y, &TreeConfig::default()).unwrap();
        assert_eq!(tree.root_split(), Some((0, 2.5)));
        assert_eq!(
            tree.predict(array![[0.0], [2.4], [2.6], [99.0]].view()),
            vec![0.0, 0.0, 10.0, 10.0]
        );
        assert_eq!(tree.n_leaves(), 2);
    }

    #[test]
    fn constant_targets_give_single_leaf() {
        let x = array![[1.0, 5.0], [2.0, 3.0], [3.0, 1.0]];
        let tree = RegressionTree::fit(x.view(), &[7.0; 3], &TreeConfig::default()).unwrap();
        assert_eq!(tree.n_leaves(), 1);
        assert_eq!(tree.predict(array![[100.0, -4.0]].view()), vec![7.0]);
    }

    #[test]
    fn unrestricted_tree_interpolates_distinct_rows() {
        let x = array![[0.0], [1.0], [2.0], [3.0], [4.0]];
        let y = [3.0, -1.0, 4.0, 1.0, 5.0];
        let tree = RegressionTree::fit(x.view(), &y, &TreeConfig::default()).unwrap();
        assert_eq!(tree.predict(x.view()), y.to_vec());
    }

    #[test]
    fn depth_limit_is_respected() {
        let x = array![[0.0], [1.0], [2.0], [3.0], [4.0], [5.0], [6.0], [7.0]];
        let y = [0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0];
        let tree =
            RegressionTree::fit(x.view(), &y, &TreeConfig::default().with_max_depth(2)).unwrap();
        assert!(tree.depth() <= 2);
        assert!(tree.n_leaves() <= 4);
    }

    #[test]
    fn min_samples_leaf_is_respected() {
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let y = [100.0, 0.0, 0.0, 0.0];
        let cfg = TreeConfig {
            min_samples_leaf: 2,
            ..TreeConfig::default()
        };
        let tree = RegressionTree::fit(x.view(), &y, &cfg).unwrap();
        assert_eq!(tree.root_split(), Some((0, 1.5)));
        assert_eq!(tree.n_leaves(), 2);
    }

    #[test]
    fn duplicate_feature_values_are_never_separated() {
        let x = array![[1.0], [1.0], [2.0]];
        let y = [0.0, 10.0, 5.0];
        let tree = RegressionTree::fit(x.view(), &y, &TreeConfig::default()).unwrap();
        assert_eq!(tree.predict(array![[1.0]].view()), vec![5.0]);
    }

    #[test]
    fn config_validation() {
        assert!(TreeConfig {
            min_samples_split: 1,
            ..TreeConfig::default()
        }
        .validate()
        .is_err());
        assert!(TreeConfig {
            min_samples_leaf: 0,
            ..TreeConfig::default()
        }
        .validate()
        .is_err());
        assert!(TreeConfig::default().with_max_depth(0).validate().is_err());
    }
}
