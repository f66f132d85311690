//! Stage-wise boosting of depth-limited regression trees on binomial
//! deviance.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::matrix::{sigmoid, softplus, Matrix};
use super::params::BoostingParams;
use super::tree::{midpoint, partition, presort};
use crate::rng::rng_at;

const STREAM: u64 = 0xb0_0575;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegTree {
    pub nodes: Vec<RegNode>,
}

impl RegTree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                RegNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
                RegNode::Leaf { value } => return value,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Boosting {
    /// Log-odds of the training base rate.
    pub init: f64,
    pub learning_rate: f64,
    pub stages: Vec<RegTree>,
}

#[derive(Debug, Clone)]
pub struct BoostingFit {
    pub model: Boosting,
    /// Training deviance before the first stage and after each stage.
    pub deviance_history: Vec<f64>,
}

/// Mean binomial deviance `-2/n · Σ log p(y_i)` of raw scores `f`.
pub fn deviance(y: &[u8], f: &[f64]) -> f64 {
    let s: f64 = y
        .iter()
        .zip(f)
        .map(|(&t, &z)| if t == 1 { softplus(-z) } else { softplus(z) })
        .sum();
    2.0 * s / y.len().max(1) as f64
}

struct RegGrow<'a> {
    x: &'a Matrix,
    residual: &'a [f64],
    hessian: &'a [f64],
    params: &'a BoostingParams,
}

struct Pending {
    node: usize,
    sorted: Vec<Vec<usize>>,
    depth: usize,
}

impl RegGrow<'_> {
    fn leaf_value(&self, ids: &[usize]) -> f64 {
        let num: f64 = ids.iter().map(|&i| self.residual[i]).sum();
        let den: f64 = ids.iter().map(|&i| self.hessian[i]).sum();
        if den.abs() < 1e-150 { 0.0 } else { num / den }
    }

    /// Variance-reduction split `nL·nR/n · (meanL - meanR)²`.
    fn find_split(&self, sorted: &[Vec<usize>]) -> Option<(usize, f64, usize)> {
        let min_leaf = self.params.min_samples_leaf.max(1);
        let ids0 = &sorted[0];
        let n = ids0.len();
        let total: f64 = ids0.iter().map(|&i| self.residual[i]).sum();
        let mut best: Option<(f64, usize, f64, usize)> = None;
        for (f, ids) in sorted.iter().enumerate() {
            let mut sum_left = 0.0;
            for k in 0..n - 1 {
                sum_left += self.residual[ids[k]];
                let n_left = k + 1;
                let n_right = n - n_left;
                if n_right < min_leaf {
                    break;
                }
                let (v, w) = (self.x.get(ids[k], f), self.x.get(ids[k + 1], f));
                if n_left < min_leaf || v == w {
                    continue;
                }
                let diff = sum_left / n_left as f64 - (total - sum_left) / n_right as f64;
                let gain = (n_left * n_right) as f64 / n as f64 * diff * diff;
                if gain > 0.0 && best.is_none_or(|b| gain > b.0) {
                    best = Some((gain, f, midpoint(v, w), n_left));
                }
            }
        }
        best.map(|(_, f, t, n_left)| (f, t, n_left))
    }

    fn grow(&self, sorted: Vec<Vec<usize>>) -> RegTree {
        let mut nodes = vec![RegNode::Leaf {
            value: self.leaf_value(&sorted[0]),
        }];
        let mut stack = vec![Pending {
            node: 0,
            sorted,
            depth: 0,
        }];
        let mut go_left = vec![false; self.x.rows];
        while let Some(p) = stack.pop() {
            let ids = &p.sorted[0];
            let n = ids.len();
            if p.depth >= self.params.max_depth
                || n < self.params.min_samples_split
                || n < 2 * self.params.min_samples_leaf.max(1)
            {
                continue;
            }
            let mean = ids.iter().map(|&i| self.residual[i]).sum::<f64>() / n as f64;
            let var = ids.iter().map(|&i| (self.residual[i] - mean).powi(2)).sum::<f64>() / n as f64;
            if var <= f64::EPSILON {
                continue;
            }
            let Some((f, threshold, n_left)) = self.find_split(&p.sorted) else { continue };
            for &i in &p.sorted[f] {
                go_left[i] = self.x.get(i, f) <= threshold;
            }
            let (ls, rs) = partition(p.sorted, &go_left, n_left);
            let left = nodes.len();
            nodes.push(RegNode::Leaf { value: self.leaf_value(&ls[0]) });
            nodes.push(RegNode::Leaf { value: self.leaf_value(&rs[0]) });
            nodes[p.node] = RegNode::Split {
                feature: f,
                threshold,
                left,
                right: left + 1,
            };
            stack.push(Pending { node: left + 1, sorted: rs, depth: p.depth + 1 });
            stack.push(Pending { node: left, sorted: ls, depth: p.depth + 1 });
        }
        RegTree { nodes }
    }
}

impl Boosting {
    /// Both classes must be present in `y`.
    pub fn fit(x: &Matrix, y: &[u8], params: &BoostingParams, seed: u64) -> BoostingFit {
        let n = x.rows;
        let pos = y.iter().filter(|&&v| v == 1).count() as f64;
        let rate = pos / n as f64;
        let init = (rate / (1.0 - rate)).ln();
        let mut f = vec![init; n];
        let mut history = vec![deviance(y, &f)];
        let all: Vec<usize> = (0..n).collect();
        let sorted_all = presort(x, &all);
        let n_inbag = ((params.subsample * n as f64) as usize).max(1);
        let mut stages = Vec::with_capacity(params.n_estimators);
        let mut residual = vec![0.0; n];
        let mut hessian = vec![0.0; n];
        for stage in 0..params.n_estimators {
            for i in 0..n {
                let p = sigmoid(f[i]);
                residual[i] = y[i] as f64 - p;
                hessian[i] = p * (1.0 - p);
            }
            let sorted = if n_inbag < n {
                let mut order = all.clone();
                order.shuffle(&mut rng_at(seed, &[STREAM, stage as u64]));
                let mut inbag = vec![false; n];
                order[..n_inbag].iter().for_each(|&i| inbag[i] = true);
                sorted_all
                    .iter()
                    .map(|ids| ids.iter().copied().filter(|&i| inbag[i]).collect())
                    .collect()
            } else {
                sorted_all.clone()
            };
            let tree = RegGrow {
                x,
                residual: &residual,
                hessian: &hessian,
                params,
            }
            .grow(sorted);
            for (i, fi) in f.iter_mut().enumerate() {
                *fi += params.learning_rate * tree.predict(x.row(i));
            }
            history.push(deviance(y, &f));
            stages.push(tree);
        }
        BoostingFit {
            model: Boosting {
                init,
                learning_rate: params.learning_rate,
                stages,
            },
            deviance_history: history,
        }
    }

    pub fn raw_score(&self, x: &[f64]) -> f64 {
        self.init + self.learning_rate * self.stages.iter().map(|t| t.predict(x)).sum::<f64>()
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.raw_score(x))
    }
}
