//! CART classification trees on Gini impurity.
//!
//! Each feature keeps its own list of sample ids sorted by value. A node
//! scans those lists once per feature and hands the partitioned lists to
//! its children, so no re-sorting happens below the root.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::rng::Rng;

/// `1 - p0^2 - p1^2` for a node with the given class counts.
pub fn gini_impurity(counts: [u64; 2]) -> Result<f64> {
    let n = counts[0] + counts[1];
    if n == 0 {
        return Err(Error::Empty("gini impurity of an empty node".into()));
    }
    let p0 = counts[0] as f64 / n as f64;
    let p1 = counts[1] as f64 / n as f64;
    Ok(1.0 - p0 * p0 - p1 * p1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub weighted_gini: f64,
}

/// Exact split quality `(l0²+l1²)/nL + (r0²+r1²)/nR` as a fraction.
/// Larger is purer; weighted Gini is `1 - value/n`.
#[derive(Debug, Clone, Copy)]
struct Purity {
    num: u128,
    den: u128,
}

impl Purity {
    fn of_node(c: [u64; 2]) -> Self {
        let (a, b) = (c[0] as u128, c[1] as u128);
        Purity {
            num: a * a + b * b,
            den: a + b,
        }
    }

    fn of_split(l: [u64; 2], r: [u64; 2]) -> Self {
        let (l0, l1, r0, r1) = (l[0] as u128, l[1] as u128, r[0] as u128, r[1] as u128);
        let (nl, nr) = (l0 + l1, r0 + r1);
        Purity {
            num: (l0 * l0 + l1 * l1) * nr + (r0 * r0 + r1 * r1) * nl,
            den: nl * nr,
        }
    }

    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    feature: usize,
    threshold: f64,
    purity: Purity,
    left: [u64; 2],
    right: [u64; 2],
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        use std::cmp::Ordering::*;
        match self.purity.cmp(&other.purity) {
            Greater => true,
            Less => false,
            Equal => (self.feature, self.threshold) < (other.feature, other.threshold),
        }
    }

    fn weighted_gini(&self) -> f64 {
        let (nl, nr) = (self.left[0] + self.left[1], self.right[0] + self.right[1]);
        let gl = gini_impurity(self.left).unwrap_or(0.0);
        let gr = gini_impurity(self.right).unwrap_or(0.0);
        (nl as f64 * gl + nr as f64 * gr) / (nl + nr) as f64
    }
}

/// Threshold strictly between `lo` and `hi` such that `lo <= t < hi`.
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    let t = lo / 2.0 + hi / 2.0;
    if t >= hi || !t.is_finite() { lo } else { t }
}

/// Best split of one feature; `ids` is sorted by that feature.
fn scan_feature(
    x: &Matrix,
    y: &[u8],
    feature: usize,
    ids: &[usize],
    min_leaf: usize,
    total: [u64; 2],
) -> Option<Candidate> {
    let n = ids.len();
    let mut left = [0u64; 2];
    let mut best: Option<Candidate> = None;
    for i in 0..n.saturating_sub(1) {
        left[y[ids[i]] as usize] += 1;
        let n_left = i + 1;
        if n - n_left < min_leaf {
            break;
        }
        let (v, w) = (x.get(ids[i], feature), x.get(ids[i + 1], feature));
        if n_left < min_leaf || v == w {
            continue;
        }
        let right = [total[0] - left[0], total[1] - left[1]];
        let purity = Purity::of_split(left, right);
        if best.is_none_or(|b| purity.cmp(&b.purity).is_gt()) {
            best = Some(Candidate {
                feature,
                threshold: midpoint(v, w),
                purity,
                left,
                right,
            });
        }
    }
    best
}

fn class_counts(y: &[u8], ids: &[usize]) -> [u64; 2] {
    let mut c = [0u64; 2];
    for &i in ids {
        c[y[i] as usize] += 1;
    }
    c
}

pub(crate) fn presort(x: &Matrix, sample: &[usize]) -> Vec<Vec<usize>> {
    (0..x.cols)
        .map(|f| {
            let mut ids = sample.to_vec();
            ids.sort_by(|&a, &b| x.get(a, f).total_cmp(&x.get(b, f)).then(a.cmp(&b)));
            ids
        })
        .collect()
}

/// Splits every per-feature list by `go_left`, keeping each list sorted.
pub(crate) fn partition(
    sorted: Vec<Vec<usize>>,
    go_left: &[bool],
    n_left: usize,
) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut lefts = Vec::with_capacity(sorted.len());
    let mut rights = Vec::with_capacity(sorted.len());
    for ids in sorted {
        let mut l = Vec::with_capacity(n_left);
        let mut r = Vec::with_capacity(ids.len() - n_left);
        for i in ids {
            if go_left[i] { l.push(i) } else { r.push(i) }
        }
        lefts.push(l);
        rights.push(r);
    }
    (lefts, rights)
}

fn is_constant(x: &Matrix, feature: usize, ids: &[usize]) -> bool {
    match (ids.first(), ids.last()) {
        (Some(&a), Some(&b)) => x.get(a, feature) == x.get(b, feature),
        _ => true,
    }
}

/// Best impurity-reducing split over `features`, or none.
fn find_split(
    x: &Matrix,
    y: &[u8],
    sorted: &[Vec<usize>],
    counts: [u64; 2],
    min_leaf: usize,
    features: &mut dyn Iterator<Item = usize>,
) -> Option<Candidate> {
    let mut best: Option<Candidate> = None;
    for f in features {
        if let Some(c) = scan_feature(x, y, f, &sorted[f], min_leaf, counts) {
            if best.is_none_or(|b| c.beats(&b)) {
                best = Some(c);
            }
        }
    }
    best.filter(|c| c.purity.cmp(&Purity::of_node(counts)).is_gt())
}

/// Best split of `rows` by weighted Gini, or `None` when no split leaving at
/// least `min_samples_leaf` rows per side lowers impurity. Ties go to the
/// lower feature index, then the lower threshold.
pub fn best_split<R: AsRef<[f64]>>(
    rows: &[R],
    labels: &[u8],
    min_samples_leaf: usize,
) -> Result<Option<Split>> {
    if rows.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: rows.len(),
            right: labels.len(),
        });
    }
    if labels.iter().any(|&l| l > 1) {
        return Err(Error::Dataset("labels must be 0 or 1".into()));
    }
    let x = Matrix::from_rows(rows);
    if rows.iter().any(|r| r.as_ref().len() != x.cols) {
        return Err(Error::Dataset("rows have different lengths".into()));
    }
    let sample: Vec<usize> = (0..x.rows).collect();
    let sorted = presort(&x, &sample);
    let counts = class_counts(labels, &sample);
    let found = find_split(&x, labels, &sorted, counts, min_samples_leaf.max(1), &mut (0..x.cols));
    Ok(found.map(|c| Split {
        feature: c.feature,
        threshold: c.threshold,
        weighted_gini: c.weighted_gini(),
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        counts: [u64; 2],
    },
}

/// A fitted classification tree; node 0 is the root. Rows with
/// `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
                TreeNode::Leaf { .. } => return i,
            }
        }
    }

    pub fn leaf_counts(&self, x: &[f64]) -> [u64; 2] {
        match self.nodes[self.leaf_index(x)] {
            TreeNode::Leaf { counts } => counts,
            TreeNode::Split { .. } => unreachable!(),
        }
    }

    /// Positive fraction of the leaf reached by `x`.
    pub fn score(&self, x: &[f64]) -> f64 {
        leaf_fraction(self.leaf_counts(x))
    }

    pub fn depth(&self) -> usize {
        let mut max = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((i, d)) = stack.pop() {
            max = max.max(d);
            if let TreeNode::Split { left, right, .. } = self.nodes[i] {
                stack.push((left, d + 1));
                stack.push((right, d + 1));
            }
        }
        max
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }
}

pub fn leaf_fraction(counts: [u64; 2]) -> f64 {
    let n = counts[0] + counts[1];
    if n == 0 { 0.0 } else { counts[1] as f64 / n as f64 }
}

pub(crate) struct GrowConfig {
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub max_depth: Option<usize>,
    /// Features drawn per node; `None` scans all of them.
    pub max_features: Option<usize>,
}

struct Pending {
    node: usize,
    sorted: Vec<Vec<usize>>,
    counts: [u64; 2],
    depth: usize,
}

/// Grows a tree on `sample` (row ids, repeats allowed).
pub(crate) fn grow(
    x: &Matrix,
    y: &[u8],
    sample: &[usize],
    cfg: &GrowConfig,
    mut rng: Option<&mut Rng>,
) -> Tree {
    let min_leaf = cfg.min_samples_leaf.max(1);
    let counts = class_counts(y, sample);
    let mut nodes = vec![TreeNode::Leaf { counts }];
    let mut stack = vec![Pending {
        node: 0,
        sorted: presort(x, sample),
        counts,
        depth: 0,
    }];
    let mut go_left = vec![false; x.rows];
    let mut order: Vec<usize> = (0..x.cols).collect();

    while let Some(p) = stack.pop() {
        let n = (p.counts[0] + p.counts[1]) as usize;
        let splittable = p.counts[0] > 0
            && p.counts[1] > 0
            && n >= cfg.min_samples_split
            && n >= 2 * min_leaf
            && cfg.max_depth.is_none_or(|m| p.depth < m)
            && x.cols > 0;
        if !splittable {
            continue;
        }
        let found = match (cfg.max_features, rng.as_deref_mut()) {
            (Some(k), Some(rng)) if k < x.cols => {
                order.shuffle(rng);
                let sorted = &p.sorted;
                let mut drawn = order
                    .iter()
                    .copied()
                    .filter(|&f| !is_constant(x, f, &sorted[f]))
                    .take(k);
                find_split(x, y, sorted, p.counts, min_leaf, &mut drawn)
            }
            _ => find_split(x, y, &p.sorted, p.counts, min_leaf, &mut (0..x.cols)),
        };
        let Some(c) = found else { continue };

        for &i in &p.sorted[c.feature] {
            go_left[i] = x.get(i, c.feature) <= c.threshold;
        }
        let n_left = (c.left[0] + c.left[1]) as usize;
        let (ls, rs) = partition(p.sorted, &go_left, n_left);
        let left = nodes.len();
        nodes.push(TreeNode::Leaf { counts: c.left });
        nodes.push(TreeNode::Leaf { counts: c.right });
        nodes[p.node] = TreeNode::Split {
            feature: c.feature,
            threshold: c.threshold,
            left,
            right: left + 1,
        };
        stack.push(Pending {
            node: left + 1,
            sorted: rs,
            counts: c.right,
            depth: p.depth + 1,
        });
        stack.push(Pending {
            node: left,
            sorted: ls,
            counts: c.left,
            depth: p.depth + 1,
        });
    }
    Tree { nodes }
}
