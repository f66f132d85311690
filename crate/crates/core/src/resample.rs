//! SMOTE oversampling of the minority class up to the majority count.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::features::{column_kind, ColumnKind};
use crate::ingest::LabeledDataset;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmoteParams {
    pub k_neighbors: usize,
    pub seed: u64,
}

impl Default for SmoteParams {
    fn default() -> Self {
        Self {
            k_neighbors: 5,
            seed: 0,
        }
    }
}

/// `(negatives, positives)`.
pub fn class_counts(labels: &[u8]) -> (usize, usize) {
    let pos = labels.iter().filter(|&&l| l == 1).count();
    (labels.len() - pos, pos)
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// The `k` nearest other minority rows of each requested row, by Euclidean
/// distance on raw features. Ties go to the lower row position.
fn nearest_neighbors(points: &[&[f64]], queries: &[usize], k: usize) -> Vec<Vec<usize>> {
    exec::map(queries, |&p| {
        let mut cand: Vec<(f64, usize)> = (0..points.len())
            .filter(|&q| q != p)
            .map(|q| (squared_distance(points[p], points[q]), q))
            .collect();
        let by_dist = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if cand.len() > k {
            cand.select_nth_unstable_by(k - 1, by_dist);
            cand.truncate(k);
        }
        cand.sort_by(by_dist);
        cand.into_iter().map(|(_, q)| q).collect()
    })
}

fn round_to_kind(v: f64, kind: ColumnKind) -> f64 {
    match kind {
        ColumnKind::Integer => (v + 0.5).floor(),
        ColumnKind::Binary => (v + 0.5).floor().clamp(0.0, 1.0),
        ColumnKind::Real => v,
    }
}

/// Appends synthetic minority rows until both classes have equal counts.
///
/// Originals come first, untouched. Each synthetic row interpolates between
/// a minority seed row (round-robin over a seeded shuffle of the minority)
/// and one of its `k` nearest minority neighbours, then rounds integer and
/// binary columns.
pub fn smote(dataset: &LabeledDataset, params: &SmoteParams) -> Result<LabeledDataset> {
    let (n_neg, n_pos) = class_counts(dataset.labels());
    if n_neg == n_pos {
        return Ok(dataset.clone());
    }
    if params.k_neighbors == 0 {
        return Err(Error::param("k_neighbors", "must be at least 1"));
    }
    let (minority_label, minority, majority) = if n_pos < n_neg {
        (1u8, n_pos, n_neg)
    } else {
        (0u8, n_neg, n_pos)
    };
    if minority <= params.k_neighbors {
        return Err(Error::MinorityTooSmall {
            minority,
            k: params.k_neighbors,
        });
    }

    let members: Vec<usize> = (0..dataset.n_rows())
        .filter(|&i| dataset.label(i) == minority_label)
        .collect();
    let points: Vec<&[f64]> = members.iter().map(|&i| dataset.row(i)).collect();
    let kinds: Vec<ColumnKind> = dataset.columns().iter().map(|c| column_kind(c)).collect();

    let mut rng = rng::rng_at(params.seed, &[0x5307e]);
    let mut order: Vec<usize> = (0..minority).collect();
    order.shuffle(&mut rng);

    let n_synthetic = majority - minority;
    let seeds_used = &order[..n_synthetic.min(minority)];
    let neighbor_lists = nearest_neighbors(&points, seeds_used, params.k_neighbors);

    let mut out = dataset.clone();
    let mut row = vec![0.0; dataset.n_cols()];
    for t in 0..n_synthetic {
        let slot = t % minority;
        let base = points[order[slot]];
        let neighbors = &neighbor_lists[slot];
        let other = points[neighbors[rng.random_range(0..neighbors.len())]];
        let u: f64 = rng.random();
        for (j, v) in row.iter_mut().enumerate() {
            *v = round_to_kind(base[j] + u * (other[j] - base[j]), kinds[j]);
        }
        out.push(&row, minority_label)?;
    }
    Ok(out)
}
