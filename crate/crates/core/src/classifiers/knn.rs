use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::params::{KnnParams, KnnWeights};

/// Stored (standardized) training set for neighbour voting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    pub params: KnnParams,
    pub x: Matrix,
    pub y: Vec<u8>,
}

impl Knn {
    pub fn fit(x: &Matrix, y: &[u8], params: &KnnParams) -> Self {
        if params.n_neighbors > x.rows {
            log::warn!(
                "n_neighbors = {} exceeds the {} training rows; using all of them",
                params.n_neighbors,
                x.rows
            );
        }
        Knn {
            params: *params,
            x: x.clone(),
            y: y.to_vec(),
        }
    }

    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let p = self.params.p;
        if p == 2.0 {
            a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
        } else if p == 1.0 {
            a.iter().zip(b).map(|(u, v)| (u - v).abs()).sum()
        } else {
            a.iter().zip(b).map(|(u, v)| (u - v).abs().powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }

    /// The k nearest rows as `(distance, index)`, ties to the lower index.
    pub fn neighbors(&self, q: &[f64]) -> Vec<(f64, usize)> {
        let k = self.params.n_neighbors.min(self.x.rows);
        let mut all: Vec<(f64, usize)> = (0..self.x.rows)
            .map(|i| (self.distance(q, self.x.row(i)), i))
            .collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < all.len() && k > 0 {
            all.select_nth_unstable_by(k - 1, cmp);
            all.truncate(k);
        }
        all.sort_by(cmp);
        all
    }

    /// Weighted share of positive votes among the neighbours.
    pub fn score(&self, q: &[f64]) -> f64 {
        let nn = self.neighbors(q);
        if nn.is_empty() {
            return 0.0;
        }
        let positive = |i: usize| self.y[i] as f64;
        match self.params.weights {
            KnnWeights::Uniform => nn.iter().map(|&(_, i)| positive(i)).sum::<f64>() / nn.len() as f64,
            KnnWeights::Distance => {
                let exact: Vec<usize> = nn.iter().filter(|(d, _)| *d == 0.0).map(|&(_, i)| i).collect();
                if !exact.is_empty() {
                    return exact.iter().map(|&i| positive(i)).sum::<f64>() / exact.len() as f64;
                }
                let (mut num, mut den) = (0.0, 0.0);
                for &(d, i) in &nn {
                    num += positive(i) / d;
                    den += 1.0 / d;
                }
                num / den
            }
        }
    }
}
