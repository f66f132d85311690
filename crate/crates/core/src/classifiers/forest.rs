use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::params::ForestParams;
use super::tree::{grow, GrowConfig, Tree};
use crate::exec;
use crate::rng::rng_at;

const STREAM: u64 = 0xf0_4e57;

/// Bootstrap-aggregated trees. The score is the mean leaf positive fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
}

impl Forest {
    pub fn fit(x: &Matrix, y: &[u8], params: &ForestParams, seed: u64) -> Self {
        let cfg = GrowConfig {
            min_samples_split: params.min_samples_split,
            min_samples_leaf: params.min_samples_leaf,
            max_depth: Some(params.max_depth),
            max_features: Some(params.max_features.resolve(x.cols)),
        };
        let trees = exec::map_range(params.n_estimators, |t| {
            let mut rng = rng_at(seed, &[STREAM, t as u64]);
            let sample: Vec<usize> = (0..x.rows).map(|_| rng.random_range(0..x.rows)).collect();
            grow(x, y, &sample, &cfg, Some(&mut rng))
        });
        Forest { trees }
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.score(x)).sum();
        sum / self.trees.len() as f64
    }
}
