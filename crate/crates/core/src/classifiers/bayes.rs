use serde::{Deserialize, Serialize};

use super::matrix::{sigmoid, Matrix};
use super::params::NaiveBayesParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    /// Normalized class priors.
    pub priors: [f64; 2],
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
}

impl GaussianNb {
    /// Both classes must be present in `y`.
    pub fn fit(x: &Matrix, y: &[u8], params: &NaiveBayesParams) -> Self {
        let d = x.cols;
        let mut n = [0usize; 2];
        let mut means = [vec![0.0; d], vec![0.0; d]];
        for i in 0..x.rows {
            let c = y[i] as usize;
            n[c] += 1;
            for (m, v) in means[c].iter_mut().zip(x.row(i)) {
                *m += v;
            }
        }
        for c in 0..2 {
            means[c].iter_mut().for_each(|m| *m /= n[c] as f64);
        }
        let mut variances = [vec![0.0; d], vec![0.0; d]];
        for i in 0..x.rows {
            let c = y[i] as usize;
            for ((s, v), m) in variances[c].iter_mut().zip(x.row(i)).zip(&means[c]) {
                *s += (v - m) * (v - m);
            }
        }
        for c in 0..2 {
            for s in variances[c].iter_mut() {
                *s = (*s / n[c] as f64).max(params.var_floor);
            }
        }
        let total = params.priors[0] + params.priors[1];
        GaussianNb {
            priors: [params.priors[0] / total, params.priors[1] / total],
            means,
            variances,
        }
    }

    pub fn log_joint(&self, x: &[f64], class: usize) -> f64 {
        let ll: f64 = x
            .iter()
            .zip(&self.means[class])
            .zip(&self.variances[class])
            .map(|((v, m), s)| -0.5 * (2.0 * std::f64::consts::PI * s).ln() - (v - m) * (v - m) / (2.0 * s))
            .sum();
        self.priors[class].ln() + ll
    }

    /// Normalized posterior of the positive class.
    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.log_joint(x, 1) - self.log_joint(x, 0))
    }
}
