use serde::{Deserialize, Serialize};

use super::matrix::{sigmoid, Matrix};
use super::params::QdaParams;
use crate::error::{Error, Result};

/// Per-class Gaussian with full covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassGaussian {
    pub mean: Vec<f64>,
    /// Regularized covariance, row-major `d × d`.
    pub covariance: Vec<f64>,
    /// Lower Cholesky factor of `covariance`, row-major.
    pub cholesky: Vec<f64>,
    pub log_det: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qda {
    pub priors: [f64; 2],
    pub classes: [ClassGaussian; 2],
}

pub(crate) fn cholesky(a: &[f64], d: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i * d + k] * l[j * d + k]).sum();
            if i == j {
                let v = a[i * d + i] - s;
                if !(v > 0.0) {
                    return None;
                }
                l[i * d + i] = v.sqrt();
            } else {
                l[i * d + j] = (a[i * d + j] - s) / l[j * d + j];
            }
        }
    }
    Some(l)
}

fn class_gaussian(x: &Matrix, y: &[u8], class: u8, tol: f64) -> Result<ClassGaussian> {
    let d = x.cols;
    let ids: Vec<usize> = (0..x.rows).filter(|&i| y[i] == class).collect();
    if ids.len() < 2 {
        return Err(Error::DegenerateClasses(format!(
            "class {class} has {} rows; a covariance estimate needs at least 2",
            ids.len()
        )));
    }
    let mut mean = vec![0.0; d];
    for &i in &ids {
        for (m, v) in mean.iter_mut().zip(x.row(i)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= ids.len() as f64);
    let mut cov = vec![0.0; d * d];
    for &i in &ids {
        let r = x.row(i);
        for a in 0..d {
            let da = r[a] - mean[a];
            for b in 0..=a {
                cov[a * d + b] += da * (r[b] - mean[b]);
            }
        }
    }
    let denom = (ids.len() - 1) as f64;
    for a in 0..d {
        for b in 0..=a {
            let v = cov[a * d + b] / denom;
            cov[a * d + b] = v;
            cov[b * d + a] = v;
        }
    }
    let trace: f64 = (0..d).map(|a| cov[a * d + a]).sum();
    let ridge = if trace > 0.0 { tol * trace / d as f64 } else { tol };
    for a in 0..d {
        cov[a * d + a] += ridge;
    }
    let l = cholesky(&cov, d).ok_or_else(|| {
        Error::Dataset(format!("class {class} covariance is not positive definite after regularization"))
    })?;
    let log_det = 2.0 * (0..d).map(|a| l[a * d + a].ln()).sum::<f64>();
    Ok(ClassGaussian {
        mean,
        covariance: cov,
        cholesky: l,
        log_det,
    })
}

impl ClassGaussian {
    /// Squared Mahalanobis distance via forward substitution.
    fn mahalanobis(&self, x: &[f64]) -> f64 {
        let d = self.mean.len();
        let mut z = vec![0.0; d];
        for i in 0..d {
            let s: f64 = (0..i).map(|k| self.cholesky[i * d + k] * z[k]).sum();
            z[i] = (x[i] - self.mean[i] - s) / self.cholesky[i * d + i];
        }
        z.iter().map(|v| v * v).sum()
    }
}

impl Qda {
    pub fn fit(x: &Matrix, y: &[u8], params: &QdaParams) -> Result<Self> {
        let total = params.priors[0] + params.priors[1];
        Ok(Qda {
            priors: [params.priors[0] / total, params.priors[1] / total],
            classes: [class_gaussian(x, y, 0, params.tol)?, class_gaussian(x, y, 1, params.tol)?],
        })
    }

    pub fn discriminant(&self, x: &[f64], class: usize) -> f64 {
        let g = &self.classes[class];
        self.priors[class].ln() - 0.5 * g.log_det - 0.5 * g.mahalanobis(x)
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.discriminant(x, 1) - self.discriminant(x, 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    #[test]
    fn cholesky_reconstructs() {
        let a = [4.0, 2.0, 2.0, 3.0];
        let l = cholesky(&a, 2).unwrap();
        assert_eq!(l, vec![2.0, 0.0, 1.0, 2f64.sqrt()]);
        assert!(cholesky(&[1.0, 2.0, 2.0, 1.0], 2).is_none());
    }

    #[test]
    fn separates_by_spread() {
        // Same mean, different variance: QDA can still tell them apart.
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in -5..=5 {
            rows.push([i as f64 * 0.1]);
            y.push(0);
            rows.push([i as f64 * 3.0]);
            y.push(1);
        }
        let m = Qda::fit(&Matrix::from_rows(&rows), &y, &QdaParams::default()).unwrap();
        assert!(m.score(&[0.0]) < 0.5);
        assert!(m.score(&[12.0]) > 0.5);
    }

    #[test]
    fn single_row_class_is_rejected() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0]]);
        assert!(matches!(Qda::fit(&x, &[0, 0, 1], &QdaParams::default()), Err(Error::DegenerateClasses(_))));
    }

    proptest! {
        #[test]
        fn regularized_covariances_are_positive_definite(
            rows in prop::collection::vec(prop::collection::vec(-3i8..3, 3), 6..20),
            constant in any::<bool>(),
        ) {
            let rows: Vec<Vec<f64>> = rows
                .into_iter()
                .map(|r| {
                    let mut v: Vec<f64> = r.into_iter().map(f64::from).collect();
                    if constant { v[2] = 1.0; }
                    v
                })
                .collect();
            let y: Vec<u8> = (0..rows.len()).map(|i| (i % 2) as u8).collect();
            let m = Qda::fit(&Matrix::from_rows(&rows), &y, &QdaParams::default()).unwrap();
            for g in &m.classes {
                let c = DMatrix::from_row_slice(3, 3, &g.covariance);
                prop_assert_eq!(c.clone(), c.transpose());
                let eig = c.symmetric_eigen().eigenvalues;
                prop_assert!(eig.iter().all(|&e| e > 0.0), "eigenvalues {:?}", eig);
            }
        }
    }
}
