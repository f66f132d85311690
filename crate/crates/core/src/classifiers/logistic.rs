use serde::{Deserialize, Serialize};

use super::matrix::{sigmoid, softplus, Matrix};
use super::params::LogisticParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Logistic {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

/// Fitted model plus the objective value after each accepted step
/// (the first entry is the starting point).
#[derive(Debug, Clone)]
pub struct LogisticFit {
    pub model: Logistic,
    pub loss_history: Vec<f64>,
}

struct Problem<'a> {
    x: &'a Matrix,
    y: &'a [u8],
    /// Penalty weight `1 / (C n)`.
    lambda: f64,
    fit_intercept: bool,
}

impl Problem<'_> {
    fn margin(&self, w: &[f64], b: f64, i: usize) -> f64 {
        self.x.row(i).iter().zip(w).map(|(v, w)| v * w).sum::<f64>() + b
    }

    /// Mean log-loss plus `‖w‖² / (2Cn)`.
    fn loss(&self, w: &[f64], b: f64) -> f64 {
        let n = self.x.rows as f64;
        let data: f64 = (0..self.x.rows)
            .map(|i| {
                let z = self.margin(w, b, i);
                if self.y[i] == 1 { softplus(-z) } else { softplus(z) }
            })
            .sum();
        data / n + 0.5 * self.lambda * w.iter().map(|v| v * v).sum::<f64>()
    }

    fn gradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let n = self.x.rows as f64;
        let mut gw = vec![0.0; w.len()];
        let mut gb = 0.0;
        for i in 0..self.x.rows {
            let r = sigmoid(self.margin(w, b, i)) - self.y[i] as f64;
            for (g, v) in gw.iter_mut().zip(self.x.row(i)) {
                *g += r * v;
            }
            gb += r;
        }
        for (g, wj) in gw.iter_mut().zip(w) {
            *g = *g / n + self.lambda * wj;
        }
        let gb = if self.fit_intercept { gb / n } else { 0.0 };
        (gw, gb)
    }
}

impl Logistic {
    /// Batch gradient descent with Armijo backtracking. Stops when the
    /// gradient's max-norm drops below `tol` or after `max_iter` steps.
    pub fn fit(x: &Matrix, y: &[u8], params: &LogisticParams) -> LogisticFit {
        let p = Problem {
            x,
            y,
            lambda: 1.0 / (params.c * x.rows.max(1) as f64),
            fit_intercept: params.fit_intercept,
        };
        let mut w = vec![0.0; x.cols];
        let mut b = 0.0;
        let mut loss = p.loss(&w, b);
        let mut history = vec![loss];
        let mut step = 1.0;
        for _ in 0..params.max_iter {
            let (gw, gb) = p.gradient(&w, b);
            let max_norm = gw.iter().fold(gb.abs(), |m, g| m.max(g.abs()));
            if max_norm < params.tol {
                break;
            }
            let sq: f64 = gw.iter().map(|g| g * g).sum::<f64>() + gb * gb;
            let mut accepted = None;
            for _ in 0..60 {
                let w_new: Vec<f64> = w.iter().zip(&gw).map(|(w, g)| w - step * g).collect();
                let b_new = b - step * gb;
                let l_new = p.loss(&w_new, b_new);
                if l_new <= loss - 0.5 * step * sq {
                    accepted = Some((w_new, b_new, l_new));
                    break;
                }
                step *= 0.5;
            }
            let Some((w_new, b_new, l_new)) = accepted else { break };
            w = w_new;
            b = b_new;
            loss = l_new;
            history.push(loss);
            step *= 2.0;
        }
        LogisticFit {
            model: Logistic {
                weights: w,
                intercept: b,
            },
            loss_history: history,
        }
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        let z = x.iter().zip(&self.weights).map(|(v, w)| v * w).sum::<f64>() + self.intercept;
        sigmoid(z)
    }
}
