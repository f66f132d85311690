//! One hidden tanh layer, sigmoid output, cross-entropy loss, trained with
//! Adam on shuffled mini-batches.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::matrix::{sigmoid, softplus, Matrix};
use super::params::NeuralParams;
use crate::rng::rng_at;

const INIT_STREAM: u64 = 0x1417;
const SHUFFLE_STREAM: u64 = 0x5a0f;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuralNet {
    pub n_inputs: usize,
    pub n_hidden: usize,
    /// Hidden weights, row-major `n_hidden × n_inputs`.
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

#[derive(Debug, Clone)]
pub struct NeuralFit {
    pub model: NeuralNet,
    /// Mean training loss per epoch.
    pub loss_curve: Vec<f64>,
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn new(n: usize) -> Self {
        Adam {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [&mut f64], grads: &[f64], p: &NeuralParams) {
        self.t += 1;
        let lr = p.learning_rate_init * (1.0 - p.beta2.powi(self.t)).sqrt() / (1.0 - p.beta1.powi(self.t));
        for (k, (w, g)) in params.iter_mut().zip(grads).enumerate() {
            self.m[k] = p.beta1 * self.m[k] + (1.0 - p.beta1) * g;
            self.v[k] = p.beta2 * self.v[k] + (1.0 - p.beta2) * g * g;
            **w -= lr * self.m[k] / (self.v[k].sqrt() + p.epsilon);
        }
    }
}

impl NeuralNet {
    fn init(d: usize, h: usize, seed: u64) -> Self {
        let mut rng = rng_at(seed, &[INIT_STREAM]);
        let mut uniform = |fan_in: usize, fan_out: usize, n: usize| -> Vec<f64> {
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            (0..n).map(|_| rng.random_range(-bound..bound)).collect()
        };
        let w1 = uniform(d, h, d * h);
        let b1 = uniform(d, h, h);
        let w2 = uniform(h, 1, h);
        let b2 = uniform(h, 1, 1)[0];
        NeuralNet {
            n_inputs: d,
            n_hidden: h,
            w1,
            b1,
            w2,
            b2,
        }
    }

    fn hidden(&self, x: &[f64], out: &mut [f64]) {
        for (j, a) in out.iter_mut().enumerate() {
            let row = &self.w1[j * self.n_inputs..(j + 1) * self.n_inputs];
            *a = (row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.b1[j]).tanh();
        }
    }

    pub fn raw_score(&self, x: &[f64]) -> f64 {
        let mut a = vec![0.0; self.n_hidden];
        self.hidden(x, &mut a);
        a.iter().zip(&self.w2).map(|(a, w)| a * w).sum::<f64>() + self.b2
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.raw_score(x))
    }

    pub fn fit(x: &Matrix, y: &[u8], params: &NeuralParams, seed: u64) -> NeuralFit {
        let (n, d, h) = (x.rows, x.cols, params.hidden);
        let mut net = NeuralNet::init(d, h, seed);
        let n_params = d * h + h + h + 1;
        let mut adam = Adam::new(n_params);
        let batch = params.batch_size.min(n).max(1);
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = rng_at(seed, &[SHUFFLE_STREAM]);
        let mut grad = vec![0.0; n_params];
        let mut act = vec![0.0; h];
        let mut loss_curve = Vec::new();
        let mut best_loss = f64::INFINITY;
        let mut no_improvement = 0;

        for _epoch in 0..params.max_iter {
            if params.shuffle {
                order.shuffle(&mut rng);
            }
            let mut epoch_loss = 0.0;
            for chunk in order.chunks(batch) {
                grad.iter_mut().for_each(|g| *g = 0.0);
                let bs = chunk.len() as f64;
                let mut data_loss = 0.0;
                for &i in chunk {
                    let xi = x.row(i);
                    net.hidden(xi, &mut act);
                    let z = act.iter().zip(&net.w2).map(|(a, w)| a * w).sum::<f64>() + net.b2;
                    data_loss += if y[i] == 1 { softplus(-z) } else { softplus(z) };
                    let delta = sigmoid(z) - y[i] as f64;
                    let (g1, rest) = grad.split_at_mut(d * h);
                    let (gb1, rest) = rest.split_at_mut(h);
                    let (gw2, gb2) = rest.split_at_mut(h);
                    gb2[0] += delta;
                    for j in 0..h {
                        gw2[j] += delta * act[j];
                        let dh = delta * net.w2[j] * (1.0 - act[j] * act[j]);
                        gb1[j] += dh;
                        for (g, v) in g1[j * d..(j + 1) * d].iter_mut().zip(xi) {
                            *g += dh * v;
                        }
                    }
                }
                let sq: f64 = net.w1.iter().chain(&net.w2).map(|w| w * w).sum();
                let batch_loss = data_loss / bs + 0.5 * params.alpha * sq / bs;
                epoch_loss += batch_loss * bs;
                for (k, g) in grad.iter_mut().enumerate() {
                    let weight = if k < d * h {
                        net.w1[k]
                    } else if (d * h + h..d * h + 2 * h).contains(&k) {
                        net.w2[k - d * h - h]
                    } else {
                        0.0
                    };
                    *g = (*g + params.alpha * weight) / bs;
                }
                let NeuralNet { w1, b1, w2, b2, .. } = &mut net;
                let mut refs: Vec<&mut f64> = w1
                    .iter_mut()
                    .chain(b1.iter_mut())
                    .chain(w2.iter_mut())
                    .chain(std::iter::once(b2))
                    .collect();
                adam.step(&mut refs, &grad, params);
            }
            let loss = epoch_loss / n as f64;
            loss_curve.push(loss);
            if loss > best_loss - params.tol {
                no_improvement += 1;
            } else {
                no_improvement = 0;
            }
            best_loss = best_loss.min(loss);
            if no_improvement > params.n_iter_no_change {
                break;
            }
        }
        NeuralFit {
            model: net,
            loss_curve,
        }
    }
}
