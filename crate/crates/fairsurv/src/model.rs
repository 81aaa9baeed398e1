//! Scalar score functions g(X): a linear model and a small rectifier MLP,
//! with forward evaluation and analytic parameter gradients.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// row-major (out_dim x in_dim)
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub in_dim: usize,
    pub out_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub layers: Vec<Layer>,
}

/// Positive AFT scale kept in log space so sigma = exp(log_sigma) > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AftScale {
    pub log_sigma: f64,
}

impl AftScale {
    pub fn sigma(&self) -> f64 {
        self.log_sigma.exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Linear(LinearModel),
    Mlp(MlpModel),
}

impl Model {
    pub fn linear(p: usize) -> Self {
        Model::Linear(LinearModel {
            weights: vec![0.0; p],
            bias: 0.0,
        })
    }

    /// Glorot-uniform weights, zero biases, hidden rectifiers, scalar output.
    pub fn mlp<R: Rng>(input_dim: usize, hidden: &[usize], rng: &mut R) -> Self {
        let mut dims = vec![input_dim];
        dims.extend_from_slice(hidden);
        dims.push(1);
        let layers = dims
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
                Layer {
                    weights: (0..fan_in * fan_out)
                        .map(|_| rng.gen_range(-bound..=bound))
                        .collect(),
                    biases: vec![0.0; fan_out],
                    in_dim: fan_in,
                    out_dim: fan_out,
                }
            })
            .collect();
        Model::Mlp(MlpModel { layers })
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Model::Linear(m) => m.weights.len(),
            Model::Mlp(m) => m.layers.first().map_or(0, |l| l.in_dim),
        }
    }

    pub fn n_params(&self) -> usize {
        match self {
            Model::Linear(m) => m.weights.len() + 1,
            Model::Mlp(m) => m
                .layers
                .iter()
                .map(|l| l.weights.len() + l.biases.len())
                .sum(),
        }
    }

    pub fn params_flat(&self) -> Vec<f64> {
        match self {
            Model::Linear(m) => {
                let mut v = m.weights.clone();
                v.push(m.bias);
                v
            }
            Model::Mlp(m) => {
                let mut v = Vec::with_capacity(self.n_params());
                for l in &m.layers {
                    v.extend_from_slice(&l.weights);
                    v.extend_from_slice(&l.biases);
                }
                v
            }
        }
    }

    pub fn set_params_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.n_params() {
            return Err(Error::Shape(format!(
                "expected {} parameters, got {}",
                self.n_params(),
                flat.len()
            )));
        }
        match self {
            Model::Linear(m) => {
                let p = m.weights.len();
                m.weights.copy_from_slice(&flat[..p]);
                m.bias = flat[p];
            }
            Model::Mlp(m) => {
                let mut off = 0;
                for l in &mut m.layers {
                    let nw = l.weights.len();
                    l.weights.copy_from_slice(&flat[off..off + nw]);
                    off += nw;
                    let nb = l.biases.len();
                    l.biases.copy_from_slice(&flat[off..off + nb]);
                    off += nb;
                }
            }
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.input_dim() {
            return Err(Error::Shape(format!(
                "input dimension {} does not match model dimension {}",
                x.len(),
                self.input_dim()
            )));
        }
        match self {
            Model::Linear(m) => {
                Ok(m.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + m.bias)
            }
            Model::Mlp(m) => {
                let mut act = x.to_vec();
                for (li, l) in m.layers.iter().enumerate() {
                    let last = li + 1 == m.layers.len();
                    let mut next = vec![0.0; l.out_dim];
                    for (o, out) in next.iter_mut().enumerate() {
                        let row = &l.weights[o * l.in_dim..(o + 1) * l.in_dim];
                        let z = row.iter().zip(&act).map(|(w, a)| w * a).sum::<f64>() + l.biases[o];
                        *out = if last { z } else { z.max(0.0) };
                    }
                    act = next;
                }
                Ok(act[0])
            }
        }
    }

    pub fn forward_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.forward(x)).collect()
    }

    /// Parameter gradient of sum_i upstream_i * g(X_i), flat layout matching
    /// `params_flat`. The rectifier subgradient at 0 is 0.
    pub fn backward(&self, xs: &[Vec<f64>], upstream: &[f64]) -> Result<Vec<f64>> {
        if xs.len() != upstream.len() {
            return Err(Error::Shape(format!(
                "batch size {} does not match upstream length {}",
                xs.len(),
                upstream.len()
            )));
        }
        let mut grad = vec![0.0; self.n_params()];
        match self {
            Model::Linear(m) => {
                let p = m.weights.len();
                for (x, &u) in xs.iter().zip(upstream) {
                    if x.len() != p {
                        return Err(Error::Shape("feature dimension mismatch".into()));
                    }
                    for (k, &v) in x.iter().enumerate() {
                        grad[k] += u * v;
                    }
                    grad[p] += u;
                }
            }
            Model::Mlp(m) => {
                for (x, &u) in xs.iter().zip(upstream) {
                    if x.len() != self.input_dim() {
                        return Err(Error::Shape("feature dimension mismatch".into()));
                    }
                    // forward pass caching pre- and post-activation values
                    let mut acts: Vec<Vec<f64>> = vec![x.clone()];
                    let mut pre: Vec<Vec<f64>> = Vec::with_capacity(m.layers.len());
                    for (li, l) in m.layers.iter().enumerate() {
                        let last = li + 1 == m.layers.len();
                        let input = acts.last().unwrap();
                        let mut z = vec![0.0; l.out_dim];
                        for (o, zo) in z.iter_mut().enumerate() {
                            let row = &l.weights[o * l.in_dim..(o + 1) * l.in_dim];
                            *zo = row.iter().zip(input).map(|(w, a)| w * a).sum::<f64>()
                                + l.biases[o];
                        }
                        let a = if last {
                            z.clone()
                        } else {
                            z.iter().map(|v| v.max(0.0)).collect()
                        };
                        pre.push(z);
                        acts.push(a);
                    }
                    // backward pass
                    let mut delta = vec![u];
                    let mut offsets = Vec::with_capacity(m.layers.len());
                    let mut off = 0;
                    for l in &m.layers {
                        offsets.push(off);
                        off += l.weights.len() + l.biases.len();
                    }
                    for li in (0..m.layers.len()).rev() {
                        let l = &m.layers[li];
                        let input = &acts[li];
                        let base = offsets[li];
                        for o in 0..l.out_dim {
                            let d = delta[o];
                            for (k, &a) in input.iter().enumerate() {
                                grad[base + o * l.in_dim + k] += d * a;
                            }
                            grad[base + l.weights.len() + o] += d;
                        }
                        if li > 0 {
                            let mut prev = vec![0.0; l.in_dim];
                            for (o, &d) in delta.iter().enumerate() {
                                let row = &l.weights[o * l.in_dim..(o + 1) * l.in_dim];
                                for (k, &w) in row.iter().enumerate() {
                                    prev[k] += d * w;
                                }
                            }
                            // rectifier mask from the previous layer's pre-activations
                            for (k, p) in prev.iter_mut().enumerate() {
                                if pre[li - 1][k] <= 0.0 {
                                    *p = 0.0;
                                }
                            }
                            delta = prev;
                        }
                    }
                }
            }
        }
        Ok(grad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn linear_forward_is_dot_plus_bias() {
        let m = Model::Linear(LinearModel {
            weights: vec![1.0, 2.0],
            bias: 0.0,
        });
        assert_eq!(m.forward(&[3.0, 4.0]).unwrap(), 11.0);
    }

    #[test]
    fn constant_model() {
        let m = Model::Linear(LinearModel {
            weights: vec![0.0, 0.0],
            bias: 2.5,
        });
        assert_eq!(m.forward(&[7.0, -3.0]).unwrap(), 2.5);
    }

    #[test]
    fn zero_mlp_outputs_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut m = Model::mlp(3, &[4, 4], &mut rng);
        let zeros = vec![0.0; m.n_params()];
        m.set_params_flat(&zeros).unwrap();
        assert_eq!(m.forward(&[1.0, -2.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let m = Model::linear(2);
        assert!(matches!(m.forward(&[1.0]), Err(Error::Shape(_))));
    }

    #[test]
    fn linear_chain_rule() {
        let m = Model::Linear(LinearModel {
            weights: vec![0.3, -0.7],
            bias: 0.1,
        });
        let grad = m.backward(&[vec![2.0, 5.0]], &[1.0]).unwrap();
        assert_eq!(grad, vec![2.0, 5.0, 1.0]);
    }

    #[test]
    fn zero_upstream_zero_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = Model::mlp(3, &[5], &mut rng);
        let xs = vec![vec![0.2, -0.4, 1.0], vec![1.1, 0.0, -0.3]];
        let grad = m.backward(&xs, &[0.0, 0.0]).unwrap();
        assert!(grad.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn linear_forward_exactly_affine() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = Model::Linear(LinearModel {
            weights: (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            bias: rng.gen_range(-1.0..1.0),
        });
        let x1: Vec<f64> = (0..5).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let x2: Vec<f64> = (0..5).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let sum: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| a + b).collect();
        let zero = vec![0.0; 5];
        let lhs = m.forward(&sum).unwrap() - m.forward(&x1).unwrap() - m.forward(&x2).unwrap()
            + m.forward(&zero).unwrap();
        assert!(lhs.abs() < 1e-12);
    }

    /// Central finite differences of sum_i upstream_i * g(X_i).
    fn fd_grad(model: &Model, xs: &[Vec<f64>], upstream: &[f64], h: f64) -> Vec<f64> {
        let mut flat = model.params_flat();
        let mut fd = vec![0.0; flat.len()];
        for k in 0..flat.len() {
            let orig = flat[k];
            let f = |model: &Model| -> f64 {
                model
                    .forward_batch(xs)
                    .unwrap()
                    .iter()
                    .zip(upstream)
                    .map(|(g, u)| g * u)
                    .sum()
            };
            let mut m = model.clone();
            flat[k] = orig + h;
            m.set_params_flat(&flat).unwrap();
            let up = f(&m);
            flat[k] = orig - h;
            m.set_params_flat(&flat).unwrap();
            let down = f(&m);
            flat[k] = orig;
            fd[k] = (up - down) / (2.0 * h);
        }
        fd
    }

    fn max_rel_err(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1e-4))
            .fold(0.0, f64::max)
    }

    #[test]
    fn gradients_match_finite_differences() {
        for seed in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (model, p) = if seed % 2 == 0 {
                let p = 4;
                let m = Model::Linear(LinearModel {
                    weights: (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                    bias: rng.gen_range(-1.0..1.0),
                });
                (m, p)
            } else {
                let p = 3;
                (Model::mlp(p, &[6, 6], &mut rng), p)
            };
            let n = 8;
            let xs: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..p).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect();
            let upstream: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let analytic = model.backward(&xs, &upstream).unwrap();
            let fd = fd_grad(&model, &xs, &upstream, 1e-6);
            assert!(
                max_rel_err(&analytic, &fd) < 1e-5,
                "seed {seed}: rel err {}",
                max_rel_err(&analytic, &fd)
            );
        }
    }

    #[test]
    fn params_roundtrip_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = Model::mlp(4, &[8, 8], &mut rng);
        let json = serde_json::to_string(&m).unwrap();
        let back: Model = serde_json::from_str(&json).unwrap();
        assert_eq!(m.params_flat(), back.params_flat());
    }
}
