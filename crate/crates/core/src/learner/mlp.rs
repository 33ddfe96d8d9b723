//! Minimal fully connected network with ReLU hidden layers, a linear output
//! layer, and explicit reverse-mode gradients. Parameters live in one flat
//! vector so optimizers and checkpoints can treat a network as a single
//! array.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Feed-forward network. Layer l maps `sizes[l]` to `sizes[l+1]`; all layers
/// but the last apply ReLU. Parameters are packed `[W_0, b_0, W_1, b_1, ...]`
/// with each `W` stored row-major (output × input).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mlp {
    pub sizes: Vec<usize>,
    pub params: Vec<f64>,
}

/// Per-sample forward pass record: the input to each layer and each layer's
/// pre-activation.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    inputs: Vec<Vec<f64>>,
    pre_acts: Vec<Vec<f64>>,
}

impl Mlp {
    /// Number of parameters for a given layer plan.
    pub fn param_count(sizes: &[usize]) -> usize {
        sizes.windows(2).map(|w| w[1] * w[0] + w[1]).sum()
    }

    /// Uniform He-style initialization in ±1/√fan_in.
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], rng: &mut R) -> Self {
        assert!(sizes.len() >= 2, "need at least input and output sizes");
        let mut params = Vec::with_capacity(Self::param_count(sizes));
        for w in sizes.windows(2) {
            let bound = 1.0 / (w[0] as f64).sqrt();
            for _ in 0..w[1] * w[0] + w[1] {
                params.push(rng.gen_range(-bound..bound));
            }
        }
        Self { sizes: sizes.to_vec(), params }
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    fn num_layers(&self) -> usize {
        self.sizes.len() - 1
    }

    /// Offset of layer l's weight block in the flat parameter vector.
    fn layer_offset(&self, layer: usize) -> usize {
        self.sizes
            .windows(2)
            .take(layer)
            .map(|w| w[1] * w[0] + w[1])
            .sum()
    }

    /// Forward pass for one sample, retaining the cache for `backward`.
    pub fn forward(&self, x: &[f64]) -> (Vec<f64>, ForwardCache) {
        assert_eq!(x.len(), self.input_dim());
        let mut inputs = Vec::with_capacity(self.num_layers());
        let mut pre_acts = Vec::with_capacity(self.num_layers());
        let mut a = x.to_vec();
        for l in 0..self.num_layers() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let off = self.layer_offset(l);
            let w = &self.params[off..off + n_out * n_in];
            let b = &self.params[off + n_out * n_in..off + n_out * n_in + n_out];
            let mut z = vec![0.0; n_out];
            for (i, zi) in z.iter_mut().enumerate() {
                let row = &w[i * n_in..(i + 1) * n_in];
                *zi = b[i] + row.iter().zip(a.iter()).map(|(wij, aj)| wij * aj).sum::<f64>();
            }
            inputs.push(a);
            pre_acts.push(z.clone());
            if l + 1 < self.num_layers() {
                for zi in z.iter_mut() {
                    *zi = zi.max(0.0);
                }
            }
            a = z;
        }
        (a, ForwardCache { inputs, pre_acts })
    }

    /// Output without a cache.
    pub fn infer(&self, x: &[f64]) -> Vec<f64> {
        self.forward(x).0
    }

    /// Accumulates dL/dparams into `param_grad` (same length as `params`)
    /// given dL/doutput, and returns dL/dinput.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        grad_out: &[f64],
        param_grad: &mut [f64],
    ) -> Vec<f64> {
        assert_eq!(grad_out.len(), self.output_dim());
        assert_eq!(param_grad.len(), self.params.len());
        let mut delta = grad_out.to_vec();
        for l in (0..self.num_layers()).rev() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let off = self.layer_offset(l);
            if l + 1 < self.num_layers() {
                for (di, zi) in delta.iter_mut().zip(cache.pre_acts[l].iter()) {
                    if *zi <= 0.0 {
                        *di = 0.0;
                    }
                }
            }
            let input = &cache.inputs[l];
            let w = &self.params[off..off + n_out * n_in];
            let (wg, bg) = param_grad[off..off + n_out * n_in + n_out].split_at_mut(n_out * n_in);
            let mut grad_in = vec![0.0; n_in];
            for i in 0..n_out {
                bg[i] += delta[i];
                let row = &w[i * n_in..(i + 1) * n_in];
                let grow = &mut wg[i * n_in..(i + 1) * n_in];
                for j in 0..n_in {
                    grow[j] += delta[i] * input[j];
                    grad_in[j] += delta[i] * row[j];
                }
            }
            delta = grad_in;
        }
        delta
    }
}
