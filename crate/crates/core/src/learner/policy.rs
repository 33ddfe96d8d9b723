//! Squashed-Gaussian actor: an MLP emits per-dimension mean and log-std, the
//! action is `tanh(μ + σζ)` with ζ standard normal, and the log-density
//! includes the tanh change-of-variables correction. Gradients through the
//! reparameterized sample are analytic.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::mlp::{ForwardCache, Mlp};

const LOG_STD_MIN: f64 = -20.0;
const LOG_STD_MAX: f64 = 2.0;
const SQUASH_EPS: f64 = 1e-6;
const LN_2PI: f64 = 1.8378770664093453;

/// Stochastic policy with network output `[μ_1..μ_A, t_1..t_A]` and
/// `σ = exp(clamp(t))`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianPolicy {
    pub net: Mlp,
    pub action_dim: usize,
}

/// Everything needed to differentiate one sampled action.
#[derive(Debug, Clone)]
pub struct PolicyEval {
    pub action: Vec<f64>,
    pub log_prob: f64,
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub zeta: Vec<f64>,
    /// Clamp pass-through indicator for each log-std output.
    active: Vec<bool>,
    cache: ForwardCache,
}

impl GaussianPolicy {
    pub fn new<R: Rng + ?Sized>(state_dim: usize, action_dim: usize, hidden: &[usize], rng: &mut R) -> Self {
        let mut sizes = vec![state_dim];
        sizes.extend_from_slice(hidden);
        sizes.push(2 * action_dim);
        Self { net: Mlp::new(&sizes, rng), action_dim }
    }

    /// Reparameterized sample with caller-supplied noise.
    pub fn eval(&self, state: &[f64], zeta: &[f64]) -> PolicyEval {
        assert_eq!(zeta.len(), self.action_dim);
        let (out, cache) = self.net.forward(state);
        let a = self.action_dim;
        let mu = out[..a].to_vec();
        let mut sigma = Vec::with_capacity(a);
        let mut active = Vec::with_capacity(a);
        for &t in &out[a..] {
            active.push(t > LOG_STD_MIN && t < LOG_STD_MAX);
            sigma.push(t.clamp(LOG_STD_MIN, LOG_STD_MAX).exp());
        }
        let mut action = Vec::with_capacity(a);
        let mut log_prob = 0.0;
        for i in 0..a {
            let u = mu[i] + sigma[i] * zeta[i];
            let ai = u.tanh();
            action.push(ai);
            log_prob += -0.5 * zeta[i] * zeta[i] - 0.5 * LN_2PI - sigma[i].ln()
                - (1.0 - ai * ai + SQUASH_EPS).ln();
        }
        PolicyEval { action, log_prob, mu, sigma, zeta: zeta.to_vec(), active, cache }
    }

    /// Samples noise from `rng` and evaluates.
    pub fn sample<R: Rng + ?Sized>(&self, state: &[f64], rng: &mut R) -> PolicyEval {
        let zeta: Vec<f64> = (0..self.action_dim).map(|_| StandardNormal.sample(rng)).collect();
        self.eval(state, &zeta)
    }

    /// Deterministic action `tanh(μ)`.
    pub fn mean_action(&self, state: &[f64]) -> Vec<f64> {
        let out = self.net.infer(state);
        out[..self.action_dim].iter().map(|m| m.tanh()).collect()
    }

    /// Accumulates dL/dparams for a loss with partials `d_action` (per action
    /// coordinate) and `d_log_prob` (scalar on the log-density).
    pub fn backward(&self, eval: &PolicyEval, d_action: &[f64], d_log_prob: f64, param_grad: &mut [f64]) {
        let a = self.action_dim;
        assert_eq!(d_action.len(), a);
        let mut grad_out = vec![0.0; 2 * a];
        for i in 0..a {
            let ai = eval.action[i];
            let one_m = 1.0 - ai * ai;
            let denom = one_m + SQUASH_EPS;
            let dlogp_dmu = 2.0 * ai * one_m / denom;
            let da_dmu = one_m;
            grad_out[i] = d_action[i] * da_dmu + d_log_prob * dlogp_dmu;
            if eval.active[i] {
                let dsigma_dt = eval.sigma[i];
                let da_dt = one_m * eval.zeta[i] * dsigma_dt;
                let dlogp_dt = dsigma_dt * (-1.0 / eval.sigma[i] + 2.0 * ai * one_m * eval.zeta[i] / denom);
                grad_out[a + i] = d_action[i] * da_dt + d_log_prob * dlogp_dt;
            }
        }
        self.net.backward(&eval.cache, &grad_out, param_grad);
    }
}
