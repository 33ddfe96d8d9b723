//! Soft Actor-Critic with twin critics, target networks, and automatic
//! temperature tuning, built on the hand-rolled MLP and Adam in this module.
//!
//! The agent normalizes raw observations with a fixed, config-derived scaling
//! before feeding any network; the environment state itself is untouched.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::env::{EnvAction, EnvState, ScenarioConfig, Transition};
use super::adam::Adam;
use super::mlp::Mlp;
use super::policy::GaussianPolicy;
use super::replay::ReplayBuffer;

/// Learner hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SacConfig {
    pub hidden: Vec<usize>,
    pub lr: f64,
    pub gamma: f64,
    /// Soft-update coefficient η_s: target ← η_s·online + (1-η_s)·target.
    pub tau: f64,
    pub batch: usize,
    pub buffer_capacity: usize,
    pub init_temp: f64,
    /// Entropy target; `None` uses -(action dim).
    pub target_entropy: Option<f64>,
    /// Environment steps driven by uniform random actions before learning.
    pub warmup_steps: usize,
    /// Gradient steps per environment step once past warmup.
    pub grad_steps: usize,
}

impl Default for SacConfig {
    fn default() -> Self {
        Self {
            hidden: vec![256, 256],
            lr: 3e-4,
            gamma: 0.99,
            tau: 0.01,
            batch: 256,
            buffer_capacity: 1_000_000,
            init_temp: 0.2,
            target_entropy: None,
            warmup_steps: 1000,
            grad_steps: 1,
        }
    }
}

/// Fixed observation scaling derived from the scenario. Positions map to the
/// unit arena, angles to [-1, 1], ages to the horizon, and the heavy-tailed
/// linear SINR/SNR entries are log-compressed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateNormalizer {
    num_users: usize,
    arena: f64,
    horizon: f64,
    vel_scale: f64,
}

impl StateNormalizer {
    pub fn new(config: &ScenarioConfig) -> Self {
        Self {
            num_users: config.num_users,
            arena: config.arena_side,
            horizon: config.horizon as f64,
            vel_scale: config.target_vmax.max(1.0),
        }
    }

    fn log1p_scaled(x: f64) -> f64 {
        (1.0 + x.max(0.0)).ln() / 10.0
    }

    pub fn normalize(&self, raw: &[f64]) -> Vec<f64> {
        let k = self.num_users;
        assert_eq!(raw.len(), 5 * k + 14);
        let mut v = Vec::with_capacity(raw.len());
        v.push(raw[0] / self.arena);
        v.push(raw[1] / self.arena);
        for i in 0..k {
            let b = 2 + 5 * i;
            v.push(raw[b] / self.arena);
            v.push(raw[b + 1] / std::f64::consts::PI);
            v.push(raw[b + 2] / std::f64::consts::FRAC_PI_2);
            v.push(Self::log1p_scaled(raw[b + 3]));
            v.push(raw[b + 4] / self.horizon);
        }
        let t = 2 + 5 * k;
        v.push(raw[t] / self.arena);
        v.push(raw[t + 1] / self.arena);
        v.push(raw[t + 2] / self.vel_scale);
        v.push(raw[t + 3] / self.vel_scale);
        v.push(Self::log1p_scaled(raw[t + 4]));
        for i in 0..4 {
            v.push((1.0 + raw[t + 5 + i].max(0.0)).ln() / 5.0);
        }
        v.push((1.0 + raw[t + 9].max(0.0)).ln() / 5.0);
        v.push(raw[t + 10] / self.horizon);
        v.push(raw[t + 11]);
        v
    }
}

/// Diagnostics from one gradient step.
#[derive(Debug, Clone, Default)]
pub struct UpdateStats {
    pub critic_loss: f64,
    pub actor_loss: f64,
    pub temp_loss: f64,
    pub temperature: f64,
    pub mean_q: f64,
}

/// TD target `r + γ(1-done)(min_j Q̄_j - κ logπ)`.
pub fn td_target(reward: f64, done: bool, q_min: f64, log_prob: f64, temp: f64, gamma: f64) -> f64 {
    if done {
        reward
    } else {
        reward + gamma * (q_min - temp * log_prob)
    }
}

/// Analytic gradient of the temperature loss `mean[exp(λ)(-logπ - H̄)]` with
/// respect to λ.
pub fn temperature_grad(log_temp: f64, log_probs: &[f64], target_entropy: f64) -> f64 {
    let mean: f64 = log_probs.iter().map(|&lp| -lp - target_entropy).sum::<f64>()
        / log_probs.len() as f64;
    log_temp.exp() * mean
}

fn soft_update(target: &mut Mlp, online: &Mlp, tau: f64) {
    for (t, o) in target.params.iter_mut().zip(online.params.iter()) {
        *t = tau * o + (1.0 - tau) * *t;
    }
}

/// The complete learner: actor, twin critics with targets, optimizers,
/// temperature, replay buffer, and RNG.
#[derive(Debug, Clone)]
pub struct SacAgent {
    pub config: SacConfig,
    pub normalizer: StateNormalizer,
    pub state_dim: usize,
    pub action_dim: usize,
    pub policy: GaussianPolicy,
    pub q1: Mlp,
    pub q2: Mlp,
    pub q1_target: Mlp,
    pub q2_target: Mlp,
    pub opt_policy: Adam,
    pub opt_q1: Adam,
    pub opt_q2: Adam,
    pub opt_temp: Adam,
    pub log_temp: f64,
    pub target_entropy: f64,
    pub buffer: ReplayBuffer,
    pub rng: ChaCha8Rng,
    pub env_steps: u64,
}

impl SacAgent {
    pub fn new(scenario: &ScenarioConfig, config: &SacConfig, seed: u64) -> Self {
        let state_dim = scenario.state_dim();
        let action_dim = scenario.action_dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut critic_sizes = vec![state_dim + action_dim];
        critic_sizes.extend_from_slice(&config.hidden);
        critic_sizes.push(1);
        let policy = GaussianPolicy::new(state_dim, action_dim, &config.hidden, &mut rng);
        let q1 = Mlp::new(&critic_sizes, &mut rng);
        let q2 = Mlp::new(&critic_sizes, &mut rng);
        let q1_target = q1.clone();
        let q2_target = q2.clone();
        Self {
            normalizer: StateNormalizer::new(scenario),
            state_dim,
            action_dim,
            opt_policy: Adam::new(policy.net.params.len(), config.lr),
            opt_q1: Adam::new(q1.params.len(), config.lr),
            opt_q2: Adam::new(q2.params.len(), config.lr),
            opt_temp: Adam::new(1, config.lr),
            policy,
            q1,
            q2,
            q1_target,
            q2_target,
            log_temp: config.init_temp.ln(),
            target_entropy: config.target_entropy.unwrap_or(-(action_dim as f64)),
            buffer: ReplayBuffer::new(config.buffer_capacity),
            rng,
            env_steps: 0,
            config: config.clone(),
        }
    }

    pub fn temperature(&self) -> f64 {
        self.log_temp.exp()
    }

    /// Exploration action: uniform during warmup, sampled from the policy
    /// afterwards.
    pub fn act_explore(&mut self, state: &EnvState) -> EnvAction {
        if (self.env_steps as usize) < self.config.warmup_steps {
            let raw = (0..self.action_dim).map(|_| self.rng.gen_range(-1.0..1.0)).collect();
            return EnvAction { raw };
        }
        let s = self.normalizer.normalize(&state.vector);
        EnvAction { raw: self.policy.sample(&s, &mut self.rng).action }
    }

    /// Deterministic evaluation action tanh(μ).
    pub fn act_greedy(&self, state: &EnvState) -> EnvAction {
        let s = self.normalizer.normalize(&state.vector);
        EnvAction { raw: self.policy.mean_action(&s) }
    }

    /// Stores a transition and counts the environment step.
    pub fn record(&mut self, transition: Transition) {
        self.buffer.push(transition);
        self.env_steps += 1;
    }

    /// Runs the configured gradient steps if enough data has accumulated.
    pub fn maybe_update(&mut self) -> Option<UpdateStats> {
        if self.buffer.len() < self.config.batch
            || (self.env_steps as usize) < self.config.warmup_steps
        {
            return None;
        }
        let mut stats = UpdateStats::default();
        for _ in 0..self.config.grad_steps {
            stats = self.update();
        }
        Some(stats)
    }

    /// One SAC gradient step on a fresh uniform batch: critic regression to
    /// the entropy-regularized TD target, reparameterized actor step against
    /// the first critic, temperature step, soft target update.
    pub fn update(&mut self) -> UpdateStats {
        let batch: Vec<Transition> =
            self.buffer.sample(self.config.batch, &mut self.rng).into_iter().cloned().collect();
        let b = batch.len() as f64;
        let temp = self.temperature();
        let gamma = self.config.gamma;

        let targets: Vec<f64> = batch
            .iter()
            .map(|tr| {
                let ns = self.normalizer.normalize(&tr.next_state);
                let e = self.policy.sample(&ns, &mut self.rng);
                let sa = concat(&ns, &e.action);
                let q_min = self.q1_target.infer(&sa)[0].min(self.q2_target.infer(&sa)[0]);
                td_target(tr.reward, tr.done, q_min, e.log_prob, temp, gamma)
            })
            .collect();

        let mut critic_loss = 0.0;
        let mut mean_q = 0.0;
        for pick in 0..2 {
            let (net, opt) = if pick == 0 {
                (&mut self.q1, &mut self.opt_q1)
            } else {
                (&mut self.q2, &mut self.opt_q2)
            };
            let mut grad = vec![0.0; net.params.len()];
            for (tr, &y) in batch.iter().zip(targets.iter()) {
                let s = self.normalizer.normalize(&tr.state);
                let sa = concat(&s, &tr.action);
                let (out, cache) = net.forward(&sa);
                let err = out[0] - y;
                critic_loss += 0.5 * err * err / b;
                if pick == 0 {
                    mean_q += out[0] / b;
                }
                net.backward(&cache, &[err / b], &mut grad);
            }
            opt.step(&mut net.params, &grad);
        }

        let mut pgrad = vec![0.0; self.policy.net.params.len()];
        let mut scratch = vec![0.0; self.q1.params.len()];
        let mut actor_loss = 0.0;
        let mut log_probs = Vec::with_capacity(batch.len());
        for tr in &batch {
            let s = self.normalizer.normalize(&tr.state);
            let e = self.policy.sample(&s, &mut self.rng);
            let sa = concat(&s, &e.action);
            let (qout, qcache) = self.q1.forward(&sa);
            let grad_in = self.q1.backward(&qcache, &[1.0], &mut scratch);
            let d_action: Vec<f64> =
                grad_in[self.state_dim..].iter().map(|g| -g / b).collect();
            self.policy.backward(&e, &d_action, temp / b, &mut pgrad);
            actor_loss += (temp * e.log_prob - qout[0]) / b;
            log_probs.push(e.log_prob);
        }
        self.opt_policy.step(&mut self.policy.net.params, &pgrad);

        let tgrad = temperature_grad(self.log_temp, &log_probs, self.target_entropy);
        let temp_loss = self.temperature()
            * (log_probs.iter().map(|&lp| -lp - self.target_entropy).sum::<f64>() / b);
        let mut lt = [self.log_temp];
        self.opt_temp.step(&mut lt, &[tgrad]);
        self.log_temp = lt[0];

        soft_update(&mut self.q1_target, &self.q1, self.config.tau);
        soft_update(&mut self.q2_target, &self.q2, self.config.tau);

        UpdateStats { critic_loss, actor_loss, temp_loss, temperature: self.temperature(), mean_q }
    }
}

fn concat(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(a.len() + b.len());
    v.extend_from_slice(a);
    v.extend_from_slice(b);
    v
}

/// Per-episode training summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainReport {
    pub episode_returns: Vec<f64>,
}

/// Runs `episodes` training episodes. Episode e resets the environment with
/// seed `env_seed_base + e`, so training layouts are reproducible and
/// disjoint from any evaluation seed range by choice of base.
pub fn train(
    scenario: &ScenarioConfig,
    config: &SacConfig,
    episodes: u32,
    agent_seed: u64,
    env_seed_base: u64,
) -> (SacAgent, TrainReport) {
    let mut agent = SacAgent::new(scenario, config, agent_seed);
    let mut returns = Vec::with_capacity(episodes as usize);
    for e in 0..episodes {
        returns.push(train_episode(scenario, &mut agent, env_seed_base + e as u64));
    }
    (agent, TrainReport { episode_returns: returns })
}

/// One training episode; returns the undiscounted return.
pub fn train_episode(scenario: &ScenarioConfig, agent: &mut SacAgent, env_seed: u64) -> f64 {
    let mut env = crate::env::Environment::reset(scenario, env_seed);
    let mut state = env.state();
    let mut ep_return = 0.0;
    loop {
        let action = agent.act_explore(&state);
        let (next, reward, done) = env.step(&action).expect("episode still live");
        ep_return += reward;
        agent.record(Transition {
            state: state.vector.clone(),
            action: action.raw.clone(),
            reward,
            next_state: next.vector.clone(),
            done,
        });
        agent.maybe_update();
        state = next;
        if done {
            break;
        }
    }
    ep_return
}
