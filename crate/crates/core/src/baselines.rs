//! Scripted baseline policies: a sense-and-go-serve heuristic, a KF-guided
//! random policy, and a pure random policy. All act on the observation
//! vector alone, so they can be swapped for the learned policy anywhere.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::env::{EnvAction, EnvState, ScenarioConfig};

/// A policy maps an observation (and randomness) to a raw action.
pub trait Policy {
    fn name(&self) -> &'static str;
    fn act(&mut self, state: &EnvState, rng: &mut ChaCha8Rng) -> EnvAction;
}

/// Sense-and-go-serve: fly straight toward the user with the largest age
/// (lowest index on ties), schedule only that user, and split power evenly
/// between the sensing beam and that user.
pub struct SenseAndGoServe {
    pub config: ScenarioConfig,
}

impl SenseAndGoServe {
    pub fn new(config: &ScenarioConfig) -> Self {
        Self { config: config.clone() }
    }

    fn stalest_user(state: &EnvState) -> usize {
        let k = state.num_users();
        let mut best = 0;
        for i in 1..k {
            if state.user_age(i) > state.user_age(best) {
                best = i;
            }
        }
        best
    }
}

impl Policy for SenseAndGoServe {
    fn name(&self) -> &'static str {
        "sags"
    }

    fn act(&mut self, state: &EnvState, _rng: &mut ChaCha8Rng) -> EnvAction {
        let k = state.num_users();
        let chosen = Self::stalest_user(state);
        let vstep = self.config.uav_vmax * self.config.dt;
        // Horizontal range to the chosen user, recovered from slant range.
        let slant = state.user_distance(chosen);
        let alt = self.config.uav_alt;
        let horiz = (slant * slant - alt * alt).max(0.0).sqrt();
        let speed = (horiz / vstep).min(1.0);
        let az = state.user_azimuth(chosen);
        let mut raw = vec![0.0; k + 3];
        raw[0] = speed * az.cos();
        raw[1] = speed * az.sin();
        // The chosen user's logit matches the fixed sensing logit so the
        // softmax splits power 0.5/0.5; everyone else sits at the floor.
        let match_raw = (self.config.target_logit / self.config.logit_scale).clamp(-1.0, 1.0);
        for i in 0..k {
            raw[2 + i] = if i == chosen { match_raw } else { -1.0 };
        }
        // Threshold halfway between the chosen logit and the floor.
        raw[k + 2] = (match_raw - 1.0) / 2.0;
        EnvAction { raw }
    }
}

/// KF-guided random policy: steer toward the filter's one-step position
/// prediction plus a uniform-in-disc offset and Gaussian jitter; user logits
/// are standard normal with a zero threshold.
pub struct KfGuidedRandom {
    pub config: ScenarioConfig,
    /// Std of the Gaussian waypoint jitter, meters.
    pub jitter_std: f64,
}

impl KfGuidedRandom {
    pub fn new(config: &ScenarioConfig) -> Self {
        Self { config: config.clone(), jitter_std: 5.0 }
    }
}

impl Policy for KfGuidedRandom {
    fn name(&self) -> &'static str {
        "kf-rand"
    }

    fn act(&mut self, state: &EnvState, rng: &mut ChaCha8Rng) -> EnvAction {
        let k = state.num_users();
        let dt = self.config.dt;
        let vstep = self.config.uav_vmax * dt;
        let mean = state.kf_mean();
        let predicted = [mean[0] + mean[2] * dt, mean[1] + mean[3] * dt];
        let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let radius = vstep * rng.gen_range(0.0f64..1.0).sqrt();
        let jx: f64 = StandardNormal.sample(rng);
        let jy: f64 = StandardNormal.sample(rng);
        let waypoint = [
            predicted[0] + radius * angle.cos() + self.jitter_std * jx,
            predicted[1] + radius * angle.sin() + self.jitter_std * jy,
        ];
        let uav = state.uav();
        let mut raw = vec![0.0; k + 3];
        raw[0] = ((waypoint[0] - uav[0]) / vstep).clamp(-1.0, 1.0);
        raw[1] = ((waypoint[1] - uav[1]) / vstep).clamp(-1.0, 1.0);
        for i in 0..k {
            let g: f64 = StandardNormal.sample(rng);
            raw[2 + i] = (g / self.config.logit_scale).clamp(-1.0, 1.0);
        }
        raw[k + 2] = 0.0;
        EnvAction { raw }
    }
}

/// Uniform random actions over the whole action cube.
pub struct UniformRandom {
    pub action_dim: usize,
}

impl UniformRandom {
    pub fn new(config: &ScenarioConfig) -> Self {
        Self { action_dim: config.action_dim() }
    }
}

impl Policy for UniformRandom {
    fn name(&self) -> &'static str {
        "random"
    }

    fn act(&mut self, _state: &EnvState, rng: &mut ChaCha8Rng) -> EnvAction {
        EnvAction { raw: (0..self.action_dim).map(|_| rng.gen_range(-1.0..1.0)).collect() }
    }
}

/// Builds a baseline by name.
pub fn by_name(name: &str, config: &ScenarioConfig) -> Option<Box<dyn Policy>> {
    match name {
        "sags" => Some(Box::new(SenseAndGoServe::new(config))),
        "kf-rand" => Some(Box::new(KfGuidedRandom::new(config))),
        "random" => Some(Box::new(UniformRandom::new(config))),
        _ => None,
    }
}
