//! Versioned JSON checkpoints for the learner. A checkpoint captures every
//! piece of learner state except the replay buffer, so a restored agent emits
//! identical greedy actions and resumes optimization from the saved moments.

use std::fs;
use std::path::Path;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::ScenarioConfig;
use crate::error::{Error, Result};
use super::adam::Adam;
use super::mlp::Mlp;
use super::policy::GaussianPolicy;
use super::replay::ReplayBuffer;
use super::sac::{SacAgent, SacConfig, StateNormalizer};

const FORMAT: &str = "sac-checkpoint-v1";

/// Serializable learner snapshot.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub scenario: ScenarioConfig,
    pub config: SacConfig,
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
    pub env_steps: u64,
    pub rng: ChaCha8Rng,
}

impl Checkpoint {
    pub fn from_agent(agent: &SacAgent, scenario: &ScenarioConfig) -> Self {
        Self {
            format: FORMAT.to_string(),
            scenario: scenario.clone(),
            config: agent.config.clone(),
            policy: agent.policy.clone(),
            q1: agent.q1.clone(),
            q2: agent.q2.clone(),
            q1_target: agent.q1_target.clone(),
            q2_target: agent.q2_target.clone(),
            opt_policy: agent.opt_policy.clone(),
            opt_q1: agent.opt_q1.clone(),
            opt_q2: agent.opt_q2.clone(),
            opt_temp: agent.opt_temp.clone(),
            log_temp: agent.log_temp,
            target_entropy: agent.target_entropy,
            env_steps: agent.env_steps,
            rng: agent.rng.clone(),
        }
    }

    /// Rebuilds the agent with an empty replay buffer.
    pub fn into_agent(self) -> Result<SacAgent> {
        if self.format != FORMAT {
            return Err(Error::Contract(format!(
                "unsupported checkpoint format {:?}, expected {FORMAT:?}",
                self.format
            )));
        }
        let state_dim = self.scenario.state_dim();
        let action_dim = self.scenario.action_dim();
        if self.policy.net.input_dim() != state_dim
            || self.q1.input_dim() != state_dim + action_dim
        {
            return Err(Error::Contract(
                "checkpoint network shapes disagree with its scenario".into(),
            ));
        }
        Ok(SacAgent {
            normalizer: StateNormalizer::new(&self.scenario),
            state_dim,
            action_dim,
            buffer: ReplayBuffer::new(self.config.buffer_capacity),
            policy: self.policy,
            q1: self.q1,
            q2: self.q2,
            q1_target: self.q1_target,
            q2_target: self.q2_target,
            opt_policy: self.opt_policy,
            opt_q1: self.opt_q1,
            opt_q2: self.opt_q2,
            opt_temp: self.opt_temp,
            log_temp: self.log_temp,
            target_entropy: self.target_entropy,
            env_steps: self.env_steps,
            rng: self.rng,
            config: self.config,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string(self)?;
        fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingCheckpoint(path.to_path_buf()));
        }
        let json = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&json)?)
    }
}
