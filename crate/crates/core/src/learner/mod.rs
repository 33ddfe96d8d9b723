//! From-scratch Soft Actor-Critic: feed-forward networks with analytic
//! gradients, Adam, a squashed-Gaussian actor, uniform replay, the SAC update
//! rule with automatic temperature tuning, and JSON checkpoints.

pub mod adam;
pub mod checkpoint;
pub mod mlp;
pub mod policy;
pub mod replay;
pub mod sac;

pub use adam::Adam;
pub use checkpoint::Checkpoint;
pub use mlp::Mlp;
pub use policy::GaussianPolicy;
pub use replay::ReplayBuffer;
pub use sac::{train, train_episode, SacAgent, SacConfig, StateNormalizer, TrainReport, UpdateStats};
