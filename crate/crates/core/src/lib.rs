//! Core library for a discrete-time UAV integrated sensing and communication
//! (ISAC) simulator with an Age-of-Information (AoI) objective.
//!
//! A single UAV carrying a uniform planar array tracks a moving ground target
//! by radar while serving ground users over a beamformed downlink. The crate
//! provides:
//!
//! - array geometry and steering-vector synthesis ([`array`]);
//! - free-space link budgets, multi-user SINR, the radar equation, and the
//!   SNR-gated measurement model ([`link`]);
//! - a constant-velocity Kalman filter for target tracking ([`tracking`]);
//! - per-user AoI bookkeeping ([`aoi`]);
//! - logit-driven beam scheduling, softmax power splitting, and regularized
//!   zero-forcing direction synthesis ([`beam`]);
//! - the finite-horizon MDP environment tying all of the above together
//!   ([`env`]);
//! - a self-contained Soft Actor-Critic learner with hand-rolled gradients
//!   ([`learner`]);
//! - scripted baseline policies ([`baselines`]) and a seeded Monte-Carlo
//!   evaluation harness with CSV output ([`harness`]).

pub mod aoi;
pub mod array;
pub mod baselines;
pub mod beam;
pub mod constants;
pub mod env;
pub mod error;
pub mod harness;
pub mod learner;
pub mod link;
pub mod tracking;

pub use aoi::AoiState;
pub use array::{Aod, ArrayConfig, SteeringVector};
pub use beam::BeamPlan;
pub use env::{EnvAction, EnvState, Environment, ScenarioConfig, Transition};
pub use error::{Error, Result};
pub use link::{ChannelVector, LinkBudget, RadarBudget};
pub use tracking::{KfModel, KfState};
