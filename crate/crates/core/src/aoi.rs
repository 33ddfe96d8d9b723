//! Generation-time bookkeeping and per-user Age-of-Information recursion.
//!
//! `generation_slot` tracks when the freshest target-state update was sensed;
//! each user's age counts slots since the freshest update it decoded. The
//! decode reset uses the generation slot of the *previous* slot, so a sensing
//! success in the same slot never yields age zero.

use serde::{Deserialize, Serialize};

/// Ages and generation bookkeeping at the end of a slot.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AoiState {
    /// Slot of the freshest sensed update, g[n].
    pub generation_slot: u32,
    /// Per-user ages Δ_k[n], each ≥ 1.
    pub ages: Vec<u32>,
    /// Current slot index n (1-based).
    pub slot: u32,
}

impl AoiState {
    /// Slot-1 initial condition: g[1] = 1, Δ_k[1] = 1.
    pub fn initial(num_users: usize) -> Self {
        Self { generation_slot: 1, ages: vec![1; num_users], slot: 1 }
    }

    /// Advances to the next slot given this slot's sensing and decode
    /// outcomes. The decode reset reads the previous generation slot before
    /// the generation update is applied.
    pub fn step(&self, sensing_ok: bool, decode_ok: &[bool]) -> AoiState {
        assert_eq!(decode_ok.len(), self.ages.len());
        let n = self.slot + 1;
        let g_prev = self.generation_slot;
        let ages = self
            .ages
            .iter()
            .zip(decode_ok.iter())
            .map(|(&age, &ok)| if ok { n - g_prev } else { age + 1 })
            .collect();
        AoiState {
            generation_slot: if sensing_ok { n } else { g_prev },
            ages,
            slot: n,
        }
    }

    /// Mean age (1/K)·ΣΔ_k over users.
    pub fn average_age(&self) -> f64 {
        self.ages.iter().map(|&a| a as f64).sum::<f64>() / self.ages.len() as f64
    }
}
