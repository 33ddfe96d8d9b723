//! Fixed-capacity FIFO replay buffer with uniform sampling.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::Transition;

/// Ring buffer of transitions; once full, the oldest entry is overwritten.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplayBuffer {
    capacity: usize,
    data: Vec<Transition>,
    next: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        Self { capacity, data: Vec::new(), next: 0 }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn push(&mut self, t: Transition) {
        if self.data.len() < self.capacity {
            self.data.push(t);
        } else {
            self.data[self.next] = t;
        }
        self.next = (self.next + 1) % self.capacity;
    }

    /// Uniform sample with replacement.
    pub fn sample<'a, R: Rng + ?Sized>(&'a self, batch: usize, rng: &mut R) -> Vec<&'a Transition> {
        assert!(!self.data.is_empty());
        (0..batch).map(|_| &self.data[rng.gen_range(0..self.data.len())]).collect()
    }
}
