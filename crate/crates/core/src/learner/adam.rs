//! Adam optimizer over a flat parameter vector, with bias-corrected moment
//! estimates.

use serde::{Deserialize, Serialize};

/// Adam state for one parameter vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub t: u64,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

impl Adam {
    pub fn new(dim: usize, lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: vec![0.0; dim],
            v: vec![0.0; dim],
        }
    }

    /// One descent step in place.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grad.len(), self.m.len());
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn first_step_moves_by_almost_lr() {
        // With bias correction, the first step is lr·g/(|g| + eps·√(1-β2)/…),
        // i.e. essentially lr·sign(g).
        let mut opt = Adam::new(1, 1e-3);
        let mut p = vec![0.5];
        opt.step(&mut p, &[4.0]);
        assert_relative_eq!(p[0], 0.5 - 1e-3, epsilon = 1e-8);
        let mut p2 = vec![0.5];
        let mut opt2 = Adam::new(1, 1e-3);
        opt2.step(&mut p2, &[-0.01]);
        assert_relative_eq!(p2[0], 0.5 + 1e-3, epsilon = 1e-6);
    }

    #[test]
    fn matches_independent_reference_loop() {
        // Straight transcription of the update equations, kept separate from
        // the implementation under test.
        let grads = [[0.3, -1.2], [0.1, 0.4], [-0.7, 0.9], [0.05, -0.2]];
        let lr = 0.01;
        let (b1, b2, eps): (f64, f64, f64) = (0.9, 0.999, 1e-8);
        let mut ref_p = [1.0, -2.0];
        let mut m = [0.0; 2];
        let mut v = [0.0; 2];
        for (t, g) in grads.iter().enumerate() {
            let t = (t + 1) as i32;
            for i in 0..2 {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                let mh = m[i] / (1.0 - b1.powi(t));
                let vh = v[i] / (1.0 - b2.powi(t));
                ref_p[i] -= lr * mh / (vh.sqrt() + eps);
            }
        }
        let mut opt = Adam::new(2, lr);
        let mut p = vec![1.0, -2.0];
        for g in &grads {
            opt.step(&mut p, g);
        }
        assert_relative_eq!(p[0], ref_p[0], epsilon = 1e-14);
        assert_relative_eq!(p[1], ref_p[1], epsilon = 1e-14);
    }

    #[test]
    fn converges_on_quadratic() {
        // min (p - 3)²: gradient descent with Adam should land near 3.
        let mut opt = Adam::new(1, 0.05);
        let mut p = vec![0.0];
        for _ in 0..2000 {
            let g = 2.0 * (p[0] - 3.0);
            opt.step(&mut p, &[g]);
        }
        assert!((p[0] - 3.0).abs() < 1e-3, "p = {}", p[0]);
    }
}
