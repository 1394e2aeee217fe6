//! Adam with Nesterov momentum.
//!
//! With `t` the step count after incrementing:
//!
//! ```text
//! m  = b1 m + (1 - b1) g
//! v  = b2 v + (1 - b2) g^2
//! m^ = b1 m / (1 - b1^(t+1)) + (1 - b1) g / (1 - b1^t)
//! v^ = v / (1 - b2^t)
//! p -= lr m^ / (sqrt(v^) + eps)
//! ```
//!
//! `b1` is held constant (no momentum warm-up schedule).

use super::network::{Gradients, Network};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NadamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for NadamConfig {
    fn default() -> Self {
        NadamConfig {
            learning_rate: 0.002,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nadam {
    pub config: NadamConfig,
    step: u64,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

impl Nadam {
    pub fn new(config: NadamConfig) -> Self {
        Nadam {
            config,
            step: 0,
            first: Vec::new(),
            second: Vec::new(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Applies one update to `params` (flat tensors) from matching `grads`.
    pub fn update_slices(&mut self, params: Vec<&mut [f64]>, grads: Vec<&[f64]>) {
        assert_eq!(
            params.len(),
            grads.len(),
            "parameter and gradient counts differ"
        );
        if self.first.is_empty() {
            self.first = params.iter().map(|p| vec![0.0; p.len()]).collect();
            self.second = self.first.clone();
        }
        self.step += 1;
        let NadamConfig {
            learning_rate: lr,
            beta1: b1,
            beta2: b2,
            epsilon: eps,
        } = self.config;
        let t = self.step as i32;
        let m_corr = b1 / (1.0 - b1.powi(t + 1));
        let g_corr = (1.0 - b1) / (1.0 - b1.powi(t));
        let v_corr = 1.0 / (1.0 - b2.powi(t));
        for (k, (p, g)) in params.into_iter().zip(grads).enumerate() {
            let (m, v) = (&mut self.first[k], &mut self.second[k]);
            assert_eq!(p.len(), g.len(), "moment shape mismatch at tensor {k}");
            assert_eq!(p.len(), m.len(), "moment shape mismatch at tensor {k}");
            for i in 0..p.len() {
                let gi = g[i];
                m[i] = b1 * m[i] + (1.0 - b1) * gi;
                v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
                let m_hat = m_corr * m[i] + g_corr * gi;
                let v_hat = v_corr * v[i];
                p[i] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
    }

    pub fn update(&mut self, net: &mut Network, grads: &Gradients) {
        self.update_slices(net.params_mut(), grads.slices());
    }
}
