use serde::{Deserialize, Serialize};

use super::NnError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self { learning_rate: 1e-3, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

impl AdamConfig {
    pub fn with_lr(learning_rate: f64) -> Self {
        Self { learning_rate, ..Self::default() }
    }
}

/// Adam optimiser over a fixed list of parameter buffers.
///
/// Moment buffers are allocated on the first step to match the shapes
/// passed in; later steps must pass the same shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam<T> {
    pub config: AdamConfig,
    step: u64,
    first: Vec<Vec<T>>,
    second: Vec<Vec<T>>,
}

impl<T: Scalar> Adam<T> {
    pub fn new(config: AdamConfig) -> Self {
        Self { config, step: 0, first: Vec::new(), second: Vec::new() }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    pub fn step(&mut self, params: &mut [&mut [T]], grads: &[&[T]]) -> Result<(), NnError> {
        if params.len() != grads.len() || params.iter().zip(grads).any(|(p, g)| p.len() != g.len()) {
            return Err(NnError::ShapeMismatch);
        }
        if grads.iter().any(|g| g.iter().any(|v| !v.is_finite())) {
            return Err(NnError::NonFiniteGradient);
        }
        if self.first.is_empty() {
            self.first = grads.iter().map(|g| vec![T::zero(); g.len()]).collect();
            self.second = self.first.clone();
        } else if self.first.len() != grads.len() || self.first.iter().zip(grads).any(|(m, g)| m.len() != g.len()) {
            return Err(NnError::ShapeMismatch);
        }
        self.step += 1;
        let c = &self.config;
        let (b1, b2) = (T::lit(c.beta1), T::lit(c.beta2));
        let t = self.step as i32;
        let corr1 = T::one() - b1.powi(t);
        let corr2 = T::one() - b2.powi(t);
        let lr = T::lit(c.learning_rate);
        let eps = T::lit(c.epsilon);
        for (k, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            let (m, v) = (&mut self.first[k], &mut self.second[k]);
            for i in 0..g.len() {
                m[i] = b1 * m[i] + (T::one() - b1) * g[i];
                v[i] = b2 * v[i] + (T::one() - b2) * g[i] * g[i];
                let m_hat = m[i] / corr1;
                let v_hat = v[i] / corr2;
                p[i] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
        Ok(())
    }
}

/// Scales `grads` so their joint L2 norm is at most `max_norm`. Returns the
/// norm before scaling.
pub fn clip_global_norm<T: Scalar>(grads: &mut [&mut [T]], max_norm: T) -> T {
    let norm = grads.iter().flat_map(|g| g.iter()).map(|v| *v * *v).sum::<T>().sqrt();
    if norm > max_norm && norm.is_finite() {
        let scale = max_norm / norm;
        for g in grads.iter_mut() {
            for v in g.iter_mut() {
                *v *= scale;
            }
        }
    }
    norm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_closed_form() {
        let mut adam = Adam::<f64>::new(AdamConfig::with_lr(0.002));
        let mut p = vec![1.0, -2.0, 0.5];
        let g = vec![0.3, -4.0, 1e-3];
        adam.step(&mut [&mut p], &[&g]).unwrap();
        let start = [1.0, -2.0, 0.5];
        for i in 0..3 {
            let expected = start[i] - 0.002 * g[i] / (g[i].abs() + 1e-8);
            assert!((p[i] - expected).abs() < 1e-15, "{i}: {} vs {expected}", p[i]);
        }
    }

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut adam = Adam::<f32>::new(AdamConfig::default());
        let mut p = vec![0.25f32, -0.75];
        for _ in 0..20 {
            adam.step(&mut [&mut p], &[&[0.0, 0.0]]).unwrap();
        }
        assert_eq!(p, vec![0.25, -0.75]);
    }

    #[test]
    fn converges_on_quadratic_bowl() {
        // L = (x-3)² + 10 (y+1)², optimum 0.
        let loss = |p: &[f64]| (p[0] - 3.0).powi(2) + 10.0 * (p[1] + 1.0).powi(2);
        let mut adam = Adam::<f64>::new(AdamConfig::with_lr(0.1));
        let mut p = vec![0.0, 0.0];
        for _ in 0..100 {
            let g = vec![2.0 * (p[0] - 3.0), 20.0 * (p[1] + 1.0)];
            adam.step(&mut [&mut p], &[&g]).unwrap();
        }
        assert!(loss(&p) < 1e-3, "loss {}", loss(&p));
    }

    #[test]
    fn non_finite_gradient_is_rejected_without_update() {
        let mut adam = Adam::<f64>::new(AdamConfig::default());
        let mut p = vec![1.0];
        assert!(matches!(adam.step(&mut [&mut p], &[&[f64::NAN]]), Err(NnError::NonFiniteGradient)));
        assert_eq!(p, vec![1.0]);
        assert_eq!(adam.steps_taken(), 0);
    }

    #[test]
    fn clipping_rescales_to_max_norm() {
        let mut a = vec![3.0f64, 0.0];
        let mut b = vec![4.0];
        let n = clip_global_norm(&mut [&mut a, &mut b], 0.5);
        assert_eq!(n, 5.0);
        assert!((a[0] - 0.3).abs() < 1e-15 && (b[0] - 0.4).abs() < 1e-15);
    }
}
