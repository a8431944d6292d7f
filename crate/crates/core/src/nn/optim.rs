//! SGD and Adam over flat parameter slices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptKind {
    Sgd,
    Adam,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub kind: OptKind,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl OptimizerConfig {
    pub fn sgd(learning_rate: f64) -> Self {
        OptimizerConfig {
            kind: OptKind::Sgd,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    pub fn adam(learning_rate: f64) -> Self {
        OptimizerConfig {
            kind: OptKind::Adam,
            ..OptimizerConfig::sgd(learning_rate)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::invalid("learning rate must be positive"));
        }
        if !(self.beta1 > 0.0 && self.beta1 < 1.0 && self.beta2 > 0.0 && self.beta2 < 1.0) {
            return Err(Error::invalid("adam betas must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Owns the Adam moment state; parameters are updated in place through
/// ordered slice views so the same optimizer serves any model layout.
#[derive(Debug, Clone)]
pub struct Optimizer {
    cfg: OptimizerConfig,
    step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Optimizer {
    pub fn new(cfg: OptimizerConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Optimizer {
            cfg,
            step: 0,
            m: Vec::new(),
            v: Vec::new(),
        })
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.cfg
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    /// One update. `params` and `grads` must list the same slices in the
    /// same order with identical shapes on every call.
    pub fn step_slices(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]]) -> Result<()> {
        if params.len() != grads.len() {
            return Err(Error::shape("parameter/gradient group counts differ".into()));
        }
        let total: usize = params.iter().map(|p| p.len()).sum();
        let gtotal: usize = grads.iter().map(|g| g.len()).sum();
        if total != gtotal {
            return Err(Error::shape(format!(
                "parameter count {total} != gradient count {gtotal}"
            )));
        }
        match self.cfg.kind {
            OptKind::Sgd => {
                let lr = self.cfg.learning_rate;
                for (p, g) in params.iter_mut().zip(grads) {
                    if p.len() != g.len() {
                        return Err(Error::shape("parameter/gradient slice lengths differ".into()));
                    }
                    for (pi, gi) in p.iter_mut().zip(*g) {
                        *pi -= lr * gi;
                    }
                }
            }
            OptKind::Adam => {
                if self.m.is_empty() {
                    self.m = vec![0.0; total];
                    self.v = vec![0.0; total];
                } else if self.m.len() != total {
                    return Err(Error::shape(
                        "parameter count changed under an adam optimizer".into(),
                    ));
                }
                self.step += 1;
                let t = self.step as f64;
                let (b1, b2) = (self.cfg.beta1, self.cfg.beta2);
                let corr1 = 1.0 - b1.powf(t);
                let corr2 = 1.0 - b2.powf(t);
                let lr = self.cfg.learning_rate;
                let eps = self.cfg.epsilon;
                let mut off = 0;
                for (p, g) in params.iter_mut().zip(grads) {
                    if p.len() != g.len() {
                        return Err(Error::shape("parameter/gradient slice lengths differ".into()));
                    }
                    for (i, (pi, gi)) in p.iter_mut().zip(*g).enumerate() {
                        let m = &mut self.m[off + i];
                        let v = &mut self.v[off + i];
                        *m = b1 * *m + (1.0 - b1) * gi;
                        *v = b2 * *v + (1.0 - b2) * gi * gi;
                        let m_hat = *m / corr1;
                        let v_hat = *v / corr2;
                        *pi -= lr * m_hat / (v_hat.sqrt() + eps);
                    }
                    off += p.len();
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sgd_step() {
        let mut opt = Optimizer::new(OptimizerConfig::sgd(0.1)).unwrap();
        let mut p = vec![1.0];
        opt.step_slices(&mut [&mut p], &[&[2.0]]).unwrap();
        assert!((p[0] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn sgd_zero_gradient_is_identity() {
        let mut opt = Optimizer::new(OptimizerConfig::sgd(0.5)).unwrap();
        let mut p = vec![1.0, -2.0];
        opt.step_slices(&mut [&mut p], &[&[0.0, 0.0]]).unwrap();
        assert_eq!(p, vec![1.0, -2.0]);
    }

    #[test]
    fn adam_first_step_moves_by_about_lr() {
        // m_hat = g, v_hat = g^2 at step 1, so the step is lr * g/(|g|+eps).
        let mut opt = Optimizer::new(OptimizerConfig::adam(0.001)).unwrap();
        let mut p = vec![0.0];
        opt.step_slices(&mut [&mut p], &[&[1.0]]).unwrap();
        assert!((p[0] + 0.001).abs() < 1e-9);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let mut opt = Optimizer::new(OptimizerConfig::sgd(0.1)).unwrap();
        let mut p = vec![1.0];
        assert!(opt.step_slices(&mut [&mut p], &[&[1.0, 2.0]]).is_err());
    }

    #[test]
    fn invalid_config_is_rejected() {
        assert!(Optimizer::new(OptimizerConfig::sgd(0.0)).is_err());
        let mut cfg = OptimizerConfig::adam(0.1);
        cfg.beta1 = 1.0;
        assert!(Optimizer::new(cfg).is_err());
    }
}
