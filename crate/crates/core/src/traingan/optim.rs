use serde::{Deserialize, Serialize};

use super::mlp::{Gradients, Mlp};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", deny_unknown_fields)]
pub enum OptimizerConfig {
    Sgd,
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self::Adam { beta1: 0.5, beta2: 0.999, eps: 1e-8 }
    }
}

/// Gradient-ascent optimizer state for one network.
#[derive(Clone, Debug)]
pub struct Optimizer<T> {
    cfg: OptimizerConfig,
    step: i32,
    m: Vec<T>,
    v: Vec<T>,
}

impl<T: Scalar> Optimizer<T> {
    pub fn new(cfg: OptimizerConfig, net: &Mlp<T>) -> Self {
        let n = match cfg {
            OptimizerConfig::Sgd => 0,
            OptimizerConfig::Adam { .. } => net.param_count(),
        };
        Self { cfg, step: 0, m: vec![T::zero(); n], v: vec![T::zero(); n] }
    }

    /// Moves `net` along `+grads` (ascent).
    pub fn ascend(&mut self, net: &mut Mlp<T>, grads: &Gradients<T>, lr: T) {
        self.step += 1;
        match self.cfg {
            OptimizerConfig::Sgd => {
                for (l, g) in net.layers_mut().iter_mut().zip(&grads.layers) {
                    l.w.scaled_add(lr, &g.w);
                    l.b.scaled_add(lr, &g.b);
                }
            }
            OptimizerConfig::Adam { beta1, beta2, eps } => {
                let (b1, b2, eps) = (T::lit(beta1), T::lit(beta2), T::lit(eps));
                let c1 = T::one() - b1.powi(self.step);
                let c2 = T::one() - b2.powi(self.step);
                let step_size = lr / c1;
                let c2_sqrt = c2.sqrt();
                let mut offset = 0;
                for (l, g) in net.layers_mut().iter_mut().zip(&grads.layers) {
                    for (mut p, gr) in [
                        (l.w.view_mut().into_dyn(), g.w.view().into_dyn()),
                        (l.b.view_mut().into_dyn(), g.b.view().into_dyn()),
                    ] {
                        let n = p.len();
                        let m = &mut self.m[offset..offset + n];
                        let v = &mut self.v[offset..offset + n];
                        for (((pi, &gi), mi), vi) in p.iter_mut().zip(gr.iter()).zip(m.iter_mut()).zip(v.iter_mut()) {
                            *mi = b1 * *mi + (T::one() - b1) * gi;
                            *vi = b2 * *vi + (T::one() - b2) * gi * gi;
                            *pi += step_size * *mi / (vi.sqrt() / c2_sqrt + eps);
                        }
                        offset += n;
                    }
                }
            }
        }
    }
}
