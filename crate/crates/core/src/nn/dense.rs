//! Dense affine layer `y = act(Wx + b)`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::Tensor2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Identity => z,
        }
    }

    /// Derivative expressed in terms of the activation output.
    #[inline]
    pub fn grad_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

/// Weights are `out_dim x in_dim`, bias has length `out_dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub weights: Tensor2,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    pub fn zeros(out_dim: usize, in_dim: usize) -> Self {
        DenseLayer {
            weights: Tensor2::zeros(out_dim, in_dim),
            bias: vec![0.0; out_dim],
        }
    }

    /// He-style uniform init, zero bias.
    pub fn init_uniform(out_dim: usize, in_dim: usize, rng: &mut ChaCha8Rng) -> Self {
        let limit = (6.0 / in_dim as f64).sqrt();
        let mut layer = DenseLayer::zeros(out_dim, in_dim);
        for w in layer.weights.data_mut() {
            *w = rng.random_range(-limit..limit);
        }
        layer
    }

    #[inline]
    pub fn out_dim(&self) -> usize {
        self.weights.rows()
    }

    #[inline]
    pub fn in_dim(&self) -> usize {
        self.weights.cols()
    }
}

/// `act(Wx + b)`.
pub fn dense_forward(x: &[f64], layer: &DenseLayer, act: Activation) -> Result<Vec<f64>> {
    let (out, _) = dense_forward_cached(x, layer, act)?;
    Ok(out)
}

/// Forward pass that also returns the pre-activation vector needed by
/// [`dense_backward`].
pub fn dense_forward_cached(
    x: &[f64],
    layer: &DenseLayer,
    act: Activation,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() != layer.in_dim() {
        return Err(Error::shape(format!(
            "dense input has length {}, layer expects {}",
            x.len(),
            layer.in_dim()
        )));
    }
    let mut pre = Vec::with_capacity(layer.out_dim());
    for o in 0..layer.out_dim() {
        let row = layer.weights.row(o);
        let mut sum = layer.bias[o];
        for (w, xi) in row.iter().zip(x) {
            sum = w.mul_add(*xi, sum);
        }
        pre.push(sum);
    }
    let out = pre.iter().map(|&z| act.apply(z)).collect();
    Ok((out, pre))
}

/// Gradient of a dense layer, same shapes as the layer itself.
#[derive(Debug, Clone)]
pub struct DenseGrad {
    pub weights: Tensor2,
    pub bias: Vec<f64>,
}

impl DenseGrad {
    pub fn zeros_like(layer: &DenseLayer) -> Self {
        DenseGrad {
            weights: Tensor2::zeros(layer.out_dim(), layer.in_dim()),
            bias: vec![0.0; layer.out_dim()],
        }
    }
}

/// Accumulates parameter gradients into `grad` and returns dL/dx.
///
/// `pre` is the pre-activation cache from [`dense_forward_cached`];
/// `d_out` is dL/d(activation output).
pub fn dense_backward(
    x: &[f64],
    pre: &[f64],
    d_out: &[f64],
    layer: &DenseLayer,
    act: Activation,
    grad: &mut DenseGrad,
) -> Vec<f64> {
    debug_assert_eq!(x.len(), layer.in_dim());
    debug_assert_eq!(d_out.len(), layer.out_dim());
    let mut dx = vec![0.0; layer.in_dim()];
    for o in 0..layer.out_dim() {
        let dz = d_out[o] * act.grad_from_output(act.apply(pre[o]));
        if dz == 0.0 {
            continue;
        }
        grad.bias[o] += dz;
        let grow = grad.weights.row_mut(o);
        for (g, xi) in grow.iter_mut().zip(x) {
            *g = dz.mul_add(*xi, *g);
        }
        let wrow = layer.weights.row(o);
        for (d, w) in dx.iter_mut().zip(wrow) {
            *d = dz.mul_add(*w, *d);
        }
    }
    dx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer(rows: Vec<Vec<f64>>, bias: Vec<f64>) -> DenseLayer {
        DenseLayer {
            weights: Tensor2::from_rows(rows).unwrap(),
            bias,
        }
    }

    #[test]
    fn identity_weights_pass_through() {
        let l = layer(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0]);
        let y = dense_forward(&[1.0, 2.0], &l, Activation::Relu).unwrap();
        assert_eq!(y, vec![1.0, 2.0]);
    }

    #[test]
    fn relu_clamps_negative_sum() {
        let l = layer(vec![vec![1.0, 1.0]], vec![0.0]);
        let y = dense_forward(&[1.0, -3.0], &l, Activation::Relu).unwrap();
        assert_eq!(y, vec![0.0]);
    }

    #[test]
    fn hand_checked_affine() {
        // [2 2; -1 1] * [0.5, 0.5] + [1, 0] = [3, 0]
        let l = layer(vec![vec![2.0, 2.0], vec![-1.0, 1.0]], vec![1.0, 0.0]);
        let y = dense_forward(&[0.5, 0.5], &l, Activation::Identity).unwrap();
        assert_eq!(y, vec![3.0, 0.0]);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let l = layer(vec![vec![1.0, 0.0]], vec![0.0]);
        assert!(dense_forward(&[1.0], &l, Activation::Identity).is_err());
    }
}
