//! 1-D convolution over a token sequence, plus pooling.
//!
//! Convolutions use "same" zero padding: a window of size `w` is padded
//! with `(w-1)/2` zero vectors on the left and `w/2` on the right, so a
//! length-`n` input always yields `n` output positions, even for n = 1.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::Tensor2;

/// A bank of `num_filters` filters, each a linear map over `window`
/// consecutive input rows followed by relu.
///
/// `weights` is `num_filters x (window * in_dim)`; filter `f` applied at
/// position `t` reads rows `t - (window-1)/2 ..= t + window/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvFilterBank {
    pub window: usize,
    pub num_filters: usize,
    pub weights: Tensor2,
    pub bias: Vec<f64>,
}

impl ConvFilterBank {
    pub fn zeros(window: usize, num_filters: usize, in_dim: usize) -> Self {
        ConvFilterBank {
            window,
            num_filters,
            weights: Tensor2::zeros(num_filters, window * in_dim),
            bias: vec![0.0; num_filters],
        }
    }

    pub fn init_uniform(
        window: usize,
        num_filters: usize,
        in_dim: usize,
        rng: &mut ChaCha8Rng,
    ) -> Self {
        let limit = (6.0 / (window * in_dim) as f64).sqrt();
        let mut bank = ConvFilterBank::zeros(window, num_filters, in_dim);
        for w in bank.weights.data_mut() {
            *w = rng.random_range(-limit..limit);
        }
        bank
    }

    #[inline]
    pub fn in_dim(&self) -> usize {
        self.weights.cols() / self.window
    }

    #[inline]
    pub fn pad_left(&self) -> usize {
        (self.window - 1) / 2
    }
}

/// Gathers the padded window rooted at position `t` into `scratch`
/// (length `window * in_dim`, zero outside the sequence).
fn gather_window(input: &Tensor2, t: usize, window: usize, scratch: &mut [f64]) {
    let dim = input.cols();
    let pad_left = (window - 1) / 2;
    scratch.fill(0.0);
    for k in 0..window {
        let pos = t as isize - pad_left as isize + k as isize;
        if pos >= 0 && (pos as usize) < input.rows() {
            scratch[k * dim..(k + 1) * dim].copy_from_slice(input.row(pos as usize));
        }
    }
}

/// relu(conv) over all positions: output is `n x num_filters`.
pub fn conv1d_forward(input: &Tensor2, bank: &ConvFilterBank) -> Result<Tensor2> {
    if input.rows() == 0 {
        return Err(Error::invalid("conv input has no positions"));
    }
    if bank.window == 0 {
        return Err(Error::invalid("conv window must be >= 1"));
    }
    if bank.weights.cols() != bank.window * input.cols() {
        return Err(Error::shape(format!(
            "filter width {} does not match window {} x input dim {}",
            bank.weights.cols(),
            bank.window,
            input.cols()
        )));
    }
    if bank.bias.len() != bank.num_filters || bank.weights.rows() != bank.num_filters {
        return Err(Error::shape("filter count inconsistent with weights/bias".into()));
    }
    let n = input.rows();
    let mut out = Tensor2::zeros(n, bank.num_filters);
    let mut scratch = vec![0.0; bank.window * input.cols()];
    for t in 0..n {
        gather_window(input, t, bank.window, &mut scratch);
        let row = out.row_mut(t);
        for f in 0..bank.num_filters {
            let wrow = bank.weights.row(f);
            let mut sum = bank.bias[f];
            for (w, x) in wrow.iter().zip(&scratch) {
                sum = w.mul_add(*x, sum);
            }
            row[f] = sum.max(0.0);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolKind {
    MaxOverPositions,
    MeanOverPositions,
}

/// Pooled feature vector; for max pooling `argmax[f]` records the winning
/// position of filter `f` for backprop.
#[derive(Debug, Clone)]
pub struct Pooled {
    pub values: Vec<f64>,
    pub argmax: Option<Vec<usize>>,
}

/// Pools an `n x F` feature map down each column to a length-`F` vector.
pub fn pool(features: &Tensor2, kind: PoolKind) -> Result<Pooled> {
    let n = features.rows();
    let f = features.cols();
    if n == 0 || f == 0 {
        return Err(Error::invalid("cannot pool an empty feature map"));
    }
    match kind {
        PoolKind::MaxOverPositions => {
            let mut values = features.row(0).to_vec();
            let mut argmax = vec![0usize; f];
            for t in 1..n {
                for (j, &v) in features.row(t).iter().enumerate() {
                    if v > values[j] {
                        values[j] = v;
                        argmax[j] = t;
                    }
                }
            }
            Ok(Pooled {
                values,
                argmax: Some(argmax),
            })
        }
        PoolKind::MeanOverPositions => {
            let mut values = vec![0.0; f];
            for t in 0..n {
                for (j, &v) in features.row(t).iter().enumerate() {
                    values[j] += v;
                }
            }
            let inv = 1.0 / n as f64;
            for v in &mut values {
                *v *= inv;
            }
            Ok(Pooled {
                values,
                argmax: None,
            })
        }
    }
}

/// Gradient of a conv bank, same shapes as the bank.
#[derive(Debug, Clone)]
pub struct ConvGrad {
    pub weights: Tensor2,
    pub bias: Vec<f64>,
}

impl ConvGrad {
    pub fn zeros_like(bank: &ConvFilterBank) -> Self {
        ConvGrad {
            weights: Tensor2::zeros(bank.weights.rows(), bank.weights.cols()),
            bias: vec![0.0; bank.bias.len()],
        }
    }
}

/// Backward pass through pool(relu(conv(input))) for filter parameters.
///
/// `conv_out` and `pooled` are the caches from the forward pass,
/// `d_values` is dL/d(pooled output). Gradients accumulate into `grad`;
/// the input is treated as constant (nothing upstream of the conv is
/// trained), so no dL/d(input) is produced.
pub fn conv_pool_backward(
    input: &Tensor2,
    bank: &ConvFilterBank,
    conv_out: &Tensor2,
    pooled: &Pooled,
    d_values: &[f64],
    grad: &mut ConvGrad,
) {
    debug_assert_eq!(d_values.len(), bank.num_filters);
    let n = input.rows();
    let mut scratch = vec![0.0; bank.window * input.cols()];
    match &pooled.argmax {
        Some(argmax) => {
            // Max pooling: each filter's gradient flows only through its
            // winning position.
            for f in 0..bank.num_filters {
                let g = d_values[f];
                if g == 0.0 {
                    continue;
                }
                let t = argmax[f];
                if conv_out.get(t, f) <= 0.0 {
                    continue; // relu gate closed
                }
                gather_window(input, t, bank.window, &mut scratch);
                grad.bias[f] += g;
                let grow = grad.weights.row_mut(f);
                for (gw, x) in grow.iter_mut().zip(&scratch) {
                    *gw = g.mul_add(*x, *gw);
                }
            }
        }
        None => {
            // Mean pooling: every position contributes 1/n.
            let inv = 1.0 / n as f64;
            for t in 0..n {
                gather_window(input, t, bank.window, &mut scratch);
                let out_row = conv_out.row(t);
                for f in 0..bank.num_filters {
                    if out_row[f] <= 0.0 {
                        continue;
                    }
                    let g = d_values[f] * inv;
                    if g == 0.0 {
                        continue;
                    }
                    grad.bias[f] += g;
                    let grow = grad.weights.row_mut(f);
                    for (gw, x) in grow.iter_mut().zip(&scratch) {
                        *gw = g.mul_add(*x, *gw);
                    }
                }
            }
        }
    }
}
