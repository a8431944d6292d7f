//! Minimal numeric kernel: dense layers, 1-D convolution, pooling,
//! optimizers, and finite-difference gradient verification.
//!
//! Everything is 64-bit and hand-differentiated for the fixed
//! architectures used by the tagger and the Q-network; there is no
//! general autodiff.

mod conv;
mod dense;
mod gradcheck;
mod optim;
mod tensor;

pub use conv::{conv1d_forward, conv_pool_backward, pool, ConvFilterBank, ConvGrad, Pooled, PoolKind};
pub use dense::{
    dense_backward, dense_forward, dense_forward_cached, Activation, DenseGrad, DenseLayer,
};
pub use gradcheck::{finite_diff_check, finite_diff_check_sampled};
pub use optim::{OptKind, Optimizer, OptimizerConfig};
pub use tensor::Tensor2;
