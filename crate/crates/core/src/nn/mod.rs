//! Fully connected networks, reverse-mode gradients and Adam, written
//! directly over flat parameter buffers.

mod adam;
mod mlp;
mod params;

pub use adam::{clip_global_norm, Adam, AdamConfig};
pub use mlp::{Activation, Mlp, NetworkSpec, Tape};
pub use params::{PolicyParameters, FORMAT_VERSION, MAGIC};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("input has {got} values, network expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("gradient contains non-finite values; update skipped")]
    NonFiniteGradient,
    #[error("parameter/gradient shape mismatch")]
    ShapeMismatch,
    #[error("invalid network spec: {0}")]
    InvalidSpec(String),
    #[error("model format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
