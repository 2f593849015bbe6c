//! Instruction-text classifier that routes a task statement to one of the
//! six problem kinds: a small attention-pooled transformer (embedding +
//! projection, attention / feed-forward / attention blocks, additive
//! attention pooling, two-layer head) trained from scratch with a verified
//! reverse-mode gradient.

pub mod graph;
mod model;
mod tokenizer;
mod train;

pub use model::{RouterConfig, RouterModel, CHECKPOINT_VERSION};
pub use tokenizer::{Tokenizer, PAD, UNK};
pub use train::{accuracy, gradient_check, train, TrainingCurve};

use crate::problems::ProblemKind;

/// Training pairs from a generated dataset: instruction text labeled with
/// its problem kind.
pub fn corpus_from_dataset(records: &[crate::dataset::DatasetRecord]) -> Vec<(String, ProblemKind)> {
    records.iter().map(|r| (r.instruction.clone(), r.problem)).collect()
}
