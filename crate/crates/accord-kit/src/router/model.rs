//! The attention-pooled transformer classifier: embedding + projection,
//! three residual blocks (attention, feed-forward, attention), additive
//! attention pooling, and a two-layer head producing one logit per problem
//! kind.

use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::RouterError;
use crate::problems::ProblemKind;

use super::graph::{Matrix, Tape, Var};
use super::tokenizer::{Tokenizer, PAD};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouterConfig {
    /// Set from the tokenizer during training.
    pub vocab_size: usize,
    pub d_embed: usize,
    pub d_hidden: usize,
    pub heads: usize,
    pub max_len: usize,
    pub classes: usize,
    pub dropout: f64,
    pub seed: u64,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
}

impl Default for RouterConfig {
    fn default() -> Self {
        RouterConfig {
            vocab_size: 0,
            d_embed: 32,
            d_hidden: 64,
            heads: 4,
            max_len: 64,
            classes: ProblemKind::ALL.len(),
            dropout: 0.1,
            seed: 0,
            epochs: 3,
            batch_size: 32,
            learning_rate: 1e-3,
        }
    }
}

impl RouterConfig {
    pub fn validate(&self) -> Result<(), RouterError> {
        if self.heads == 0 || !self.d_hidden.is_multiple_of(self.heads) {
            return Err(RouterError::Json(serde_json::Error::io(std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                format!("d_hidden {} must be divisible by heads {}", self.d_hidden, self.heads),
            ))));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RouterModel {
    pub config: RouterConfig,
    pub tokenizer: Tokenizer,
    /// Named weight matrices in a fixed order; the names document the layout.
    pub params: Vec<(String, Matrix)>,
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw<'a> {
            rows: usize,
            cols: usize,
            data: &'a [f64],
        }
        Raw { rows: self.rows, cols: self.cols, data: &self.data }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            rows: usize,
            cols: usize,
            data: Vec<f64>,
        }
        let raw = Raw::deserialize(d)?;
        if raw.data.len() != raw.rows * raw.cols {
            return Err(serde::de::Error::custom("matrix data length mismatch"));
        }
        Ok(Matrix { rows: raw.rows, cols: raw.cols, data: raw.data })
    }
}

fn xavier(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let s = (6.0 / (rows + cols) as f64).sqrt();
    let data = (0..rows * cols).map(|_| rng.gen_range(-s..=s)).collect();
    Matrix { rows, cols, data }
}

fn ones(cols: usize) -> Matrix {
    Matrix { rows: 1, cols, data: vec![1.0; cols] }
}

impl RouterModel {
    /// Fresh model with seeded initialization. Layer-norm gains start at 1,
    /// all biases at 0, everything else Xavier-uniform.
    pub fn init(config: RouterConfig, tokenizer: Tokenizer) -> Result<Self, RouterError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let (de, dh, c) = (config.d_embed, config.d_hidden, config.classes);
        let dk = dh / config.heads;
        let mut params: Vec<(String, Matrix)> = Vec::new();
        let add = |name: &str, m: Matrix, params: &mut Vec<(String, Matrix)>| {
            params.push((name.to_string(), m));
        };
        add("e_token", xavier(&mut rng, tokenizer.len(), de), &mut params);
        add("e_pos", xavier(&mut rng, config.max_len, de), &mut params);
        add("ln_e.g", ones(de), &mut params);
        add("ln_e.b", Matrix::zeros(1, de), &mut params);
        add("w_p", xavier(&mut rng, de, dh), &mut params);
        add("b_p", Matrix::zeros(1, dh), &mut params);
        for layer in [1usize, 3] {
            for h in 0..config.heads {
                add(&format!("l{layer}.h{h}.wq"), xavier(&mut rng, dh, dk), &mut params);
                add(&format!("l{layer}.h{h}.wk"), xavier(&mut rng, dh, dk), &mut params);
                add(&format!("l{layer}.h{h}.wv"), xavier(&mut rng, dh, dk), &mut params);
            }
            add(&format!("l{layer}.wo"), xavier(&mut rng, dh, dh), &mut params);
            add(&format!("l{layer}.bo"), Matrix::zeros(1, dh), &mut params);
            add(&format!("l{layer}.ln.g"), ones(dh), &mut params);
            add(&format!("l{layer}.ln.b"), Matrix::zeros(1, dh), &mut params);
        }
        add("l2.w1", xavier(&mut rng, dh, 4 * dh), &mut params);
        add("l2.b1", Matrix::zeros(1, 4 * dh), &mut params);
        add("l2.w2", xavier(&mut rng, 4 * dh, dh), &mut params);
        add("l2.b2", Matrix::zeros(1, dh), &mut params);
        add("l2.ln.g", ones(dh), &mut params);
        add("l2.ln.b", Matrix::zeros(1, dh), &mut params);
        add("pool.wa", xavier(&mut rng, dh, dh), &mut params);
        add("pool.w", xavier(&mut rng, dh, 1), &mut params);
        add("head.w1", xavier(&mut rng, dh, dh), &mut params);
        add("head.b1", Matrix::zeros(1, dh), &mut params);
        add("head.ln.g", ones(dh), &mut params);
        add("head.ln.b", Matrix::zeros(1, dh), &mut params);
        add("head.w2", xavier(&mut rng, dh, c), &mut params);
        add("head.b2", Matrix::zeros(1, c), &mut params);
        Ok(RouterModel { config, tokenizer, params })
    }

    pub fn param_index(&self, name: &str) -> usize {
        self.params
            .iter()
            .position(|(n, _)| n == name)
            .unwrap_or_else(|| panic!("unknown parameter `{name}`"))
    }

    /// Registers every parameter as a tape leaf, in storage order.
    pub fn leaves(&self, tape: &mut Tape) -> Vec<Var> {
        self.params.iter().map(|(_, m)| tape.leaf(m.clone())).collect()
    }

    /// Builds the forward graph for one token sequence and returns
    /// `(logits, pooling weights)`. `dropout_rng` enables training-mode
    /// dropout on the embedding output.
    pub fn forward_graph(
        &self,
        tape: &mut Tape,
        leaves: &[Var],
        tokens: &[usize],
        dropout_rng: Option<&mut ChaCha8Rng>,
    ) -> Result<(Var, Var), RouterError> {
        assert!(!tokens.is_empty(), "empty token sequence");
        if tokens.len() > self.config.max_len {
            return Err(RouterError::SequenceTooLong {
                len: tokens.len(),
                max: self.config.max_len,
            });
        }
        let p = |name: &str| leaves[self.param_index(name)];
        let n = tokens.len();
        let keep: Vec<bool> = tokens.iter().map(|&t| t != PAD).collect();
        let positions: Vec<usize> = (0..n).collect();

        let tok_e = tape.gather(p("e_token"), tokens);
        let pos_e = tape.gather(p("e_pos"), &positions);
        let e = tape.add(tok_e, pos_e);
        let e = tape.layer_norm(e);
        let e = tape.mul_row(e, p("ln_e.g"));
        let mut e = tape.add_row(e, p("ln_e.b"));
        if let Some(rng) = dropout_rng {
            let rate = self.config.dropout;
            if rate > 0.0 {
                let scale = 1.0 / (1.0 - rate);
                let mask = Matrix {
                    rows: n,
                    cols: self.config.d_embed,
                    data: (0..n * self.config.d_embed)
                        .map(|_| if rng.gen::<f64>() < rate { 0.0 } else { scale })
                        .collect(),
                };
                let mask = tape.leaf(mask);
                e = tape.mul_elem(e, mask);
            }
        }
        let h = tape.matmul(e, p("w_p"));
        let mut h = tape.add_row(h, p("b_p"));

        for layer in [1usize, 3] {
            let sub = if layer == 1 {
                self.attention_block(tape, leaves, h, &keep, 1)
            } else {
                // Layer 2 is the feed-forward block.
                let f = tape.matmul(h, p("l2.w1"));
                let f = tape.add_row(f, p("l2.b1"));
                let f = tape.gelu(f);
                let f = tape.matmul(f, p("l2.w2"));
                let f = tape.add_row(f, p("l2.b2"));
                let res = tape.add(h, f);
                let res = tape.layer_norm(res);
                let res = tape.mul_row(res, p("l2.ln.g"));
                h = tape.add_row(res, p("l2.ln.b"));
                self.attention_block(tape, leaves, h, &keep, 3)
            };
            h = sub;
        }

        // Additive attention pooling over non-pad positions.
        let scores = tape.matmul(h, p("pool.wa"));
        let scores = tape.tanh(scores);
        let scores = tape.matmul(scores, p("pool.w"));
        let scores = tape.transpose(scores);
        let weights = tape.softmax_rows(scores, &keep);
        let r = tape.matmul(weights, h);

        let y = tape.matmul(r, p("head.w1"));
        let y = tape.add_row(y, p("head.b1"));
        let y = tape.gelu(y);
        let y = tape.layer_norm(y);
        let y = tape.mul_row(y, p("head.ln.g"));
        let y = tape.add_row(y, p("head.ln.b"));
        let y = tape.matmul(y, p("head.w2"));
        let logits = tape.add_row(y, p("head.b2"));
        Ok((logits, weights))
    }

    fn attention_block(
        &self,
        tape: &mut Tape,
        leaves: &[Var],
        h: Var,
        keep: &[bool],
        layer: usize,
    ) -> Var {
        let p = |name: &str| leaves[self.param_index(name)];
        let dk = self.config.d_hidden / self.config.heads;
        let scale = 1.0 / (dk as f64).sqrt();
        let mut heads = Vec::with_capacity(self.config.heads);
        for head in 0..self.config.heads {
            let q = tape.matmul(h, p(&format!("l{layer}.h{head}.wq")));
            let k = tape.matmul(h, p(&format!("l{layer}.h{head}.wk")));
            let v = tape.matmul(h, p(&format!("l{layer}.h{head}.wv")));
            let kt = tape.transpose(k);
            let scores = tape.matmul(q, kt);
            let scores = tape.scale(scores, scale);
            let probs = tape.softmax_rows(scores, keep);
            heads.push(tape.matmul(probs, v));
        }
        let cat = tape.concat_cols(&heads);
        let att = tape.matmul(cat, p(&format!("l{layer}.wo")));
        let att = tape.add_row(att, p(&format!("l{layer}.bo")));
        let res = tape.add(h, att);
        let res = tape.layer_norm(res);
        let res = tape.mul_row(res, p(&format!("l{layer}.ln.g")));
        tape.add_row(res, p(&format!("l{layer}.ln.b")))
    }

    /// Inference logits (dropout off).
    pub fn forward(&self, tokens: &[usize]) -> Result<Vec<f64>, RouterError> {
        let mut tape = Tape::new();
        let leaves = self.leaves(&mut tape);
        let (logits, _) = self.forward_graph(&mut tape, &leaves, tokens, None)?;
        Ok(tape.value(logits).data.clone())
    }

    /// Pooling distribution over token positions (inference mode).
    pub fn pool_weights(&self, tokens: &[usize]) -> Result<Vec<f64>, RouterError> {
        let mut tape = Tape::new();
        let leaves = self.leaves(&mut tape);
        let (_, weights) = self.forward_graph(&mut tape, &leaves, tokens, None)?;
        Ok(tape.value(weights).data.clone())
    }

    /// Classifies an instruction text; sequences longer than the model's
    /// maximum are truncated. Returns the softmax confidence of the winner.
    pub fn classify(&self, text: &str) -> (ProblemKind, f64) {
        let mut tokens = self.tokenizer.encode(text);
        if tokens.is_empty() {
            tokens.push(super::tokenizer::UNK);
        }
        tokens.truncate(self.config.max_len);
        let logits = self.forward(&tokens).expect("length enforced by truncation");
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
        let denom: f64 = exps.iter().sum();
        let (best, _) = logits
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
            .unwrap();
        (ProblemKind::ALL[best], exps[best] / denom)
    }

    pub fn save(&self, path: &Path) -> Result<(), RouterError> {
        #[derive(Serialize)]
        struct Checkpoint<'a> {
            version: u32,
            model: &'a RouterModel,
        }
        let file = std::fs::File::create(path)?;
        serde_json::to_writer(std::io::BufWriter::new(file), &Checkpoint {
            version: CHECKPOINT_VERSION,
            model: self,
        })?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, RouterError> {
        #[derive(Deserialize)]
        struct Checkpoint {
            version: u32,
            model: RouterModel,
        }
        let file = std::fs::File::open(path)?;
        let mut cp: Checkpoint = serde_json::from_reader(std::io::BufReader::new(file))?;
        if cp.version != CHECKPOINT_VERSION {
            return Err(RouterError::CheckpointVersion(cp.version));
        }
        cp.model.tokenizer.reindex();
        cp.model.config.validate()?;
        Ok(cp.model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_model(seed: u64) -> RouterModel {
        let tokenizer = Tokenizer::fit([
            "pack items into bins",
            "schedule jobs on machines",
            "route vehicles to customers",
        ]);
        let config = RouterConfig {
            vocab_size: tokenizer.len(),
            d_embed: 8,
            d_hidden: 16,
            heads: 2,
            max_len: 16,
            dropout: 0.0,
            seed,
            ..RouterConfig::default()
        };
        RouterModel::init(config, tokenizer).unwrap()
    }

    #[test]
    fn logits_have_one_entry_per_class() {
        let m = tiny_model(1);
        let logits = m.forward(&m.tokenizer.encode("pack items")).unwrap();
        assert_eq!(logits.len(), ProblemKind::ALL.len());
        assert!(logits.iter().all(|l| l.is_finite()));
    }

    #[test]
    fn different_seeds_give_different_logits() {
        let (a, b) = (tiny_model(1), tiny_model(2));
        let tokens = a.tokenizer.encode("schedule jobs");
        assert_ne!(a.forward(&tokens).unwrap(), b.forward(&tokens).unwrap());
    }

    #[test]
    fn token_order_changes_the_output() {
        let m = tiny_model(3);
        let a = m.forward(&m.tokenizer.encode("pack items into bins")).unwrap();
        let b = m.forward(&m.tokenizer.encode("bins into items pack")).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn padding_suffix_does_not_change_logits() {
        let m = tiny_model(4);
        let tokens = m.tokenizer.encode("route vehicles");
        let mut padded = tokens.clone();
        padded.extend([PAD; 5]);
        let a = m.forward(&tokens).unwrap();
        let b = m.forward(&padded).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn pooling_weights_form_a_distribution() {
        let m = tiny_model(5);
        let mut tokens = m.tokenizer.encode("schedule jobs on machines");
        tokens.extend([PAD; 3]);
        let w = m.pool_weights(&tokens).unwrap();
        let sum: f64 = w.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
        assert!(w.iter().all(|&x| x >= 0.0));
        assert!(w[w.len() - 3..].iter().all(|&x| x == 0.0), "pad positions must get weight 0");
    }

    #[test]
    fn sequence_too_long_is_an_error() {
        let m = tiny_model(6);
        let tokens = vec![2usize; 17];
        assert!(matches!(
            m.forward(&tokens),
            Err(RouterError::SequenceTooLong { len: 17, max: 16 })
        ));
    }

    #[test]
    fn checkpoint_round_trips() {
        let m = tiny_model(7);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("router.json");
        m.save(&path).unwrap();
        let back = RouterModel::load(&path).unwrap();
        let tokens = m.tokenizer.encode("pack items");
        assert_eq!(m.forward(&tokens).unwrap(), back.forward(&tokens).unwrap());
    }
}
