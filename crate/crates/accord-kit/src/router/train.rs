//! From-scratch training loop (Adam on softmax cross-entropy) and a
//! finite-difference gradient check for the forward/backward implementation.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::RouterError;
use crate::problems::ProblemKind;

use super::graph::{Matrix, Tape};
use super::model::{RouterConfig, RouterModel};
use super::tokenizer::{Tokenizer, UNK};

/// Per-epoch mean training loss.
pub type TrainingCurve = Vec<f64>;

struct Adam {
    m: Vec<Matrix>,
    v: Vec<Matrix>,
    t: u64,
    lr: f64,
}

impl Adam {
    fn new(model: &RouterModel, lr: f64) -> Self {
        let shape: Vec<Matrix> =
            model.params.iter().map(|(_, p)| Matrix::zeros(p.rows, p.cols)).collect();
        Adam { m: shape.clone(), v: shape, t: 0, lr }
    }

    fn step(&mut self, model: &mut RouterModel, grads: &[Matrix]) {
        const B1: f64 = 0.9;
        const B2: f64 = 0.999;
        const EPS: f64 = 1e-8;
        self.t += 1;
        let bc1 = 1.0 - B1.powi(self.t as i32);
        let bc2 = 1.0 - B2.powi(self.t as i32);
        for (i, (_, param)) in model.params.iter_mut().enumerate() {
            for k in 0..param.data.len() {
                let g = grads[i].data[k];
                let m = &mut self.m[i].data[k];
                let v = &mut self.v[i].data[k];
                *m = B1 * *m + (1.0 - B1) * g;
                *v = B2 * *v + (1.0 - B2) * g * g;
                let m_hat = *m / bc1;
                let v_hat = *v / bc2;
                param.data[k] -= self.lr * m_hat / (v_hat.sqrt() + EPS);
            }
        }
    }
}

fn encode_clipped(model: &RouterModel, text: &str) -> Vec<usize> {
    let mut tokens = model.tokenizer.encode(text);
    if tokens.is_empty() {
        tokens.push(UNK);
    }
    tokens.truncate(model.config.max_len);
    tokens
}

/// Mean loss and parameter gradients over one mini-batch.
fn batch_gradients(
    model: &RouterModel,
    batch: &[(Vec<usize>, usize)],
    dropout_rng: Option<&mut ChaCha8Rng>,
) -> Result<(f64, Vec<Matrix>), RouterError> {
    let mut tape = Tape::new();
    let leaves = model.leaves(&mut tape);
    let mut total = None;
    let mut rng = dropout_rng;
    for (tokens, class) in batch {
        let (logits, _) = model.forward_graph(&mut tape, &leaves, tokens, rng.as_deref_mut())?;
        let loss = tape.cross_entropy(logits, *class);
        total = Some(match total {
            None => loss,
            Some(acc) => tape.add(acc, loss),
        });
    }
    let total = total.expect("non-empty batch");
    let mean = tape.scale(total, 1.0 / batch.len() as f64);
    tape.backward(mean);
    let loss = tape.value(mean).data[0];
    let grads = leaves.iter().map(|&l| tape.grad(l).clone()).collect();
    Ok((loss, grads))
}

/// Trains a fresh classifier on (instruction text, problem kind) pairs.
/// Deterministic for a given config seed. The corpus must contain every
/// problem kind.
pub fn train(
    mut config: RouterConfig,
    corpus: &[(String, ProblemKind)],
) -> Result<(RouterModel, TrainingCurve), RouterError> {
    if corpus.is_empty() {
        return Err(RouterError::EmptyCorpus);
    }
    for kind in ProblemKind::ALL {
        if !corpus.iter().any(|(_, k)| *k == kind) {
            return Err(RouterError::MissingClass(kind));
        }
    }
    let tokenizer = Tokenizer::fit(corpus.iter().map(|(text, _)| text.as_str()));
    config.vocab_size = tokenizer.len();
    let longest = corpus
        .iter()
        .map(|(text, _)| tokenizer.encode(text).len().max(1))
        .max()
        .unwrap();
    config.max_len = config.max_len.max(longest);
    let mut model = RouterModel::init(config, tokenizer)?;

    let encoded: Vec<(Vec<usize>, usize)> = corpus
        .iter()
        .map(|(text, kind)| (encode_clipped(&model, text), kind.class_index()))
        .collect();

    let mut adam = Adam::new(&model, model.config.learning_rate);
    let mut order: Vec<usize> = (0..encoded.len()).collect();
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(model.config.seed ^ 0x5eed_0001);
    let mut dropout_rng = ChaCha8Rng::seed_from_u64(model.config.seed ^ 0x5eed_0002);
    let mut curve = Vec::with_capacity(model.config.epochs);
    for _ in 0..model.config.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        let mut batches = 0usize;
        for chunk in order.chunks(model.config.batch_size.max(1)) {
            let batch: Vec<(Vec<usize>, usize)> =
                chunk.iter().map(|&i| encoded[i].clone()).collect();
            let (loss, grads) = batch_gradients(&model, &batch, Some(&mut dropout_rng))?;
            adam.step(&mut model, &grads);
            epoch_loss += loss;
            batches += 1;
        }
        curve.push(epoch_loss / batches as f64);
    }
    Ok((model, curve))
}

/// Held-out accuracy of a trained model.
pub fn accuracy(model: &RouterModel, corpus: &[(String, ProblemKind)]) -> f64 {
    if corpus.is_empty() {
        return 0.0;
    }
    let hits = corpus
        .iter()
        .filter(|(text, kind)| model.classify(text).0 == *kind)
        .count();
    hits as f64 / corpus.len() as f64
}

/// Compares analytic gradients against central finite differences on a
/// seeded subsample of parameter entries (dropout disabled). Returns the
/// maximum relative error.
pub fn gradient_check(model: &RouterModel, text: &str, target: ProblemKind) -> f64 {
    let tokens = encode_clipped(model, text);
    let class = target.class_index();
    let (_, grads) = batch_gradients(model, &[(tokens.clone(), class)], None)
        .expect("length enforced by encode_clipped");

    let loss_at = |m: &RouterModel| -> f64 {
        let mut tape = Tape::new();
        let leaves = m.leaves(&mut tape);
        let (logits, _) = m
            .forward_graph(&mut tape, &leaves, &tokens, None)
            .expect("length already validated");
        let loss = tape.cross_entropy(logits, class);
        tape.value(loss).data[0]
    };

    let mut rng = ChaCha8Rng::seed_from_u64(model.config.seed ^ 0x6ead_c4ec);
    let h = 1e-5;
    let mut max_rel = 0.0f64;
    let mut probe = model.clone();
    for (pi, (_, param)) in model.params.iter().enumerate() {
        for _ in 0..4.min(param.data.len()) {
            let k = rng.gen_range(0..param.data.len());
            let orig = param.data[k];
            probe.params[pi].1.data[k] = orig + h;
            let up = loss_at(&probe);
            probe.params[pi].1.data[k] = orig - h;
            let down = loss_at(&probe);
            probe.params[pi].1.data[k] = orig;
            let fd = (up - down) / (2.0 * h);
            let an = grads[pi].data[k];
            let rel = (fd - an).abs() / (an.abs() + fd.abs()).max(1.0);
            max_rel = max_rel.max(rel);
        }
    }
    max_rel
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_corpus() -> Vec<(String, ProblemKind)> {
        vec![
            ("find the shortest route for one vehicle".into(), ProblemKind::Tsp),
            ("route several capacitated vehicles to customers".into(), ProblemKind::Vrp),
            ("pack items maximizing value under a weight capacity".into(), ProblemKind::Knapsack),
            ("use the fewest bins for all items".into(), ProblemKind::Binpack),
            ("schedule jobs with per-job machine orders".into(), ProblemKind::Jssp),
            ("order jobs through machines in one sequence".into(), ProblemKind::Fssp),
        ]
    }

    fn tiny_config() -> RouterConfig {
        RouterConfig {
            d_embed: 8,
            d_hidden: 16,
            heads: 2,
            max_len: 16,
            dropout: 0.0,
            epochs: 30,
            batch_size: 6,
            learning_rate: 3e-3,
            seed: 9,
            ..RouterConfig::default()
        }
    }

    #[test]
    fn training_is_deterministic_and_loss_decreases() {
        let (model_a, curve_a) = train(tiny_config(), &tiny_corpus()).unwrap();
        let (model_b, curve_b) = train(tiny_config(), &tiny_corpus()).unwrap();
        assert_eq!(curve_a, curve_b);
        assert_eq!(model_a.params, model_b.params);
        assert!(
            curve_a.last().unwrap() < curve_a.first().unwrap(),
            "loss did not decrease: {curve_a:?}"
        );
    }

    #[test]
    fn trained_model_fits_the_tiny_corpus() {
        let (model, _) = train(tiny_config(), &tiny_corpus()).unwrap();
        assert_eq!(accuracy(&model, &tiny_corpus()), 1.0);
    }

    #[test]
    fn missing_class_is_rejected() {
        let mut corpus = tiny_corpus();
        corpus.retain(|(_, k)| *k != ProblemKind::Fssp);
        assert!(matches!(
            train(tiny_config(), &corpus),
            Err(RouterError::MissingClass(ProblemKind::Fssp))
        ));
        assert!(matches!(train(tiny_config(), &[]), Err(RouterError::EmptyCorpus)));
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        let tokenizer = Tokenizer::fit(tiny_corpus().iter().map(|(t, _)| t.as_str()));
        let mut config = tiny_config();
        config.vocab_size = tokenizer.len();
        let model = RouterModel::init(config, tokenizer).unwrap();
        let err = gradient_check(&model, "schedule jobs with machine orders", ProblemKind::Jssp);
        assert!(err <= 1e-4, "max relative error {err}");
    }

    #[test]
    fn masked_pad_embedding_gets_no_gradient() {
        let tokenizer = Tokenizer::fit(tiny_corpus().iter().map(|(t, _)| t.as_str()));
        let mut config = tiny_config();
        config.vocab_size = tokenizer.len();
        let model = RouterModel::init(config, tokenizer).unwrap();
        let mut tokens = model.tokenizer.encode("pack items");
        tokens.extend([super::super::tokenizer::PAD; 4]);
        let (_, grads) = batch_gradients(&model, &[(tokens, 2)], None).unwrap();
        let e_token = &grads[model.param_index("e_token")];
        let pad_row = &e_token.data[..e_token.cols];
        assert!(pad_row.iter().all(|&g| g == 0.0), "pad embedding row has gradient");
    }
}
