//! Word-level tokenizer with a shared placeholder for numbers, so the
//! classifier keys on phrasing rather than instance-specific digits.
//! Lowercased words, digit runs collapsed to `<num>`, punctuation as
//! single-character tokens.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const PAD: usize = 0;
pub const UNK: usize = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tokenizer {
    vocab: Vec<String>,
    #[serde(skip)]
    index: BTreeMap<String, usize>,
}

impl PartialEq for Tokenizer {
    fn eq(&self, other: &Self) -> bool {
        self.vocab == other.vocab
    }
}

fn split_tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut word = String::new();
    let mut in_number = false;
    let flush = |word: &mut String, in_number: &mut bool, out: &mut Vec<String>| {
        if !word.is_empty() {
            out.push(if *in_number { "<num>".to_string() } else { std::mem::take(word) });
            word.clear();
        }
        *in_number = false;
    };
    for c in text.chars() {
        if c.is_alphabetic() {
            if in_number {
                flush(&mut word, &mut in_number, &mut out);
            }
            word.extend(c.to_lowercase());
        } else if c.is_ascii_digit() {
            if !word.is_empty() && !in_number {
                flush(&mut word, &mut in_number, &mut out);
            }
            in_number = true;
            word.push(c);
        } else {
            flush(&mut word, &mut in_number, &mut out);
            if !c.is_whitespace() {
                out.push(c.to_string());
            }
        }
    }
    flush(&mut word, &mut in_number, &mut out);
    out
}

impl Tokenizer {
    /// Builds the vocabulary from a corpus; ids are assigned in first-seen
    /// order after the reserved `<pad>` and `<unk>` entries.
    pub fn fit<'a>(texts: impl IntoIterator<Item = &'a str>) -> Self {
        let mut vocab = vec!["<pad>".to_string(), "<unk>".to_string()];
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        index.insert(vocab[0].clone(), PAD);
        index.insert(vocab[1].clone(), UNK);
        for text in texts {
            for tok in split_tokens(text) {
                if !index.contains_key(&tok) {
                    index.insert(tok.clone(), vocab.len());
                    vocab.push(tok);
                }
            }
        }
        Tokenizer { vocab, index }
    }

    pub fn from_vocab(vocab: Vec<String>) -> Self {
        let index = vocab.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Tokenizer { vocab, index }
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn encode(&self, text: &str) -> Vec<usize> {
        split_tokens(text)
            .into_iter()
            .map(|tok| self.index.get(&tok).copied().unwrap_or(UNK))
            .collect()
    }

    /// Rebuilds the lookup index after deserialization.
    pub fn reindex(&mut self) {
        self.index = self.vocab.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_collapse_to_placeholder() {
        assert_eq!(
            split_tokens("capacity = 20 that maximizes"),
            vec!["capacity", "=", "<num>", "that", "maximizes"]
        );
        assert_eq!(split_tokens("J0:\nM2:205"), vec!["j", "<num>", ":", "m", "<num>", ":", "<num>"]);
    }

    #[test]
    fn encode_is_deterministic_and_unk_safe() {
        let tok = Tokenizer::fit(["alpha beta 12"]);
        assert_eq!(tok.encode("alpha beta 99"), tok.encode("alpha beta 12"));
        assert_eq!(tok.encode("gamma")[0], UNK);
        assert_eq!(tok.encode("Alpha"), tok.encode("alpha"));
    }
}
