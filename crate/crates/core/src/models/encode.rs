use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded};
use crate::tensor::Tensor;
use crate::textproc::{normalize_chars, ALPHABET_SIZE};

pub const WORD_DIM: usize = 50;

/// An encoded move without padding: `rows` holds `max(len, 1)` rows (a
/// single zero row stands in for an empty move) and `len` the real length.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedSeq {
    pub rows: Tensor,
    pub len: usize,
    /// True when the source had more than `max_len` units.
    pub truncated: bool,
}

impl EncodedSeq {
    fn from_rows(rows: Vec<Vec<f64>>, width: usize, truncated: bool) -> Self {
        let len = rows.len();
        let rows = if rows.is_empty() {
            Tensor::zeros(&[1, width])
        } else {
            Tensor::from_rows(&rows, width).expect("rows share the encoder width")
        };
        EncodedSeq { rows, len, truncated }
    }

    /// Zero-pads (or truncates) to a fixed `[max_len x width]` tensor.
    pub fn padded(&self, max_len: usize) -> Tensor {
        let w = self.rows.cols();
        let mut t = Tensor::zeros(&[max_len, w]);
        let n = self.len.min(max_len);
        t.data_mut()[..n * w].copy_from_slice(&self.rows.data()[..n * w]);
        t
    }

    /// Boolean mask over `max_len` positions, true for real rows.
    pub fn mask(&self, max_len: usize) -> Vec<bool> {
        (0..max_len).map(|i| i < self.len).collect()
    }
}

pub fn encode_char_seq(text: &str, max_len: usize) -> EncodedSeq {
    let idx = normalize_chars(text);
    let truncated = idx.len() > max_len;
    let rows = idx
        .iter()
        .take(max_len)
        .map(|&i| {
            let mut r = vec![0.0; ALPHABET_SIZE];
            r[i] = 1.0;
            r
        })
        .collect();
    EncodedSeq::from_rows(rows, ALPHABET_SIZE, truncated)
}

/// One-hot character encoding, `[max_len x 37]`, zero rows after the text.
pub fn encode_char(text: &str, max_len: usize) -> Tensor {
    encode_char_seq(text, max_len).padded(max_len)
}

pub fn encode_word_seq(tokens: &[String], emb: &Embeddings, max_len: usize) -> EncodedSeq {
    let truncated = tokens.len() > max_len;
    let rows = tokens
        .iter()
        .take(max_len)
        .map(|t| emb.get(t).map_or_else(|| vec![0.0; emb.dim()], <[f64]>::to_vec))
        .collect();
    EncodedSeq::from_rows(rows, emb.dim(), truncated)
}

/// Embedding lookup per token, `[max_len x dim]`; unknown tokens and padding
/// are zero rows.
pub fn encode_word(tokens: &[String], emb: &Embeddings, max_len: usize) -> Tensor {
    encode_word_seq(tokens, emb, max_len).padded(max_len)
}

/// A frozen token-to-vector table.
#[derive(Clone, Debug, PartialEq)]
pub struct Embeddings {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl Embeddings {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(Vec::as_slice)
    }

    pub fn from_map(dim: usize, vectors: HashMap<String, Vec<f64>>) -> Result<Self> {
        if let Some((tok, v)) = vectors.iter().find(|(_, v)| v.len() != dim) {
            return Err(Error::Format(format!("embedding for {tok:?} has {} values, expected {dim}", v.len())));
        }
        Ok(Embeddings { dim, vectors })
    }

    /// Reads the GloVe text format: a token followed by `dim` numbers per
    /// line. Later duplicates of a token are ignored.
    pub fn read<R: BufRead>(reader: R, dim: usize) -> Result<Self> {
        let mut vectors = HashMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let token = parts.next().unwrap_or_default().to_string();
            let vals = parts
                .map(str::parse::<f64>)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse {
                    line: i + 1,
                    message: format!("bad number in embedding for {token:?}: {e}"),
                })?;
            if vals.len() != dim {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("embedding for {token:?} has {} values, expected {dim}", vals.len()),
                });
            }
            vectors.entry(token).or_insert(vals);
        }
        Ok(Embeddings { dim, vectors })
    }

    pub fn load(path: &Path, dim: usize) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read(std::io::BufReader::new(f), dim)
    }

    /// Deterministic stand-in vectors for `vocab`: each token gets a vector
    /// drawn uniformly from `[-0.5, 0.5)` with a generator seeded from the
    /// token itself, so the same token always maps to the same vector.
    pub fn hashed<'a>(vocab: impl IntoIterator<Item = &'a str>, dim: usize, seed: u64) -> Self {
        let mut vectors = HashMap::new();
        for tok in vocab {
            vectors.entry(tok.to_string()).or_insert_with(|| {
                let mut rng = seeded(derive_seed(seed, tok));
                (0..dim).map(|_| rng.random_range(-0.5..0.5)).collect()
            });
        }
        Embeddings { dim, vectors }
    }
}
