//! Global feature vocabulary and the fixed-width input encoding.
//!
//! Feature `i` of the vocabulary lands in slot `i mod 8384` with value
//! `i / 8384 + 1`, so an arbitrarily large sparse feature space folds into a
//! fixed input layer. Short-walk experiments with small vocabularies can use
//! the plain one-hot layout instead.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use thiserror::Error;

use crate::dataset::{data_lines, LabelSet, PrepError};

/// Width of the superposed input layer.
pub const SUPERPOSED_WIDTH: usize = 8384;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("malformed line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl From<PrepError> for CodecError {
    fn from(e: PrepError) -> Self {
        match e {
            PrepError::Format { line, reason } => CodecError::Format { line, reason },
            other => CodecError::Format {
                line: 0,
                reason: other.to_string(),
            },
        }
    }
}

/// Feature strings indexed densely in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureVocabulary {
    features: Vec<String>,
    index: HashMap<String, u32>,
}

impl FeatureVocabulary {
    pub fn from_sorted(features: Vec<String>) -> Self {
        debug_assert!(features.windows(2).all(|w| w[0] < w[1]));
        let index = features
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i as u32))
            .collect();
        FeatureVocabulary { features, index }
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn index_of(&self, feature: &str) -> Option<u32> {
        self.index.get(feature).copied()
    }

    pub fn feature(&self, i: u32) -> &str {
        &self.features[i as usize]
    }

    /// `<index>\t<feature-string>` per line.
    pub fn write_tsv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for (i, f) in self.features.iter().enumerate() {
            writeln!(w, "{i}\t{f}")?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(r: R) -> Result<Self, CodecError> {
        let mut features = Vec::new();
        for (line, l) in data_lines(r) {
            let l = l?;
            let bad = |reason: &str| CodecError::Format {
                line,
                reason: reason.into(),
            };
            let (i, f) = l.split_once('\t').ok_or_else(|| bad("missing tab"))?;
            if i.parse::<usize>().ok() != Some(features.len()) {
                return Err(bad("indices must be dense and ascending"));
            }
            if features
                .last()
                .is_some_and(|prev: &String| prev.as_str() >= f)
            {
                return Err(bad("features must be strictly increasing"));
            }
            features.push(f.to_string());
        }
        Ok(Self::from_sorted(features))
    }
}

/// Builds the vocabulary from every feature string seen in training dumps.
pub fn build_vocabulary<I, S>(features: I) -> FeatureVocabulary
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let set: BTreeSet<String> = features
        .into_iter()
        .map(|s| s.as_ref().to_string())
        .collect();
    FeatureVocabulary::from_sorted(set.into_iter().collect())
}

/// Slot and value for vocabulary index `i` in the superposed layout.
pub fn superposed_slot(i: u32) -> (u32, u32) {
    let w = SUPERPOSED_WIDTH as u32;
    (i % w, i / w + 1)
}

/// Sparse input row: `(position, value)` sorted by position, values ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseInput(pub Vec<(u32, u32)>);

impl SparseInput {
    pub fn nnz(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.0.iter().copied()
    }
}

impl fmt::Display for SparseInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (slot, v)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{slot}:{v}")?;
        }
        Ok(())
    }
}

impl FromStr for SparseInput {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.is_empty() {
            return Ok(SparseInput::default());
        }
        let mut out = Vec::new();
        for pair in s.split(',') {
            let (a, b) = pair
                .split_once(':')
                .ok_or_else(|| format!("bad slot entry {pair:?}"))?;
            let slot: u32 = a.parse().map_err(|_| format!("bad slot {a:?}"))?;
            let value: u32 = b.parse().map_err(|_| format!("bad value {b:?}"))?;
            if value == 0 || out.last().is_some_and(|&(p, _)| p >= slot) {
                return Err(format!("slots must ascend with positive values: {s:?}"));
            }
            out.push((slot, value));
        }
        Ok(SparseInput(out))
    }
}

/// Superposed encoding. Unknown features are dropped; when two features
/// share a slot the larger value wins.
pub fn encode<S: AsRef<str>>(features: &[S], vocab: &FeatureVocabulary) -> SparseInput {
    let mut slots: Vec<(u32, u32)> = features
        .iter()
        .filter_map(|f| vocab.index_of(f.as_ref()))
        .map(superposed_slot)
        .collect();
    slots.sort_unstable();
    // ascending by (slot, value): the last entry per slot carries the max
    let mut out: Vec<(u32, u32)> = Vec::with_capacity(slots.len());
    for (slot, v) in slots {
        match out.last_mut() {
            Some(last) if last.0 == slot => last.1 = v,
            _ => out.push((slot, v)),
        }
    }
    SparseInput(out)
}

/// One-hot encoding over the whole vocabulary (width `vocab.len()`).
pub fn encode_dense<S: AsRef<str>>(features: &[S], vocab: &FeatureVocabulary) -> SparseInput {
    let mut idx: Vec<u32> = features
        .iter()
        .filter_map(|f| vocab.index_of(f.as_ref()))
        .collect();
    idx.sort_unstable();
    idx.dedup();
    SparseInput(idx.into_iter().map(|i| (i, 1)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Encoding {
    Superposed,
    Dense,
}

impl Encoding {
    pub fn input_width(self, vocab: &FeatureVocabulary) -> usize {
        match self {
            Encoding::Superposed => SUPERPOSED_WIDTH,
            Encoding::Dense => vocab.len(),
        }
    }

    pub fn encode<S: AsRef<str>>(self, features: &[S], vocab: &FeatureVocabulary) -> SparseInput {
        match self {
            Encoding::Superposed => encode(features, vocab),
            Encoding::Dense => encode_dense(features, vocab),
        }
    }
}

impl FromStr for Encoding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "superposed" => Ok(Encoding::Superposed),
            "dense" => Ok(Encoding::Dense),
            _ => Err(format!(
                "unknown encoding {s:?} (expected superposed or dense)"
            )),
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::Superposed => "superposed",
            Encoding::Dense => "dense",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedExample {
    pub node: String,
    pub input: SparseInput,
    pub targets: LabelSet,
}

/// `<node-iri>\t<slot>:<value>,...\t<label-idx>,...` per line.
pub fn write_encoded<W: Write>(w: &mut W, examples: &[EncodedExample]) -> io::Result<()> {
    for e in examples {
        writeln!(w, "{}\t{}\t{}", e.node, e.input, e.targets)?;
    }
    Ok(())
}

pub fn read_encoded<R: BufRead>(r: R) -> Result<Vec<EncodedExample>, CodecError> {
    let mut out = Vec::new();
    for (line, l) in data_lines(r) {
        let l = l?;
        let bad = |reason: String| CodecError::Format { line, reason };
        let fields: Vec<&str> = l.split('\t').collect();
        if fields.len() != 3 {
            return Err(bad("expected 3 tab-separated fields".into()));
        }
        out.push(EncodedExample {
            node: fields[0].to_string(),
            input: fields[1].parse().map_err(bad)?,
            targets: fields[2]
                .parse()
                .map_err(|_| bad("bad label list".into()))?,
        });
    }
    Ok(out)
}
