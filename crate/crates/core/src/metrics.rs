//! Micro-averaged multi-label metrics.

use std::fmt;

use ndarray::ArrayView2;
use thiserror::Error;

use crate::dataset::LabelSet;

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// Counts pooled over every (example, label) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl Counts {
    pub fn merge(self, other: Counts) -> Counts {
        Counts {
            tp: self.tp + other.tp,
            fp: self.fp + other.fp,
            fn_: self.fn_ + other.fn_,
        }
    }

    pub fn metrics(self) -> Metrics {
        let ratio = |num: u64, den: u64| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(self.tp, self.tp + self.fp);
        let recall = ratio(self.tp, self.tp + self.fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Metrics {
            counts: self,
            precision,
            recall,
            f1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub counts: Counts,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "precision={:.4} recall={:.4} f1={:.4} tp={} fp={} fn={}",
            self.precision, self.recall, self.f1, self.counts.tp, self.counts.fp, self.counts.fn_
        )
    }
}

/// Labels with probability at or above `threshold`, one set per row.
pub fn predict_labels(probs: ArrayView2<f64>, threshold: f64) -> Vec<LabelSet> {
    probs
        .rows()
        .into_iter()
        .map(|row| {
            LabelSet::new(
                row.iter()
                    .enumerate()
                    .filter(|(_, &p)| p >= threshold)
                    .map(|(j, _)| j as u32)
                    .collect(),
            )
        })
        .collect()
}

pub fn count(predicted: &LabelSet, actual: &LabelSet) -> Counts {
    let tp = predicted.iter().filter(|&l| actual.contains(l)).count() as u64;
    Counts {
        tp,
        fp: predicted.len() as u64 - tp,
        fn_: actual.len() as u64 - tp,
    }
}

pub fn micro_f1(predicted: &[LabelSet], actual: &[LabelSet]) -> Result<Metrics, MetricsError> {
    if predicted.len() != actual.len() {
        return Err(MetricsError::ShapeMismatch(format!(
            "{} predictions for {} targets",
            predicted.len(),
            actual.len()
        )));
    }
    Ok(predicted
        .iter()
        .zip(actual)
        .map(|(p, a)| count(p, a))
        .fold(Counts::default(), Counts::merge)
        .metrics())
}
