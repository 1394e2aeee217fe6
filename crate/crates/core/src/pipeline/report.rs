//! Evaluation report rows: a fixed-width table for people and one
//! `key=value` line per row for scripts.

use std::fmt::Write as _;
use std::str::FromStr;

use super::ExperimentConfig;
use crate::metrics::{Counts, Metrics};

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub dataset: String,
    pub step_category: String,
    pub length: usize,
    pub strategy: String,
    pub n: usize,
    pub avoid_cycles: bool,
    pub distinct: bool,
    pub network: String,
    pub encoding: String,
    /// Test examples scored.
    pub examples: usize,
    pub metrics: Metrics,
}

/// Column order of the key-value line.
pub const COLUMNS: [&str; 16] = [
    "dataset",
    "step_category",
    "length",
    "strategy",
    "n",
    "avoid_cycles",
    "distinct",
    "network",
    "encoding",
    "examples",
    "tp",
    "fp",
    "fn",
    "precision",
    "recall",
    "f1",
];

fn token(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join("_")
}

impl ReportRow {
    pub fn new(cfg: &ExperimentConfig, examples: usize, metrics: Metrics) -> Self {
        let network = match &cfg.hidden {
            Some(h) => format!(
                "{}[{}]",
                cfg.preset,
                h.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("-")
            ),
            None => cfg.preset.to_string(),
        };
        ReportRow {
            dataset: token(&cfg.name),
            step_category: cfg.walk.steps.to_string(),
            length: cfg.walk.max_length,
            strategy: cfg.walk.length_strategy.to_string(),
            n: cfg.walk.n_walks,
            avoid_cycles: cfg.walk.avoid_cycles,
            distinct: cfg.walk.distinct_selection,
            network,
            encoding: cfg.encoding.to_string(),
            examples,
            metrics,
        }
    }

    fn values(&self) -> [String; 16] {
        let c = self.metrics.counts;
        [
            self.dataset.clone(),
            self.step_category.clone(),
            self.length.to_string(),
            self.strategy.clone(),
            self.n.to_string(),
            self.avoid_cycles.to_string(),
            self.distinct.to_string(),
            self.network.clone(),
            self.encoding.clone(),
            self.examples.to_string(),
            c.tp.to_string(),
            c.fp.to_string(),
            c.fn_.to_string(),
            format!("{:.6}", self.metrics.precision),
            format!("{:.6}", self.metrics.recall),
            format!("{:.6}", self.metrics.f1),
        ]
    }

    /// `dataset=… step_category=… … f1=…`
    pub fn kv(&self) -> String {
        COLUMNS
            .iter()
            .zip(self.values())
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl FromStr for ReportRow {
    type Err = String;

    /// Parses a [`ReportRow::kv`] line. Precision, recall and F1 are
    /// recomputed from the counts.
    fn from_str(s: &str) -> Result<Self, String> {
        let mut fields = std::collections::HashMap::new();
        for part in s.split_whitespace() {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| format!("bad field {part:?}"))?;
            fields.insert(k, v);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| format!("missing {k}"));
        fn num<T: FromStr>(k: &str, v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("bad {k} {v:?}"))
        }
        let counts = Counts {
            tp: num("tp", get("tp")?)?,
            fp: num("fp", get("fp")?)?,
            fn_: num("fn", get("fn")?)?,
        };
        Ok(ReportRow {
            dataset: get("dataset")?.to_string(),
            step_category: get("step_category")?.to_string(),
            length: num("length", get("length")?)?,
            strategy: get("strategy")?.to_string(),
            n: num("n", get("n")?)?,
            avoid_cycles: num("avoid_cycles", get("avoid_cycles")?)?,
            distinct: num("distinct", get("distinct")?)?,
            network: get("network")?.to_string(),
            encoding: get("encoding")?.to_string(),
            examples: num("examples", get("examples")?)?,
            metrics: counts.metrics(),
        })
    }
}

const TABLE_HEAD: [&str; 9] = [
    "dataset",
    "length",
    "steps",
    "strategy",
    "n",
    "network",
    "precision",
    "recall",
    "F1",
];

fn table_cells(r: &ReportRow) -> [String; 9] {
    [
        r.dataset.clone(),
        r.length.to_string(),
        r.step_category.clone(),
        r.strategy.clone(),
        r.n.to_string(),
        r.network.clone(),
        format!("{:.4}", r.metrics.precision),
        format!("{:.4}", r.metrics.recall),
        format!("{:.4}", r.metrics.f1),
    ]
}

/// Human-readable table; `None` rows print `error` with the message.
pub(crate) fn table_with_errors(rows: &[Result<&ReportRow, (String, &str)>]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| match r {
            Ok(row) => table_cells(row).to_vec(),
            Err((label, msg)) => vec![label.clone(), format!("error: {msg}")],
        })
        .collect();
    let mut widths: Vec<usize> = TABLE_HEAD.iter().map(|h| h.len()).collect();
    for row in cells.iter().filter(|r| r.len() == TABLE_HEAD.len()) {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: &[String]| {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            let w = widths.get(i).copied().unwrap_or(0);
            if i > 0 {
                s.push_str("  ");
            }
            if i + 1 == cells.len() {
                s.push_str(c);
            } else {
                let _ = write!(s, "{c:<w$}");
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let head: Vec<String> = TABLE_HEAD.iter().map(|h| h.to_string()).collect();
    let mut out = line(&head);
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    for c in &cells {
        out.push_str(&line(c));
    }
    out
}

pub(crate) fn table(rows: &[ReportRow]) -> String {
    table_with_errors(&rows.iter().map(Ok).collect::<Vec<_>>())
}
