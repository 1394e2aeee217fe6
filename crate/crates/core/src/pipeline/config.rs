//! Experiment configuration.
//!
//! Line-oriented `key = value` pairs grouped under `[section]` headers;
//! `#` starts a comment. Keys before the first header are top-level.
//!
//! ```text
//! name = planted
//! seed = 1
//! output_dir = out
//!
//! [input]
//! graph = graph.nt
//! types = types.nt
//!
//! [walk]
//! max_length = 2
//! steps = both
//!
//! [grid]
//! walk.n_walks = 25, 50, 100
//! ```
//!
//! Every key has a default. Unknown sections or keys are errors. Relative
//! paths are resolved against the directory holding the config file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::codec::Encoding;
use crate::dataset::{SplitPlan, SplitScheme};
use crate::nn::{NadamConfig, NetworkSpec, Preset, TrainConfig};
use crate::rdf::RDF_TYPE;
use crate::rng;
use crate::walker::{LengthStrategy, StepKinds, WalkConfig};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("`{key}` = {value:?}: {reason}")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("{0}")]
    Invalid(String),
}

/// Every accepted key, qualified as `section.key` (top-level keys bare),
/// with its default.
pub const KEYS: &[(&str, &str)] = &[
    ("name", ""),
    ("seed", "0"),
    ("output_dir", "out"),
    ("input.graph", ""),
    ("input.types", ""),
    ("input.type_predicate", RDF_TYPE),
    ("input.strict", "false"),
    ("prep.min_support", "0"),
    ("prep.split", "80/20"),
    ("prep.batch_cap", "5000"),
    ("walk.n_walks", "25"),
    ("walk.max_length", "2"),
    ("walk.length_strategy", "fixed"),
    ("walk.steps", "both"),
    ("walk.avoid_cycles", "false"),
    ("walk.distinct_selection", "false"),
    ("encode.encoding", "superposed"),
    ("network.preset", "final6"),
    ("network.hidden", ""),
    ("network.dropout", "0.2"),
    ("train.epochs", "5"),
    ("train.inner_batch", "256"),
    ("train.learning_rate", "0.002"),
    ("train.beta1", "0.9"),
    ("train.beta2", "0.999"),
    ("train.epsilon", "1e-8"),
    ("eval.threshold", "0.5"),
];

/// Raw key/value pairs plus grid axes, before interpretation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    pub values: BTreeMap<String, String>,
    /// `(qualified key, values)` in file order.
    pub axes: Vec<(String, Vec<String>)>,
    /// Directory relative paths are resolved against.
    pub base_dir: PathBuf,
}

fn known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

/// Drops a `#` comment. Only a `#` at the start of the line or after
/// whitespace opens one, so IRIs with fragments survive.
fn strip_comment(line: &str) -> &str {
    let mut prev = ' ';
    for (i, c) in line.char_indices() {
        if c == '#' && prev.is_whitespace() {
            return &line[..i];
        }
        prev = c;
    }
    line
}

impl ConfigMap {
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self, ConfigError> {
        let mut map = ConfigMap {
            base_dir: base_dir.into(),
            ..Default::default()
        };
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                    line: line_no,
                    reason: "unterminated section header".into(),
                })?;
                section = name.trim().to_string();
                let ok = section == "grid"
                    || KEYS
                        .iter()
                        .any(|(k, _)| k.split_once('.').is_some_and(|(s, _)| s == section));
                if !ok {
                    return Err(ConfigError::Syntax {
                        line: line_no,
                        reason: format!("unknown section [{section}]"),
                    });
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                reason: "expected `key = value`".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if section == "grid" {
                if !known(key) {
                    return Err(ConfigError::UnknownKey(format!("grid.{key}")));
                }
                let values: Vec<String> = value
                    .split(',')
                    .map(|v| v.trim().to_string())
                    .filter(|v| !v.is_empty())
                    .collect();
                if values.is_empty() {
                    return Err(ConfigError::Syntax {
                        line: line_no,
                        reason: format!("grid axis `{key}` has no values"),
                    });
                }
                if map.axes.iter().any(|(k, _)| k == key) {
                    return Err(ConfigError::Syntax {
                        line: line_no,
                        reason: format!("grid axis `{key}` given twice"),
                    });
                }
                map.axes.push((key.to_string(), values));
                continue;
            }
            let qualified = if section.is_empty() {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            if !known(&qualified) {
                return Err(ConfigError::UnknownKey(qualified));
            }
            if map
                .values
                .insert(qualified.clone(), value.to_string())
                .is_some()
            {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    reason: format!("`{qualified}` given twice"),
                });
            }
        }
        Ok(map)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base)
    }

    /// Sets `key` (qualified) to `value`.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), ConfigError> {
        if !known(key) {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        self.values.insert(key.to_string(), value.into());
        Ok(())
    }

    fn get(&self, key: &str) -> &str {
        debug_assert!(known(key), "{key}");
        self.values.get(key).map(String::as_str).unwrap_or_else(|| {
            KEYS.iter()
                .find(|(k, _)| *k == key)
                .map(|(_, d)| *d)
                .unwrap_or("")
        })
    }
}

fn parse<T: FromStr>(map: &ConfigMap, key: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    let value = map.get(key);
    value.parse().map_err(|e: T::Err| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: e.to_string(),
    })
}

fn parse_bool(map: &ConfigMap, key: &str) -> Result<bool, ConfigError> {
    match map.get(key).to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(ConfigError::BadValue {
            key: key.to_string(),
            value: other.to_string(),
            reason: "expected true or false".into(),
        }),
    }
}

/// Fully interpreted configuration of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Dataset name used in reports; defaults to the graph file stem.
    pub name: String,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub graph: PathBuf,
    pub types: Option<PathBuf>,
    pub type_predicate: String,
    pub strict: bool,
    pub min_support: usize,
    pub split: SplitScheme,
    pub batch_cap: usize,
    /// `seed` is derived from the global seed.
    pub walk: WalkConfig,
    pub encoding: Encoding,
    pub preset: Preset,
    /// Replaces the preset's hidden widths when set.
    pub hidden: Option<Vec<usize>>,
    pub dropout: f64,
    /// `seed` is derived from the global seed.
    pub train: TrainConfig,
    /// Grid axes declared in the file; not part of any stage hash.
    pub axes: Vec<(String, Vec<String>)>,
    map: ConfigMap,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_map(ConfigMap::load(path)?)
    }

    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self, ConfigError> {
        Self::from_map(ConfigMap::parse(text, base_dir)?)
    }

    pub fn from_map(map: ConfigMap) -> Result<Self, ConfigError> {
        let resolve = |p: &str| -> PathBuf {
            let p = Path::new(p);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                map.base_dir.join(p)
            }
        };
        let graph_raw = map.get("input.graph");
        if graph_raw.is_empty() {
            return Err(ConfigError::Invalid("`input.graph` is required".into()));
        }
        let graph = resolve(graph_raw);
        let types = Some(map.get("input.types"))
            .filter(|s| !s.is_empty())
            .map(resolve);
        let name = match map.get("name") {
            "" => graph
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into()),
            n => n.to_string(),
        };
        let seed: u64 = parse(&map, "seed")?;

        let walk = WalkConfig {
            n_walks: parse(&map, "walk.n_walks")?,
            max_length: parse(&map, "walk.max_length")?,
            length_strategy: parse::<LengthStrategy>(&map, "walk.length_strategy")?,
            steps: parse::<StepKinds>(&map, "walk.steps")?,
            avoid_cycles: parse_bool(&map, "walk.avoid_cycles")?,
            distinct_selection: parse_bool(&map, "walk.distinct_selection")?,
            seed: rng::derive_seed(seed, b"walk"),
        };
        let hidden = match map.get("network.hidden") {
            "" => None,
            s => Some(
                s.split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|w| !w.is_empty())
                    .map(|w| {
                        w.parse::<usize>().map_err(|e| ConfigError::BadValue {
                            key: "network.hidden".into(),
                            value: s.to_string(),
                            reason: e.to_string(),
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        let train = TrainConfig {
            epochs: parse(&map, "train.epochs")?,
            inner_batch: parse(&map, "train.inner_batch")?,
            dropout_rate: parse(&map, "network.dropout")?,
            optimizer: NadamConfig {
                learning_rate: parse(&map, "train.learning_rate")?,
                beta1: parse(&map, "train.beta1")?,
                beta2: parse(&map, "train.beta2")?,
                epsilon: parse(&map, "train.epsilon")?,
            },
            threshold: parse(&map, "eval.threshold")?,
            seed: rng::derive_seed(seed, b"train"),
        };
        let cfg = ExperimentConfig {
            name,
            seed,
            output_dir: resolve(map.get("output_dir")),
            graph,
            types,
            type_predicate: map.get("input.type_predicate").to_string(),
            strict: parse_bool(&map, "input.strict")?,
            min_support: parse(&map, "prep.min_support")?,
            split: parse(&map, "prep.split")?,
            batch_cap: parse(&map, "prep.batch_cap")?,
            walk,
            encoding: parse(&map, "encode.encoding")?,
            preset: parse(&map, "network.preset")?,
            hidden,
            dropout: parse(&map, "network.dropout")?,
            train,
            axes: map.axes.clone(),
            map,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, value: String, reason: &str| {
            Err(ConfigError::BadValue {
                key: key.into(),
                value,
                reason: reason.into(),
            })
        };
        if self.batch_cap == 0 {
            return bad("prep.batch_cap", "0".into(), "must be at least 1");
        }
        if self.walk.n_walks == 0 {
            return bad("walk.n_walks", "0".into(), "must be at least 1");
        }
        if self.walk.max_length == 0 {
            return bad("walk.max_length", "0".into(), "must be at least 1");
        }
        if self.walk.steps.is_empty() {
            return bad("walk.steps", String::new(), "no step kinds enabled");
        }
        if self.train.inner_batch == 0 {
            return bad("train.inner_batch", "0".into(), "must be at least 1");
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad(
                "network.dropout",
                self.dropout.to_string(),
                "must be in [0, 1)",
            );
        }
        let t = self.train.threshold;
        if !(t > 0.0 && t < 1.0) {
            return bad("eval.threshold", t.to_string(), "must be in (0, 1)");
        }
        if self.hidden.as_ref().is_some_and(|h| h.contains(&0)) {
            return bad(
                "network.hidden",
                format!("{:?}", self.hidden),
                "widths must be positive",
            );
        }
        Ok(())
    }

    /// The raw map this config was built from (for grid overrides).
    pub fn map(&self) -> &ConfigMap {
        &self.map
    }

    /// A copy with `overrides` applied to the raw values.
    pub fn with_overrides(&self, overrides: &[(String, String)]) -> Result<Self, ConfigError> {
        let mut map = self.map.clone();
        for (k, v) in overrides {
            map.set(k, v.clone())?;
        }
        Self::from_map(map)
    }

    pub fn split_plan(&self) -> SplitPlan {
        SplitPlan {
            scheme: self.split,
            batch_cap: self.batch_cap,
            seed: rng::derive_seed(self.seed, b"split"),
        }
    }

    pub fn network_spec(&self, input_width: usize, output_width: usize) -> NetworkSpec {
        match &self.hidden {
            Some(widths) => NetworkSpec::mlp(input_width, widths, output_width, self.dropout),
            None => self.preset.spec(input_width, output_width, self.dropout),
        }
    }

    /// Canonical `key=value` lines for the given sections, in key order.
    ///
    /// Input files contribute their file name and byte length rather than
    /// their full path, so hashes do not depend on where a checkout lives.
    pub fn canonical(&self, sections: &[&str]) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            let section = k.split_once('.').map_or("", |(s, _)| s);
            if sections.contains(&section) {
                out.push_str(k);
                out.push('=');
                out.push_str(&v);
                out.push('\n');
            }
        };
        let file_id = |p: &Path| {
            let len = std::fs::metadata(p).map(|m| m.len()).unwrap_or(0);
            let name = p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            format!("{name}:{len}")
        };
        push("seed", self.seed.to_string());
        push("input.graph", file_id(&self.graph));
        push(
            "input.types",
            self.types.as_deref().map(file_id).unwrap_or_default(),
        );
        push("input.type_predicate", self.type_predicate.clone());
        push("input.strict", self.strict.to_string());
        push("prep.min_support", self.min_support.to_string());
        push("prep.split", self.split.to_string());
        push("prep.batch_cap", self.batch_cap.to_string());
        push("walk.n_walks", self.walk.n_walks.to_string());
        push("walk.max_length", self.walk.max_length.to_string());
        push(
            "walk.length_strategy",
            self.walk.length_strategy.to_string(),
        );
        push("walk.steps", self.walk.steps.to_string());
        push("walk.avoid_cycles", self.walk.avoid_cycles.to_string());
        push(
            "walk.distinct_selection",
            self.walk.distinct_selection.to_string(),
        );
        push("encode.encoding", self.encoding.to_string());
        push("network.preset", self.preset.to_string());
        push(
            "network.hidden",
            self.hidden
                .as_ref()
                .map(|h| {
                    h.iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .unwrap_or_default(),
        );
        push("network.dropout", self.dropout.to_string());
        push("train.epochs", self.train.epochs.to_string());
        push("train.inner_batch", self.train.inner_batch.to_string());
        push(
            "train.learning_rate",
            self.train.optimizer.learning_rate.to_string(),
        );
        push("train.beta1", self.train.optimizer.beta1.to_string());
        push("train.beta2", self.train.optimizer.beta2.to_string());
        push("train.epsilon", self.train.optimizer.epsilon.to_string());
        push("eval.threshold", self.train.threshold.to_string());
        push("eval.name", self.name.clone());
        out
    }

    /// 16 hex digits identifying the settings that feed `sections`.
    pub fn hash(&self, sections: &[&str]) -> String {
        format!(
            "{:016x}",
            rng::derive_seed(0, self.canonical(sections).as_bytes())
        )
    }
}
