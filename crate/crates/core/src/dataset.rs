//! Labeled datasets: joining individuals with their type assertions,
//! min-support filtering, and batch-level train/validation/test splitting.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{self, BufRead, Write};

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::graph::{node_key, NodeId, SemanticGraph};
use crate::rdf::Triple;
use crate::rng;

pub const DEFAULT_BATCH_CAP: usize = 5000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PrepError {
    #[error("no labels retained with min_support = {0}")]
    NoLabelsRetained(usize),
    #[error("malformed dataset line {line}: {reason}")]
    Format { line: usize, reason: String },
}

/// Sorted, duplicate-free set of label indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LabelSet(Vec<u32>);

impl LabelSet {
    pub fn new(mut labels: Vec<u32>) -> Self {
        labels.sort_unstable();
        labels.dedup();
        LabelSet(labels)
    }

    pub fn contains(&self, label: u32) -> bool {
        self.0.binary_search(&label).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn to_dense(&self, width: usize) -> Vec<bool> {
        let mut v = vec![false; width];
        for &l in &self.0 {
            v[l as usize] = true;
        }
        v
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for LabelSet {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Ok(LabelSet::default());
        }
        s.split(',')
            .map(str::parse)
            .collect::<Result<Vec<u32>, _>>()
            .map(LabelSet::new)
    }
}

/// Dense label indices, assigned in lexicographic order of the type IRI.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelVocabulary {
    types: Vec<String>,
    support: Vec<usize>,
    index: HashMap<String, u32>,
}

impl LabelVocabulary {
    pub fn from_parts(types: Vec<String>, support: Vec<usize>) -> Self {
        assert_eq!(types.len(), support.len());
        let index = types
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        LabelVocabulary {
            types,
            support,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn index_of(&self, type_iri: &str) -> Option<u32> {
        self.index.get(type_iri).copied()
    }

    pub fn type_of(&self, label: u32) -> &str {
        &self.types[label as usize]
    }

    pub fn support(&self, label: u32) -> usize {
        self.support[label as usize]
    }

    /// `<label-idx>\t<type-iri>\t<support>` per line.
    pub fn write_tsv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for (i, (t, s)) in self.types.iter().zip(&self.support).enumerate() {
            writeln!(w, "{i}\t{t}\t{s}")?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(r: R) -> Result<Self, PrepError> {
        let mut types = Vec::new();
        let mut support = Vec::new();
        for (line_no, line) in data_lines(r) {
            let line = line?;
            let fields: Vec<&str> = line.split('\t').collect();
            let bad = |reason: &str| PrepError::Format {
                line: line_no,
                reason: reason.to_string(),
            };
            if fields.len() != 3 {
                return Err(bad("expected 3 tab-separated fields"));
            }
            if fields[0].parse::<usize>().ok() != Some(types.len()) {
                return Err(bad("label indices must be dense and ascending"));
            }
            types.push(fields[1].to_string());
            support.push(fields[2].parse().map_err(|_| bad("bad support count"))?);
        }
        Ok(Self::from_parts(types, support))
    }
}

/// Lines that are neither empty nor `#` header lines, numbered from 1.
pub(crate) fn data_lines<R: BufRead>(
    r: R,
) -> impl Iterator<Item = (usize, Result<String, PrepError>)> {
    r.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(l) if l.is_empty() || l.starts_with('#') => None,
        Ok(l) => Some((i + 1, Ok(l))),
        Err(e) => Some((
            i + 1,
            Err(PrepError::Format {
                line: i + 1,
                reason: e.to_string(),
            }),
        )),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledIndividual {
    pub node: NodeId,
    pub targets: LabelSet,
}

#[derive(Debug, Clone)]
pub struct PreparedDataset {
    pub labels: LabelVocabulary,
    pub individuals: Vec<LabeledIndividual>,
    pub graph: SemanticGraph,
}

/// Joins type assertions with the graph's nodes and drops everything that
/// ends up without a label.
///
/// Labels with support below `min_support` are dropped, then individuals left
/// with no label, repeating until neither step changes anything. Nodes that
/// are not retained individuals are removed from the returned graph.
pub fn extract_targets<'a>(
    g: &SemanticGraph,
    type_triples: impl IntoIterator<Item = &'a Triple>,
    min_support: usize,
) -> Result<PreparedDataset, PrepError> {
    let mut types_of: BTreeMap<NodeId, BTreeSet<String>> = BTreeMap::new();
    for t in type_triples {
        if let Some(node) = g.node_id(&node_key(&t.subject)) {
            types_of
                .entry(node)
                .or_default()
                .insert(t.object.value.clone());
        }
    }

    loop {
        let mut support: BTreeMap<&str, usize> = BTreeMap::new();
        for ts in types_of.values() {
            for t in ts {
                *support.entry(t.as_str()).or_default() += 1;
            }
        }
        let weak: BTreeSet<String> = support
            .iter()
            .filter(|&(_, &c)| c < min_support)
            .map(|(t, _)| t.to_string())
            .collect();
        let before = types_of.len();
        for ts in types_of.values_mut() {
            ts.retain(|t| !weak.contains(t));
        }
        types_of.retain(|_, ts| !ts.is_empty());
        if weak.is_empty() && types_of.len() == before {
            break;
        }
    }

    let mut support: BTreeMap<String, usize> = BTreeMap::new();
    for ts in types_of.values() {
        for t in ts {
            *support.entry(t.clone()).or_default() += 1;
        }
    }
    if support.is_empty() {
        return Err(PrepError::NoLabelsRetained(min_support));
    }
    let (types, counts): (Vec<String>, Vec<usize>) = support.into_iter().unzip();
    let labels = LabelVocabulary::from_parts(types, counts);

    let reduced = g.retain_nodes(|n| types_of.contains_key(&n));
    let individuals = types_of
        .iter()
        .map(|(&old, ts)| LabeledIndividual {
            node: reduced
                .node_id(g.name_of(old))
                .expect("retained node present in reduced graph"),
            targets: LabelSet::new(ts.iter().map(|t| labels.index_of(t).unwrap()).collect()),
        })
        .collect();
    Ok(PreparedDataset {
        labels,
        individuals,
        graph: reduced,
    })
}

/// `<node-iri>\t<label-idx>,<label-idx>,...` per line.
pub fn write_labeled<W: Write>(
    w: &mut W,
    g: &SemanticGraph,
    items: &[LabeledIndividual],
) -> io::Result<()> {
    for it in items {
        writeln!(w, "{}\t{}", g.name_of(it.node), it.targets)?;
    }
    Ok(())
}

/// Reads labeled individuals as `(node-iri, labels)` pairs.
pub fn read_labeled<R: BufRead>(r: R) -> Result<Vec<(String, LabelSet)>, PrepError> {
    let mut out = Vec::new();
    for (line_no, line) in data_lines(r) {
        let line = line?;
        let bad = |reason: &str| PrepError::Format {
            line: line_no,
            reason: reason.to_string(),
        };
        let (node, labels) = line.split_once('\t').ok_or_else(|| bad("missing tab"))?;
        let labels: LabelSet = labels.parse().map_err(|_| bad("bad label list"))?;
        out.push((node.to_string(), labels));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitScheme {
    TrainTest80_20,
    TrainValTest70_20_10,
}

impl SplitScheme {
    /// Fractions in tenths for (train, validation, test).
    fn tenths(self) -> [usize; 3] {
        match self {
            SplitScheme::TrainTest80_20 => [8, 0, 2],
            SplitScheme::TrainValTest70_20_10 => [7, 2, 1],
        }
    }

    /// Fewest batches that can realize the fractions exactly.
    fn granularity(self) -> usize {
        match self {
            SplitScheme::TrainTest80_20 => 5,
            SplitScheme::TrainValTest70_20_10 => 10,
        }
    }
}

impl std::str::FromStr for SplitScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "80/20" | "train-test" => Ok(SplitScheme::TrainTest80_20),
            "70/20/10" | "train-val-test" => Ok(SplitScheme::TrainValTest70_20_10),
            _ => Err(format!(
                "unknown split scheme {s:?} (expected 80/20 or 70/20/10)"
            )),
        }
    }
}

impl fmt::Display for SplitScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitScheme::TrainTest80_20 => "80/20",
            SplitScheme::TrainValTest70_20_10 => "70/20/10",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitPlan {
    pub scheme: SplitScheme,
    pub batch_cap: usize,
    pub seed: u64,
}

impl Default for SplitPlan {
    fn default() -> Self {
        SplitPlan {
            scheme: SplitScheme::TrainTest80_20,
            batch_cap: DEFAULT_BATCH_CAP,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Partition {
    Train,
    Validation,
    Test,
}

impl Partition {
    pub const ALL: [Partition; 3] = [Partition::Train, Partition::Validation, Partition::Test];

    pub fn name(self) -> &'static str {
        match self {
            Partition::Train => "train",
            Partition::Validation => "val",
            Partition::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partitions<T> {
    pub train: Vec<Vec<T>>,
    pub validation: Vec<Vec<T>>,
    pub test: Vec<Vec<T>>,
}

impl<T> Partitions<T> {
    pub fn batches(&self, p: Partition) -> &[Vec<T>] {
        match p {
            Partition::Train => &self.train,
            Partition::Validation => &self.validation,
            Partition::Test => &self.test,
        }
    }

    pub fn len(&self, p: Partition) -> usize {
        self.batches(p).iter().map(Vec::len).sum()
    }

    pub fn items(&self, p: Partition) -> impl Iterator<Item = &T> {
        self.batches(p).iter().flatten()
    }
}

/// Shuffles `items`, cuts them into near-equal batches of at most
/// `plan.batch_cap`, and hands whole batches to the partitions.
///
/// At least as many batches are cut as the scheme needs to realize its
/// fractions exactly (5 for 80/20, 10 for 70/20/10), so small datasets
/// still get a test partition.
pub fn split<T: Clone>(items: &[T], plan: &SplitPlan) -> Partitions<T> {
    assert!(plan.batch_cap >= 1, "batch_cap must be at least 1");
    let n = items.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::stream(plan.seed, "split"));

    let batch_count = n
        .div_ceil(plan.batch_cap)
        .max(plan.scheme.granularity().min(n));
    let mut batches = Vec::with_capacity(batch_count);
    let mut start = 0;
    for b in 0..batch_count {
        let size = n / batch_count + usize::from(b < n % batch_count);
        batches.push(
            order[start..start + size]
                .iter()
                .map(|&i| items[i].clone())
                .collect::<Vec<T>>(),
        );
        start += size;
    }

    let counts = apportion(batch_count, plan.scheme.tenths());
    let mut it = batches.into_iter();
    let mut take = |k: usize| it.by_ref().take(k).collect::<Vec<_>>();
    Partitions {
        train: take(counts[0]),
        validation: take(counts[1]),
        test: take(counts[2]),
    }
}

/// Largest-remainder apportionment of `total` by weights in tenths.
fn apportion(total: usize, tenths: [usize; 3]) -> [usize; 3] {
    let mut counts = tenths.map(|t| total * t / 10);
    let mut rest = total - counts.iter().sum::<usize>();
    let mut order = [0usize, 1, 2];
    order.sort_by_key(|&i| std::cmp::Reverse((total * tenths[i]) % 10));
    for &i in order.iter().cycle() {
        if rest == 0 {
            break;
        }
        if tenths[i] > 0 {
            counts[i] += 1;
            rest -= 1;
        }
    }
    counts
}
