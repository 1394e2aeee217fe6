//! Synthetic graphs whose types follow planted rules.
//!
//! Every individual belongs to one of eight classes. Each class plants the
//! structure its rule needs (attributes, an outgoing or incoming
//! relationship, or a one-hop pattern) and sparse background attributes and
//! edges are sprinkled on top. Labels are then computed by evaluating all
//! eight rules on the finished graph, so an individual can carry several
//! types, and finally a fraction of individuals get one label bit flipped.

use std::collections::BTreeSet;
use std::io::{self, Write};

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::codec::{self, EncodedExample, Encoding};
use crate::dataset::{self, LabelSet, LabelVocabulary, Partition, SplitPlan, SplitScheme};
use crate::graph::build_graph;
use crate::metrics::{self, Metrics};
use crate::nn::{self, ModelState, Preset, TrainConfig, TrainTrace};
use crate::pipeline::PipelineError;
pub use crate::rdf::RDF_TYPE;
use crate::rdf::{Term, Triple};
use crate::rng;
use crate::walker::{self, LengthStrategy, StepKinds, WalkConfig};

pub const RESOURCE_NS: &str = "http://example.org/resource/";
pub const PROPERTY_NS: &str = "http://example.org/property/";
pub const ONTOLOGY_NS: &str = "http://example.org/ontology/";

const ATTRIBUTES: usize = 24;
const RELATIONS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedConfig {
    pub individuals: usize,
    /// Fraction of individuals with one corrupted label bit.
    pub label_noise: f64,
    /// Probability of each background attribute.
    pub background_attr: f64,
    /// Probability of each background outgoing edge kind.
    pub background_edge: f64,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            individuals: 2000,
            label_noise: 0.1,
            background_attr: 0.01,
            background_edge: 0.05,
            seed: 7,
        }
    }
}

/// A type rule; all conditions must hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    Attr(usize),
    OutRel(usize),
    InRel(usize),
    /// Outgoing edge to a node carrying the attribute.
    OutTo(usize, usize),
    /// Incoming edge from a node carrying the attribute.
    InFrom(usize, usize),
}

/// The eight planted rules, indexed by type.
pub fn rules() -> [&'static [Condition]; 8] {
    use Condition::*;
    [
        &[Attr(0), Attr(1)],
        &[Attr(2), Attr(3)],
        &[Attr(4), Attr(5)],
        &[Attr(6), OutRel(0)],
        &[Attr(7), InRel(1)],
        &[Attr(8), OutTo(2, 9)],
        &[Attr(10), InFrom(3, 11)],
        &[Attr(12), Attr(13), OutRel(1)],
    ]
}

pub fn attr_iri(a: usize) -> String {
    format!("{PROPERTY_NS}attr{a:02}")
}

pub fn rel_iri(r: usize) -> String {
    format!("{PROPERTY_NS}rel{r}")
}

pub fn node_iri(i: usize) -> String {
    format!("{RESOURCE_NS}e{i:05}")
}

pub fn type_iri(t: usize) -> String {
    format!("{ONTOLOGY_NS}T{t}")
}

#[derive(Debug, Clone)]
pub struct PlantedGraph {
    pub attrs: Vec<BTreeSet<usize>>,
    /// `(from, relation, to)`
    pub edges: BTreeSet<(usize, usize, usize)>,
    /// Labels as the rules define them.
    pub clean_types: Vec<BTreeSet<usize>>,
    /// Labels after noise; what gets published.
    pub types: Vec<BTreeSet<usize>>,
}

impl PlantedGraph {
    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    fn holds(&self, node: usize, c: Condition) -> bool {
        match c {
            Condition::Attr(a) => self.attrs[node].contains(&a),
            Condition::OutRel(r) => self
                .edges
                .range((node, r, 0)..=(node, r, usize::MAX))
                .next()
                .is_some(),
            Condition::InRel(r) => self.edges.iter().any(|&(_, rr, to)| rr == r && to == node),
            Condition::OutTo(r, a) => self
                .edges
                .range((node, r, 0)..=(node, r, usize::MAX))
                .any(|&(_, _, to)| self.attrs[to].contains(&a)),
            Condition::InFrom(r, a) => self
                .edges
                .iter()
                .any(|&(from, rr, to)| rr == r && to == node && self.attrs[from].contains(&a)),
        }
    }

    /// Attribute literals and relationship edges.
    pub fn graph_triples(&self) -> Vec<Triple> {
        let mut out = Vec::new();
        for (i, attrs) in self.attrs.iter().enumerate() {
            for &a in attrs {
                out.push(Triple::new(
                    Term::iri(node_iri(i)),
                    Term::iri(attr_iri(a)),
                    Term::literal(format!("v{i}_{a}")),
                ));
            }
        }
        for &(from, r, to) in &self.edges {
            out.push(Triple::new(
                Term::iri(node_iri(from)),
                Term::iri(rel_iri(r)),
                Term::iri(node_iri(to)),
            ));
        }
        out
    }

    pub fn type_triples(&self) -> Vec<Triple> {
        let mut out = Vec::new();
        for (i, ts) in self.types.iter().enumerate() {
            for &t in ts {
                out.push(Triple::new(
                    Term::iri(node_iri(i)),
                    Term::iri(RDF_TYPE),
                    Term::iri(type_iri(t)),
                ));
            }
        }
        out
    }

    pub fn write_ntriples<W: Write>(triples: &[Triple], w: &mut W) -> io::Result<()> {
        for t in triples {
            writeln!(w, "{t}")?;
        }
        Ok(())
    }
}

pub fn generate(cfg: &PlantedConfig) -> PlantedGraph {
    let n = cfg.individuals;
    assert!(n >= 2, "need at least two individuals");
    let rules = rules();
    let mut rng = rng::stream(cfg.seed, "planted");
    let class: Vec<usize> = (0..n).map(|_| rng.random_range(0..rules.len())).collect();

    let mut attrs: Vec<BTreeSet<usize>> = (0..n)
        .map(|_| {
            (0..ATTRIBUTES)
                .filter(|_| rng.random_bool(cfg.background_attr))
                .collect()
        })
        .collect();
    for (i, &c) in class.iter().enumerate() {
        for cond in rules[c] {
            if let Condition::Attr(a) = cond {
                attrs[i].insert(*a);
            }
        }
    }

    let mut edges = BTreeSet::new();
    let other = |rng: &mut rand_chacha::ChaCha8Rng, i: usize| loop {
        let j = rng.random_range(0..n);
        if j != i {
            break j;
        }
    };
    for i in 0..n {
        for r in 0..RELATIONS {
            if rng.random_bool(cfg.background_edge) {
                edges.insert((i, r, other(&mut rng, i)));
            }
        }
    }
    for (i, &c) in class.iter().enumerate() {
        for cond in rules[c] {
            match *cond {
                Condition::Attr(_) => {}
                Condition::OutRel(r) => {
                    edges.insert((i, r, other(&mut rng, i)));
                }
                Condition::InRel(r) => {
                    edges.insert((other(&mut rng, i), r, i));
                }
                Condition::OutTo(r, a) => {
                    let j = other(&mut rng, i);
                    attrs[j].insert(a);
                    edges.insert((i, r, j));
                }
                Condition::InFrom(r, a) => {
                    let j = other(&mut rng, i);
                    attrs[j].insert(a);
                    edges.insert((j, r, i));
                }
            }
        }
    }

    let mut g = PlantedGraph {
        attrs,
        edges,
        clean_types: Vec::new(),
        types: Vec::new(),
    };
    g.clean_types = (0..n)
        .map(|i| {
            (0..rules.len())
                .filter(|&t| rules[t].iter().all(|&c| g.holds(i, c)))
                .collect()
        })
        .collect();

    let all: Vec<usize> = (0..rules.len()).collect();
    g.types = g
        .clean_types
        .iter()
        .map(|clean| {
            let mut ts = clean.clone();
            if rng.random_bool(cfg.label_noise) {
                let t = *all.choose(&mut rng).expect("rules non-empty");
                if !ts.remove(&t) {
                    ts.insert(t);
                }
                if ts.is_empty() {
                    let u = *all
                        .iter()
                        .filter(|&&u| u != t)
                        .collect::<Vec<_>>()
                        .choose(&mut rng)
                        .expect("more than one rule");
                    ts.insert(*u);
                }
            }
            ts
        })
        .collect();
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_individual_is_typed() {
        let g = generate(&PlantedConfig {
            individuals: 400,
            ..Default::default()
        });
        assert_eq!(g.len(), 400);
        assert!(g.clean_types.iter().all(|t| !t.is_empty()));
        assert!(g.types.iter().all(|t| !t.is_empty()));
        let noisy = g
            .types
            .iter()
            .zip(&g.clean_types)
            .filter(|(a, b)| a != b)
            .count();
        assert!((20..=60).contains(&noisy), "{noisy}");
    }

    #[test]
    fn noise_free_matches_rules() {
        let g = generate(&PlantedConfig {
            individuals: 300,
            label_noise: 0.0,
            ..Default::default()
        });
        assert_eq!(g.types, g.clean_types);
        let counts: Vec<usize> = (0..8)
            .map(|t| g.types.iter().filter(|s| s.contains(&t)).count())
            .collect();
        assert!(counts.iter().all(|&c| c >= 20), "{counts:?}");
    }

    #[test]
    fn seeded() {
        let cfg = PlantedConfig {
            individuals: 100,
            ..Default::default()
        };
        assert_eq!(
            generate(&cfg).graph_triples(),
            generate(&cfg).graph_triples()
        );
    }
}

/// One in-memory train/evaluate run on a planted graph: walk, split 70/20/10,
/// encode with the training vocabulary, train, and score the test partition.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub planted: PlantedConfig,
    pub walk: WalkConfig,
    pub encoding: Encoding,
    pub preset: Preset,
    pub train: TrainConfig,
    pub split_seed: u64,
}

impl Default for Benchmark {
    fn default() -> Self {
        Benchmark {
            planted: PlantedConfig::default(),
            walk: WalkConfig {
                n_walks: 25,
                max_length: 2,
                length_strategy: LengthStrategy::Fixed,
                steps: StepKinds::BOTH,
                seed: 1,
                ..Default::default()
            },
            encoding: Encoding::Superposed,
            preset: Preset::Final6,
            train: TrainConfig {
                epochs: 8,
                seed: 3,
                ..Default::default()
            },
            split_seed: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkResult {
    pub labels: LabelVocabulary,
    pub vocabulary: usize,
    pub trace: TrainTrace,
    pub predicted: Vec<LabelSet>,
    pub actual: Vec<LabelSet>,
    pub test: Metrics,
}

pub fn run_benchmark(b: &Benchmark) -> Result<BenchmarkResult, PipelineError> {
    let planted = generate(&b.planted);
    let graph = build_graph(&planted.graph_triples());
    let ds = dataset::extract_targets(&graph, &planted.type_triples(), 0)?;
    let nodes: Vec<_> = ds.individuals.iter().map(|i| i.node).collect();
    let features = walker::extract_all(&ds.graph, &nodes, &b.walk)?;
    let rows: Vec<usize> = (0..ds.individuals.len()).collect();
    let parts = dataset::split(
        &rows,
        &SplitPlan {
            scheme: SplitScheme::TrainValTest70_20_10,
            seed: b.split_seed,
            ..Default::default()
        },
    );
    let vocab = codec::build_vocabulary(
        parts
            .items(Partition::Train)
            .flat_map(|&i| features[i].iter().map(|f| f.as_str())),
    );
    let encode = |&i: &usize| {
        let fs: Vec<&str> = features[i].iter().map(|f| f.as_str()).collect();
        EncodedExample {
            node: ds.graph.name_of(ds.individuals[i].node).to_string(),
            input: b.encoding.encode(&fs, &vocab),
            targets: ds.individuals[i].targets.clone(),
        }
    };
    let train_batches: Vec<Vec<EncodedExample>> = parts
        .batches(Partition::Train)
        .iter()
        .map(|batch| batch.iter().map(encode).collect())
        .collect();
    let val: Vec<EncodedExample> = parts.items(Partition::Validation).map(encode).collect();
    let test: Vec<EncodedExample> = parts.items(Partition::Test).map(encode).collect();

    let spec = b.preset.spec(
        b.encoding.input_width(&vocab),
        ds.labels.len(),
        b.train.dropout_rate,
    );
    let mut state = ModelState::new(spec, &b.train)?;
    let trace = nn::train(&mut state, &train_batches, Some(&val), &b.train)?;
    let refs: Vec<&EncodedExample> = test.iter().collect();
    let probs = nn::predict_batches(&state.network, &refs, 512)?;
    let predicted = metrics::predict_labels(probs.view(), b.train.threshold);
    let actual: Vec<LabelSet> = test.into_iter().map(|e| e.targets).collect();
    let test = metrics::micro_f1(&predicted, &actual)?;
    Ok(BenchmarkResult {
        labels: ds.labels,
        vocabulary: vocab.len(),
        trace,
        predicted,
        actual,
        test,
    })
}
