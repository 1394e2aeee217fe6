//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use kg_typer::graph::{build_graph, SemanticGraph};
use kg_typer::nn::{bce_loss, Inputs, Network, Preset};
use kg_typer::rdf::{Term, Triple};
use kg_typer::walker::{LengthStrategy, StepKinds};
use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const NS: &str = "http://t.example/";

/// `(subject, predicate, object, object_is_literal)` with local names.
pub type Spec = [(&'static str, &'static str, &'static str, bool)];

pub fn triples(spec: &Spec) -> Vec<Triple> {
    spec.iter()
        .map(|&(s, p, o, lit)| {
            Triple::new(
                Term::iri(format!("{NS}{s}")),
                Term::iri(format!("{NS}p/{p}")),
                if lit {
                    Term::literal(o)
                } else {
                    Term::iri(format!("{NS}{o}"))
                },
            )
        })
        .collect()
}

/// Five small graphs covering chains, hubs, cycles with self-loops,
/// dead ends and parallel same-named edges.
pub fn hand_graphs() -> Vec<(&'static str, &'static Spec)> {
    const CHAIN: &Spec = &[
        ("a", "name", "A", true),
        ("a", "next", "b", false),
        ("b", "next", "c", false),
        ("b", "age", "3", true),
        ("c", "next", "d", false),
        ("d", "name", "D", true),
        ("d", "size", "9", true),
    ];
    const STAR: &Spec = &[
        ("hub", "kind", "h", true),
        ("hub", "link", "x1", false),
        ("hub", "link", "x2", false),
        ("hub", "owns", "x3", false),
        ("y1", "points", "hub", false),
        ("y2", "points", "hub", false),
        ("y3", "likes", "hub", false),
        ("x1", "kind", "leaf", true),
        ("y1", "kind", "leaf", true),
        ("x3", "colour", "red", true),
    ];
    const CYCLE: &Spec = &[
        ("n1", "to", "n2", false),
        ("n2", "to", "n3", false),
        ("n3", "to", "n4", false),
        ("n4", "to", "n1", false),
        ("n1", "self", "n1", false),
        ("n2", "tag", "t", true),
        ("n3", "back", "n2", false),
    ];
    const SPARSE: &Spec = &[
        ("lonely", "name", "L", true),
        ("lonely", "name", "L2", true),
        ("p", "knows", "q", false),
        ("q", "age", "1", true),
        ("r", "knows", "s", false),
        ("s", "knows", "r", false),
        ("sink", "name", "S", true),
        ("src", "feeds", "sink", false),
    ];
    const PARALLEL: &Spec = &[
        ("m", "rel", "o1", false),
        ("m", "rel", "o2", false),
        ("m", "rel", "o3", false),
        ("m", "other", "o1", false),
        ("i1", "rel", "m", false),
        ("i2", "rel", "m", false),
        ("o1", "w", "1", true),
        ("o2", "w", "2", true),
        ("o2", "v", "2", true),
        ("o3", "rel", "i1", false),
    ];
    vec![
        ("chain", CHAIN),
        ("star", STAR),
        ("cycle", CYCLE),
        ("sparse", SPARSE),
        ("parallel", PARALLEL),
    ]
}

pub fn graph_of(spec: &Spec) -> SemanticGraph {
    build_graph(&triples(spec))
}

/// Adjacency rebuilt straight from the fixture, without the graph store.
struct OracleGraph {
    attrs: BTreeMap<&'static str, BTreeSet<&'static str>>,
    out: BTreeMap<&'static str, BTreeSet<(&'static str, &'static str)>>,
    inc: BTreeMap<&'static str, BTreeSet<(&'static str, &'static str)>>,
}

impl OracleGraph {
    fn new(spec: &Spec) -> Self {
        let mut g = OracleGraph {
            attrs: BTreeMap::new(),
            out: BTreeMap::new(),
            inc: BTreeMap::new(),
        };
        for &(s, p, o, lit) in spec {
            if lit {
                g.attrs.entry(s).or_default().insert(p);
            } else {
                g.out.entry(s).or_default().insert((p, o));
                g.inc.entry(o).or_default().insert((p, s));
            }
        }
        g
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Attr,
    Rel,
    InRel,
    Out,
    In,
}

fn render(kind: Kind, name: &str) -> String {
    match kind {
        Kind::Attr => format!("hasAttr_{name}"),
        Kind::Rel => format!("hasRel_{name}"),
        Kind::InRel => format!("hasInRel_{name}"),
        Kind::Out => format!("{name}->"),
        Kind::In => format!("{name}<-"),
    }
}

fn canonical(steps: &[(Kind, String)]) -> String {
    let mut out: Vec<String> = Vec::new();
    let mut run: Vec<String> = Vec::new();
    for (k, label) in steps {
        if matches!(k, Kind::Out | Kind::In) {
            run.sort();
            out.append(&mut run);
            out.push(label.clone());
        } else {
            run.push(label.clone());
        }
    }
    run.sort();
    out.append(&mut run);
    out.join(",")
}

pub struct OracleWalk {
    pub max_length: usize,
    pub strategy: LengthStrategy,
    pub steps: StepKinds,
    pub avoid_cycles: bool,
}

fn enabled(steps: StepKinds, k: Kind) -> bool {
    use kg_typer::walker::StepKind as S;
    steps.contains(match k {
        Kind::Attr => S::HasAttr,
        Kind::Rel => S::HasRel,
        Kind::InRel => S::HasInRel,
        Kind::Out => S::MoveOut,
        Kind::In => S::MoveIn,
    })
}

/// Every canonical feature a walk from `start` can legally produce.
pub fn enumerate_walks(spec: &Spec, start: &'static str, w: &OracleWalk) -> BTreeSet<String> {
    let g = OracleGraph::new(spec);
    let lengths: Vec<usize> = match w.strategy {
        LengthStrategy::Fixed => vec![w.max_length],
        LengthStrategy::Variable => (1..=w.max_length).collect(),
    };
    let mut out = BTreeSet::new();
    for l in lengths {
        let mut path = Vec::new();
        let mut visited = vec![start];
        dfs(&g, w, l, start, &mut visited, &mut path, &mut out);
    }
    out
}

fn dfs(
    g: &OracleGraph,
    w: &OracleWalk,
    l: usize,
    at: &'static str,
    visited: &mut Vec<&'static str>,
    path: &mut Vec<(Kind, String)>,
    out: &mut BTreeSet<String>,
) {
    if path.len() == l {
        out.insert(canonical(path));
        return;
    }
    // (kind, name, destination)
    let mut options: Vec<(Kind, &str, &'static str)> = Vec::new();
    let empty = BTreeSet::new();
    for &a in g.attrs.get(at).unwrap_or(&empty) {
        options.push((Kind::Attr, a, at));
    }
    let none = BTreeSet::new();
    let outs = g.out.get(at).unwrap_or(&none);
    let ins = g.inc.get(at).unwrap_or(&none);
    for &(r, _) in outs {
        options.push((Kind::Rel, r, at));
    }
    for &(r, _) in ins {
        options.push((Kind::InRel, r, at));
    }
    if l > 1 {
        for &(r, n) in outs {
            if !(w.avoid_cycles && visited.contains(&n)) {
                options.push((Kind::Out, r, n));
            }
        }
        for &(r, n) in ins {
            if !(w.avoid_cycles && visited.contains(&n)) {
                options.push((Kind::In, r, n));
            }
        }
    }
    options.retain(|(k, _, _)| enabled(w.steps, *k));
    if options.is_empty() {
        // dead end: the walk stops with what it has
        if !path.is_empty() {
            out.insert(canonical(path));
        }
        return;
    }
    for (k, name, dest) in options {
        path.push((k, render(k, name)));
        let moved = matches!(k, Kind::Out | Kind::In);
        if moved && w.avoid_cycles {
            visited.push(dest);
        }
        dfs(g, w, l, dest, visited, path, out);
        if moved && w.avoid_cycles {
            visited.pop();
        }
        path.pop();
    }
}

/// Local names of the nodes in a fixture (subjects and IRI objects).
pub fn nodes_of(spec: &Spec) -> BTreeSet<&'static str> {
    let mut out = BTreeSet::new();
    for &(s, _, o, lit) in spec {
        out.insert(s);
        if !lit {
            out.insert(o);
        }
    }
    out
}

pub fn step_categories() -> [(&'static str, StepKinds); 3] {
    [
        ("stay", StepKinds::STAY),
        ("move", StepKinds::MOVE),
        ("both", StepKinds::BOTH),
    ]
}

/// Deterministic inputs and 0/1 targets for gradient checks.
pub fn toy_batch(
    rows: usize,
    inputs: usize,
    outputs: usize,
    seed: u64,
) -> (Array2<f64>, Array2<f64>) {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Array2::from_shape_fn((rows, inputs), |_| rng.random_range(-1.0..1.0));
    let y = Array2::from_shape_fn((rows, outputs), |_| {
        f64::from(u8::from(rng.random_bool(0.5)))
    });
    (x, y)
}

fn loss(net: &Network, x: ArrayView2<f64>, y: ArrayView2<f64>, mask_seed: u64) -> f64 {
    // the same seed reproduces the same dropout masks on every evaluation
    let cache = net
        .forward_train(Inputs::Dense(x), &mut ChaCha8Rng::seed_from_u64(mask_seed))
        .unwrap();
    bce_loss(cache.probs().view(), y).unwrap()
}

/// Relative error between analytic and central-difference gradients:
/// `|a - n| / max(|a|, |n|, floor)`.
pub fn relative_error(a: f64, n: f64, floor: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(floor)
}

pub struct GradCheck {
    pub max_rel_error: f64,
    pub parameters: usize,
}

/// Central differences with step `h` over every parameter of `preset` at
/// toy widths 16 -> 8 -> 4 on a 5-example batch.
pub fn gradient_check(preset: Preset, h: f64, floor: f64) -> GradCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut net = Network::new(preset.toy_spec(16, 8, 4), &mut rng).unwrap();
    // move batch-norm scale/shift off their initial values so their
    // gradients are generic
    for layer in net.layers_mut() {
        if let Some(bn) = &mut layer.batch_norm {
            bn.gamma.mapv_inplace(|g| g + 0.3);
            bn.beta.mapv_inplace(|b| b + 0.1);
        }
    }
    let (x, y) = toy_batch(5, 16, 4, 21);
    let mask_seed = 5;
    let cache = net
        .forward_train(
            Inputs::Dense(x.view()),
            &mut ChaCha8Rng::seed_from_u64(mask_seed),
        )
        .unwrap();
    let grads = net.backward(&cache, y.view()).unwrap();
    let analytic: Vec<Vec<f64>> = grads.slices().iter().map(|s| s.to_vec()).collect();

    let mut worst = 0.0f64;
    let mut count = 0;
    for (pi, g) in analytic.iter().enumerate() {
        for (j, &a) in g.iter().enumerate() {
            let orig = net.params_mut()[pi][j];
            net.params_mut()[pi][j] = orig + h;
            let up = loss(&net, x.view(), y.view(), mask_seed);
            net.params_mut()[pi][j] = orig - h;
            let down = loss(&net, x.view(), y.view(), mask_seed);
            net.params_mut()[pi][j] = orig;
            let numeric = (up - down) / (2.0 * h);
            worst = worst.max(relative_error(a, numeric, floor));
            count += 1;
        }
    }
    GradCheck {
        max_rel_error: worst,
        parameters: count,
    }
}

/// Fifty lines of N-Triples: escapes, datatypes, language tags, blank
/// nodes, comments and five malformed statements.
pub const CORPUS: &str = include_str!("../data/corpus.nt");

/// Line numbers of the malformed statements in [`CORPUS`].
pub const CORPUS_MALFORMED: [usize; 5] = [15, 21, 27, 33, 40];

/// The triples [`CORPUS`] must yield, in file order.
pub fn corpus_expected() -> Vec<Triple> {
    let x = |s: &str| Term::iri(format!("http://x/{s}"));
    let p = |s: &str| Term::iri(format!("http://x/p/{s}"));
    let lit = Term::literal;
    let b = Term::blank;
    let t = Triple::new;
    vec![
        t(x("a"), p("name"), lit("Alice")),
        t(x("a"), p("knows"), x("b")),
        t(x("b"), p("name"), lit("Bob")),
        t(x("b"), p("age"), lit("42")),
        t(b("b0"), p("member"), x("a")),
        t(x("a"), p("friend"), b("b0")),
        t(x("c"), p("quote"), lit("say \"hi\"")),
        t(x("c"), p("lines"), lit("one\ntwo")),
        t(x("c"), p("tab"), lit("a\tb")),
        t(x("c"), p("uni"), lit("caf\u{e9}")),
        t(x("c"), p("emoji"), lit("\u{1F600}")),
        t(x("c"), p("back"), lit("back\\slash")),
        t(x("d"), p("label"), lit("chat")),
        t(x("d"), p("next"), x("e")),
        t(x("e"), p("next"), x("f")),
        t(x("e"), p("note"), lit("v")),
        t(x("fA"), p("z"), lit("z")),
        t(x("g"), p("empty"), lit("")),
        t(x("g"), p("date"), lit("2020-01-01")),
        t(b("node1"), p("name"), lit("anon")),
        t(b("node1"), p("knows"), b("b0")),
        t(x("h"), p("cr"), lit("a\rb")),
        t(x("h"), p("apos"), lit("it's")),
        t(x("h"), p("hash"), lit("#not a comment")),
        t(x("h"), p("dot"), lit("ends with .")),
        t(
            x("i"),
            Term::iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"),
            x("T1"),
        ),
        t(x("i"), p("score"), lit("1.5e3")),
        t(x("i"), p("flag"), lit("true")),
        t(x("j"), p("knows"), x("i")),
        t(x("j"), p("name"), lit("J")),
        t(x("k"), p("multi"), lit("x y")),
        t(x("k"), p("name"), lit("K")),
        t(
            Term::iri("urn:isbn:0451450523"),
            p("title"),
            lit("urn subject"),
        ),
        t(x("l#frag"), p("ref"), x("k")),
        t(x("l#frag"), p("name"), lit("L")),
        t(b("b0"), p("name"), lit("blank again")),
        t(x("m"), p("q"), lit("\\\"")),
        t(x("m"), p("r"), x("a")),
        t(x("m"), p("name"), lit("M")),
    ]
}

/// A scratch directory holding a copy of the bundled 200-individual planted
/// dataset and its `experiment.conf`.
pub struct Workspace {
    pub dir: tempfile::TempDir,
}

impl Workspace {
    pub fn new() -> Self {
        let src = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/planted200");
        let dir = tempfile::tempdir().unwrap();
        for f in ["graph.nt", "types.nt", "experiment.conf"] {
            std::fs::copy(src.join(f), dir.path().join(f)).unwrap();
        }
        Workspace { dir }
    }

    pub fn path(&self, name: &str) -> std::path::PathBuf {
        self.dir.path().join(name)
    }

    pub fn config_path(&self) -> std::path::PathBuf {
        self.path("experiment.conf")
    }

    /// The experiment config with `overrides` applied (qualified keys).
    pub fn config(&self, overrides: &[(&str, &str)]) -> kg_typer::pipeline::ExperimentConfig {
        let base = kg_typer::pipeline::ExperimentConfig::load(&self.config_path()).unwrap();
        let o: Vec<(String, String)> = overrides
            .iter()
            .map(|&(k, v)| (k.to_string(), v.to_string()))
            .collect();
        base.with_overrides(&o).unwrap()
    }
}

/// Every file under `root`, keyed by path relative to it.
pub fn tree(root: &std::path::Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &std::path::Path, dir: &std::path::Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}
