//! Random-walk feature extraction.
//!
//! A walk starts at the individual being described and takes `l` steps. A
//! step either records something present at the current node and stays there
//! (an attribute, an outgoing or an incoming relationship) or moves across an
//! outgoing or incoming edge. The ordered step labels form one boolean
//! feature; `n` walks give up to `n` distinct features per individual.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{NameId, NodeId, SemanticGraph};
use crate::rng;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WalkError {
    #[error("start node {0:?} is not in the graph")]
    StartNotInGraph(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StepKind {
    HasAttr,
    HasRel,
    HasInRel,
    MoveOut,
    MoveIn,
}

impl StepKind {
    pub const ALL: [StepKind; 5] = [
        StepKind::HasAttr,
        StepKind::HasRel,
        StepKind::HasInRel,
        StepKind::MoveOut,
        StepKind::MoveIn,
    ];

    pub fn is_stay(self) -> bool {
        matches!(
            self,
            StepKind::HasAttr | StepKind::HasRel | StepKind::HasInRel
        )
    }

    fn bit(self) -> u8 {
        1 << self as u8
    }
}

/// Which step kinds a walk may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StepKinds(u8);

impl StepKinds {
    pub const STAY: StepKinds = StepKinds(0b00111);
    pub const MOVE: StepKinds = StepKinds(0b11000);
    pub const BOTH: StepKinds = StepKinds(0b11111);
    pub const ATTR: StepKinds = StepKinds(0b00001);
    pub const REL: StepKinds = StepKinds(0b00010);
    pub const IN_REL: StepKinds = StepKinds(0b00100);

    pub fn of(kinds: &[StepKind]) -> Self {
        StepKinds(kinds.iter().fold(0, |acc, k| acc | k.bit()))
    }

    pub fn contains(self, kind: StepKind) -> bool {
        self.0 & kind.bit() != 0
    }

    pub fn union(self, other: StepKinds) -> StepKinds {
        StepKinds(self.0 | other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

/// Parses `stay`, `move`, `both`, or `+`-joined kinds such as `attr+inrel`.
impl FromStr for StepKinds {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut kinds = StepKinds(0);
        for part in s.split('+') {
            kinds = kinds.union(match part.trim().to_ascii_lowercase().as_str() {
                "stay" => StepKinds::STAY,
                "move" => StepKinds::MOVE,
                "both" => StepKinds::BOTH,
                "attr" => StepKinds::ATTR,
                "rel" => StepKinds::REL,
                "inrel" => StepKinds::IN_REL,
                "out" => StepKinds::of(&[StepKind::MoveOut]),
                "in" => StepKinds::of(&[StepKind::MoveIn]),
                other => return Err(format!("unknown step kind {other:?}")),
            });
        }
        Ok(kinds)
    }
}

impl fmt::Display for StepKinds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (set, name) in [
            (StepKinds::BOTH, "both"),
            (StepKinds::STAY, "stay"),
            (StepKinds::MOVE, "move"),
        ] {
            if *self == set {
                return f.write_str(name);
            }
        }
        let names = [
            (StepKind::HasAttr, "attr"),
            (StepKind::HasRel, "rel"),
            (StepKind::HasInRel, "inrel"),
            (StepKind::MoveOut, "out"),
            (StepKind::MoveIn, "in"),
        ];
        let parts: Vec<&str> = names
            .iter()
            .filter(|(k, _)| self.contains(*k))
            .map(|(_, n)| *n)
            .collect();
        f.write_str(&parts.join("+"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LengthStrategy {
    Fixed,
    Variable,
}

impl FromStr for LengthStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "fixed" => Ok(LengthStrategy::Fixed),
            "variable" => Ok(LengthStrategy::Variable),
            _ => Err(format!("unknown length strategy {s:?}")),
        }
    }
}

impl fmt::Display for LengthStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LengthStrategy::Fixed => "fixed",
            LengthStrategy::Variable => "variable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WalkConfig {
    pub n_walks: usize,
    pub max_length: usize,
    pub length_strategy: LengthStrategy,
    pub steps: StepKinds,
    pub avoid_cycles: bool,
    pub distinct_selection: bool,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            n_walks: 25,
            max_length: 2,
            length_strategy: LengthStrategy::Fixed,
            steps: StepKinds::BOTH,
            avoid_cycles: false,
            distinct_selection: false,
            seed: 0,
        }
    }
}

/// One step of a walk. Renders as `hasAttr_<name>`, `hasRel_<name>`,
/// `hasInRel_<name>`, `<name>->` or `<name><-`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StepLabel {
    pub kind: StepKind,
    pub name: String,
}

impl StepLabel {
    pub fn new(kind: StepKind, name: impl Into<String>) -> Self {
        StepLabel {
            kind,
            name: name.into(),
        }
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for StepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = escape_name(&self.name);
        match self.kind {
            StepKind::HasAttr => write!(f, "hasAttr_{name}"),
            StepKind::HasRel => write!(f, "hasRel_{name}"),
            StepKind::HasInRel => write!(f, "hasInRel_{name}"),
            StepKind::MoveOut => write!(f, "{name}->"),
            StepKind::MoveIn => write!(f, "{name}<-"),
        }
    }
}

impl FromStr for StepLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, name) = if let Some(n) = s.strip_suffix("->") {
            (StepKind::MoveOut, n)
        } else if let Some(n) = s.strip_suffix("<-") {
            (StepKind::MoveIn, n)
        } else if let Some(n) = s.strip_prefix("hasAttr_") {
            (StepKind::HasAttr, n)
        } else if let Some(n) = s.strip_prefix("hasRel_") {
            (StepKind::HasRel, n)
        } else if let Some(n) = s.strip_prefix("hasInRel_") {
            (StepKind::HasInRel, n)
        } else {
            return Err(format!("not a step label: {s:?}"));
        };
        Ok(StepLabel::new(kind, unescape_name(name)?))
    }
}

const ESCAPED: [(char, &str); 7] = [
    ('%', "%25"),
    (',', "%2C"),
    (';', "%3B"),
    ('<', "%3C"),
    ('>', "%3E"),
    ('\t', "%09"),
    ('\n', "%0A"),
];

/// Percent-escapes the characters that delimit labels, features and dump
/// fields.
pub fn escape_name(name: &str) -> std::borrow::Cow<'_, str> {
    if !name.contains(|c| ESCAPED.iter().any(|(e, _)| *e == c)) {
        return name.into();
    }
    let mut out = String::with_capacity(name.len() + 8);
    for c in name.chars() {
        match ESCAPED.iter().find(|(e, _)| *e == c) {
            Some((_, esc)) => out.push_str(esc),
            None => out.push(c),
        }
    }
    out.into()
}

pub fn unescape_name(s: &str) -> Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(pos) = rest.find('%') {
        out.push_str(&rest[..pos]);
        let code = rest.get(pos..pos + 3).unwrap_or(&rest[pos..]);
        match ESCAPED.iter().find(|(_, e)| e.eq_ignore_ascii_case(code)) {
            Some((c, _)) => out.push(*c),
            None => return Err(format!("bad escape {code:?} in {s:?}")),
        }
        rest = &rest[pos + code.len()..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Ordered step labels of one walk, with every run of stay steps taken at
/// the same node sorted lexicographically. Equality and ordering follow the
/// rendered, comma-joined string.
#[derive(Debug, Clone)]
pub struct WalkFeature {
    steps: Vec<StepLabel>,
    rendered: String,
}

impl WalkFeature {
    /// Canonicalizes `steps` and builds the feature. `None` if empty.
    pub fn new(mut steps: Vec<StepLabel>) -> Option<Self> {
        if steps.is_empty() {
            return None;
        }
        canonicalize(&mut steps);
        let rendered = steps
            .iter()
            .map(StepLabel::render)
            .collect::<Vec<_>>()
            .join(",");
        Some(WalkFeature { steps, rendered })
    }

    pub fn steps(&self) -> &[StepLabel] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn as_str(&self) -> &str {
        &self.rendered
    }
}

impl PartialEq for WalkFeature {
    fn eq(&self, other: &Self) -> bool {
        self.rendered == other.rendered
    }
}

impl Eq for WalkFeature {}

impl std::hash::Hash for WalkFeature {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rendered.hash(state)
    }
}

impl PartialOrd for WalkFeature {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for WalkFeature {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rendered.cmp(&other.rendered)
    }
}

impl fmt::Display for WalkFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.rendered)
    }
}

impl FromStr for WalkFeature {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let steps = s
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<StepLabel>, _>>()?;
        WalkFeature::new(steps).ok_or_else(|| "empty feature".to_string())
    }
}

/// Sorts each maximal run of consecutive stay steps by rendered label.
pub fn canonicalize(steps: &mut [StepLabel]) {
    let mut start = 0;
    while start < steps.len() {
        if !steps[start].kind.is_stay() {
            start += 1;
            continue;
        }
        let end = steps[start..]
            .iter()
            .position(|s| !s.kind.is_stay())
            .map_or(steps.len(), |p| start + p);
        steps[start..end].sort_by_cached_key(StepLabel::render);
        start = end;
    }
}

/// Draws a walk length. Under the variable strategy, length `l` has
/// probability `(max_length - l + 1) / (1 + 2 + ... + max_length)`.
pub fn choose_length<R: Rng + ?Sized>(
    max_length: usize,
    strategy: LengthStrategy,
    rng: &mut R,
) -> usize {
    assert!(max_length >= 1, "max_length must be at least 1");
    match strategy {
        LengthStrategy::Fixed => max_length,
        LengthStrategy::Variable => {
            let total = max_length * (max_length + 1) / 2;
            let mut r = rng.random_range(0..total);
            for l in 1..=max_length {
                let weight = max_length - l + 1;
                if r < weight {
                    return l;
                }
                r -= weight;
            }
            unreachable!("weights sum to total")
        }
    }
}

/// Where a candidate step leads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepTarget {
    Stay,
    /// One of these neighbours, chosen uniformly. A single entry unless
    /// distinct selection merged same-named edges.
    Move(Vec<NodeId>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub kind: StepKind,
    pub name: NameId,
    pub target: StepTarget,
}

impl Candidate {
    pub fn label(&self, g: &SemanticGraph) -> StepLabel {
        StepLabel::new(self.kind, g.label(self.name))
    }
}

/// Candidate steps at `node` for a walk of chosen length `walk_len`.
///
/// Order: attribute names, relationship names, incoming relationship names,
/// outgoing moves, incoming moves; each in name-then-target order. Move steps
/// are only offered when `walk_len > 1`.
pub fn available_steps(
    g: &SemanticGraph,
    node: NodeId,
    cfg: &WalkConfig,
    walk_len: usize,
    visited: &HashSet<NodeId>,
) -> Vec<Candidate> {
    let mut out = Vec::new();
    let stay = |kind, name| Candidate {
        kind,
        name,
        target: StepTarget::Stay,
    };
    if cfg.steps.contains(StepKind::HasAttr) {
        out.extend(g.attrs(node).iter().map(|&a| stay(StepKind::HasAttr, a)));
    }
    for (kind, edges) in [
        (StepKind::HasRel, g.outgoing(node)),
        (StepKind::HasInRel, g.incoming(node)),
    ] {
        if cfg.steps.contains(kind) {
            let mut last = None;
            for &(r, _) in edges {
                if last != Some(r) {
                    out.push(stay(kind, r));
                    last = Some(r);
                }
            }
        }
    }
    if walk_len > 1 {
        for (kind, edges) in [
            (StepKind::MoveOut, g.outgoing(node)),
            (StepKind::MoveIn, g.incoming(node)),
        ] {
            if !cfg.steps.contains(kind) {
                continue;
            }
            let open = edges
                .iter()
                .filter(|(_, n)| !(cfg.avoid_cycles && visited.contains(n)));
            for &(r, n) in open {
                match out.last_mut() {
                    Some(Candidate {
                        kind: k,
                        name,
                        target: StepTarget::Move(targets),
                    }) if cfg.distinct_selection && *k == kind && *name == r => targets.push(n),
                    _ => out.push(Candidate {
                        kind,
                        name: r,
                        target: StepTarget::Move(vec![n]),
                    }),
                }
            }
        }
    }
    out
}

/// A finished walk: its feature (if any step was taken) and the nodes it
/// occupied, starting with the start node.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkTrace {
    pub feature: Option<WalkFeature>,
    pub nodes: Vec<NodeId>,
}

/// Performs one random walk from `start`.
pub fn random_walk<R: Rng + ?Sized>(
    g: &SemanticGraph,
    start: NodeId,
    cfg: &WalkConfig,
    rng: &mut R,
) -> Result<Option<WalkFeature>, WalkError> {
    Ok(random_walk_traced(g, start, cfg, rng)?.feature)
}

pub fn random_walk_traced<R: Rng + ?Sized>(
    g: &SemanticGraph,
    start: NodeId,
    cfg: &WalkConfig,
    rng: &mut R,
) -> Result<WalkTrace, WalkError> {
    if !g.contains(start) {
        return Err(WalkError::StartNotInGraph(start));
    }
    let walk_len = choose_length(cfg.max_length, cfg.length_strategy, rng);
    let mut visited = HashSet::from([start]);
    let mut nodes = vec![start];
    let mut current = start;
    let mut steps = Vec::with_capacity(walk_len);
    for _ in 0..walk_len {
        let candidates = available_steps(g, current, cfg, walk_len, &visited);
        if candidates.is_empty() {
            // dead end: keep whatever was walked so far
            break;
        }
        let pick = &candidates[rng.random_range(0..candidates.len())];
        steps.push(pick.label(g));
        if let StepTarget::Move(targets) = &pick.target {
            current = targets[rng.random_range(0..targets.len())];
            nodes.push(current);
            if cfg.avoid_cycles {
                visited.insert(current);
            }
        }
    }
    Ok(WalkTrace {
        feature: WalkFeature::new(steps),
        nodes,
    })
}

/// Per-individual random stream, keyed by the node's name so it survives
/// graph reduction and does not depend on extraction order.
pub fn individual_rng(g: &SemanticGraph, node: NodeId, seed: u64) -> ChaCha8Rng {
    rng::stream(seed, g.name_of(node))
}

/// Runs `cfg.n_walks` walks from `individual` and returns the distinct
/// features, sorted.
pub fn extract_features(
    g: &SemanticGraph,
    individual: NodeId,
    cfg: &WalkConfig,
) -> Result<Vec<WalkFeature>, WalkError> {
    if !g.contains(individual) {
        return Err(WalkError::StartNotInGraph(individual));
    }
    let mut rng = individual_rng(g, individual, cfg.seed);
    extract_features_with(g, individual, cfg, &mut rng)
}

pub fn extract_features_with<R: Rng + ?Sized>(
    g: &SemanticGraph,
    individual: NodeId,
    cfg: &WalkConfig,
    rng: &mut R,
) -> Result<Vec<WalkFeature>, WalkError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for _ in 0..cfg.n_walks {
        if let Some(f) = random_walk(g, individual, cfg, rng)? {
            if seen.insert(f.rendered.clone()) {
                out.push(f);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Extracts features for every node in `nodes`, in parallel. Output order
/// matches `nodes`.
pub fn extract_all(
    g: &SemanticGraph,
    nodes: &[NodeId],
    cfg: &WalkConfig,
) -> Result<Vec<Vec<WalkFeature>>, WalkError> {
    nodes
        .par_iter()
        .map(|&n| extract_features(g, n, cfg))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use rand::SeedableRng;

    fn labels(g: &SemanticGraph, c: &[Candidate]) -> Vec<String> {
        c.iter().map(|c| c.label(g).render()).collect()
    }

    #[test]
    fn label_rendering() {
        assert_eq!(StepLabel::new(StepKind::HasAttr, "a").render(), "hasAttr_a");
        assert_eq!(StepLabel::new(StepKind::HasRel, "r").render(), "hasRel_r");
        assert_eq!(
            StepLabel::new(StepKind::HasInRel, "r").render(),
            "hasInRel_r"
        );
        assert_eq!(StepLabel::new(StepKind::MoveOut, "r").render(), "r->");
        assert_eq!(StepLabel::new(StepKind::MoveIn, "r").render(), "r<-");
        assert_eq!(
            StepLabel::new(StepKind::HasAttr, "a,b;c").render(),
            "hasAttr_a%2Cb%3Bc"
        );
    }

    #[test]
    fn label_parse_inverts_render() {
        for kind in StepKind::ALL {
            for name in ["a", "x->", "y<-", "hasAttr_z", "p%q,r;s", "-"] {
                let l = StepLabel::new(kind, name);
                assert_eq!(l.render().parse::<StepLabel>().unwrap(), l);
            }
        }
    }

    #[test]
    fn canonical_runs() {
        let f = WalkFeature::new(vec![
            StepLabel::new(StepKind::HasRel, "z"),
            StepLabel::new(StepKind::HasAttr, "b"),
            StepLabel::new(StepKind::MoveOut, "m"),
            StepLabel::new(StepKind::HasAttr, "y"),
            StepLabel::new(StepKind::HasAttr, "x"),
        ])
        .unwrap();
        assert_eq!(f.as_str(), "hasAttr_b,hasRel_z,m->,hasAttr_x,hasAttr_y");
        assert_eq!(f.as_str().parse::<WalkFeature>().unwrap(), f);
        assert!(WalkFeature::new(vec![]).is_none());
    }

    #[test]
    fn fixed_length_is_max() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(choose_length(2, LengthStrategy::Fixed, &mut rng), 2);
        }
    }

    #[test]
    fn stay_candidates_and_move_gate() {
        let mut b = GraphBuilder::new();
        b.add_attribute("t", "a2");
        b.add_attribute("t", "a1");
        b.add_edge("t", "r", "u");
        b.add_edge("t", "r", "v");
        b.add_edge("w", "q", "t");
        let g = b.build();
        let t = g.node_id("t").unwrap();
        let cfg = WalkConfig {
            steps: StepKinds::BOTH,
            ..Default::default()
        };
        let visited = HashSet::from([t]);
        assert_eq!(
            labels(&g, &available_steps(&g, t, &cfg, 1, &visited)),
            ["hasAttr_a1", "hasAttr_a2", "hasRel_r", "hasInRel_q"]
        );
        assert_eq!(
            labels(&g, &available_steps(&g, t, &cfg, 2, &visited)),
            [
                "hasAttr_a1",
                "hasAttr_a2",
                "hasRel_r",
                "hasInRel_q",
                "r->",
                "r->",
                "q<-"
            ]
        );
        let distinct = WalkConfig {
            distinct_selection: true,
            ..cfg.clone()
        };
        let c = available_steps(&g, t, &distinct, 2, &visited);
        assert_eq!(
            labels(&g, &c),
            [
                "hasAttr_a1",
                "hasAttr_a2",
                "hasRel_r",
                "hasInRel_q",
                "r->",
                "q<-"
            ]
        );
        let (u, v) = (g.node_id("u").unwrap(), g.node_id("v").unwrap());
        assert_eq!(c[4].target, StepTarget::Move(vec![u, v]));
    }

    #[test]
    fn cycle_avoidance_can_empty_the_list() {
        let mut b = GraphBuilder::new();
        b.add_edge("a", "r", "b");
        let g = b.build();
        let (a, bn) = (g.node_id("a").unwrap(), g.node_id("b").unwrap());
        let cfg = WalkConfig {
            steps: StepKinds::MOVE,
            avoid_cycles: true,
            ..Default::default()
        };
        let visited = HashSet::from([a, bn]);
        assert!(available_steps(&g, bn, &cfg, 2, &visited).is_empty());
    }

    #[test]
    fn attribute_only_walk_of_two() {
        let mut b = GraphBuilder::new();
        b.add_attribute("t", "a1");
        b.add_attribute("t", "a2");
        let g = b.build();
        let t = g.node_id("t").unwrap();
        let cfg = WalkConfig {
            steps: StepKinds::STAY,
            max_length: 2,
            n_walks: 50,
            ..Default::default()
        };
        let feats = extract_features(&g, t, &cfg).unwrap();
        let strs: Vec<&str> = feats.iter().map(WalkFeature::as_str).collect();
        // a1,a1 and a2,a2 are legal too: stay steps may repeat a label
        assert!(strs.contains(&"hasAttr_a1,hasAttr_a2"), "{strs:?}");
        assert!(!strs.contains(&"hasAttr_a2,hasAttr_a1"));
    }

    #[test]
    fn move_path() {
        let mut b = GraphBuilder::new();
        b.add_edge("T", "r2", "C");
        b.add_edge("C", "r4", "X");
        let g = b.build();
        let t = g.node_id("T").unwrap();
        let cfg = WalkConfig {
            steps: StepKinds::of(&[StepKind::MoveOut]),
            max_length: 2,
            n_walks: 10,
            ..Default::default()
        };
        let feats = extract_features(&g, t, &cfg).unwrap();
        assert_eq!(feats.len(), 1);
        assert_eq!(feats[0].as_str(), "r2->,r4->");
    }

    #[test]
    fn isolated_node_gives_nothing() {
        let mut b = GraphBuilder::new();
        b.add_node("lonely");
        let g = b.build();
        let n = g.node_id("lonely").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = WalkConfig::default();
        assert_eq!(random_walk(&g, n, &cfg, &mut rng).unwrap(), None);
        assert!(extract_features(&g, n, &cfg).unwrap().is_empty());
        assert_eq!(
            extract_features(&g, NodeId(9), &cfg).unwrap_err(),
            WalkError::StartNotInGraph(NodeId(9))
        );
    }

    #[test]
    fn zero_walks() {
        let mut b = GraphBuilder::new();
        b.add_attribute("t", "a");
        let g = b.build();
        let cfg = WalkConfig {
            n_walks: 0,
            ..Default::default()
        };
        assert!(extract_features(&g, NodeId(0), &cfg).unwrap().is_empty());
    }

    #[test]
    fn dedup_bounds_feature_count() {
        let mut b = GraphBuilder::new();
        for a in ["a", "b", "c"] {
            b.add_attribute("t", a);
        }
        let g = b.build();
        let cfg = WalkConfig {
            n_walks: 10,
            max_length: 1,
            steps: StepKinds::STAY,
            ..Default::default()
        };
        let feats = extract_features(&g, NodeId(0), &cfg).unwrap();
        assert!(feats.len() <= 3);
    }

    #[test]
    fn step_kinds_parse() {
        assert_eq!("stay".parse::<StepKinds>().unwrap(), StepKinds::STAY);
        assert_eq!(
            "attr+rel+inrel".parse::<StepKinds>().unwrap(),
            StepKinds::STAY
        );
        assert_eq!("out+in".parse::<StepKinds>().unwrap(), StepKinds::MOVE);
        assert_eq!(StepKinds::IN_REL.to_string(), "inrel");
        assert_eq!(StepKinds::BOTH.to_string(), "both");
        assert!("sideways".parse::<StepKinds>().is_err());
    }
}
