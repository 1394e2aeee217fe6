//! Interned adjacency store for the semantic graph.
//!
//! The graph is built once and then only read. Node ids are assigned in
//! lexicographic order of node names and name ids in lexicographic order of
//! predicate local names, so sorting adjacency lists by id gives the
//! name-then-target ordering the walker enumerates in. Any permutation of the
//! same triples therefore builds an identical graph.

use std::collections::{BTreeSet, HashMap};
use std::io::{self, Read, Write};

use thiserror::Error;

use crate::binio::{self, invalid};
use crate::rdf::{predicate_local_name, Term, TermKind, Triple, TripleRole};

const SNAPSHOT_MAGIC: &[u8; 8] = b"KGTGRAPH";
const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Interned predicate local name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NameId(pub u32);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has no nodes")]
    EmptyGraph,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphStats {
    pub node_count: usize,
    pub mean_attrs: f64,
    pub mean_incoming: f64,
    pub mean_outgoing: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SemanticGraph {
    node_names: Vec<String>,
    node_index: HashMap<String, NodeId>,
    names: Vec<String>,
    attrs: Vec<Vec<NameId>>,
    outgoing: Vec<Vec<(NameId, NodeId)>>,
    incoming: Vec<Vec<(NameId, NodeId)>>,
}

/// Node key for a term: IRIs as-is, blank nodes with their `_:` prefix.
pub fn node_key(term: &Term) -> String {
    match term.kind {
        TermKind::Blank => format!("_:{}", term.value),
        _ => term.value.clone(),
    }
}

/// Accumulates triples; [`GraphBuilder::build`] interns and sorts.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    nodes: BTreeSet<String>,
    attrs: Vec<(String, String)>,
    edges: Vec<(String, String, String)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_triple(&mut self, t: &Triple) {
        let subject = node_key(&t.subject);
        let name = predicate_local_name(&t.predicate.value).to_string();
        match t.role() {
            TripleRole::Attribute => {
                self.nodes.insert(subject.clone());
                self.attrs.push((subject, name));
            }
            TripleRole::Relationship => {
                let object = node_key(&t.object);
                self.nodes.insert(subject.clone());
                self.nodes.insert(object.clone());
                self.edges.push((subject, name, object));
            }
        }
    }

    pub fn add_node(&mut self, name: impl Into<String>) {
        self.nodes.insert(name.into());
    }

    pub fn add_attribute(&mut self, node: &str, name: &str) {
        self.nodes.insert(node.to_string());
        self.attrs.push((node.to_string(), name.to_string()));
    }

    pub fn add_edge(&mut self, from: &str, name: &str, to: &str) {
        self.nodes.insert(from.to_string());
        self.nodes.insert(to.to_string());
        self.edges
            .push((from.to_string(), name.to_string(), to.to_string()));
    }

    pub fn build(self) -> SemanticGraph {
        let node_names: Vec<String> = self.nodes.into_iter().collect();
        let node_index: HashMap<String, NodeId> = node_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), NodeId(i as u32)))
            .collect();
        let names: Vec<String> = self
            .attrs
            .iter()
            .map(|(_, n)| n)
            .chain(self.edges.iter().map(|(_, n, _)| n))
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let name_index: HashMap<&str, NameId> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), NameId(i as u32)))
            .collect();

        let n = node_names.len();
        let mut attrs = vec![Vec::new(); n];
        let mut outgoing = vec![Vec::new(); n];
        let mut incoming = vec![Vec::new(); n];
        for (node, name) in &self.attrs {
            attrs[node_index[node].index()].push(name_index[name.as_str()]);
        }
        for (from, name, to) in &self.edges {
            let (a, b, r) = (node_index[from], node_index[to], name_index[name.as_str()]);
            outgoing[a.index()].push((r, b));
            incoming[b.index()].push((r, a));
        }
        let mut g = SemanticGraph {
            node_names,
            node_index,
            names,
            attrs,
            outgoing,
            incoming,
        };
        g.normalize();
        g
    }
}

pub fn build_graph<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> SemanticGraph {
    let mut b = GraphBuilder::new();
    for t in triples {
        b.add_triple(t);
    }
    b.build()
}

impl SemanticGraph {
    fn normalize(&mut self) {
        for l in &mut self.attrs {
            l.sort_unstable();
            l.dedup();
        }
        for l in self.outgoing.iter_mut().chain(self.incoming.iter_mut()) {
            l.sort_unstable();
            l.dedup();
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_names.is_empty()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> {
        (0..self.node_names.len() as u32).map(NodeId)
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.index() < self.node_names.len()
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.node_index.get(name).copied()
    }

    pub fn name_of(&self, node: NodeId) -> &str {
        &self.node_names[node.index()]
    }

    pub fn label(&self, name: NameId) -> &str {
        &self.names[name.0 as usize]
    }

    pub fn name_count(&self) -> usize {
        self.names.len()
    }

    /// Attribute names of `node`, sorted, deduplicated.
    pub fn attrs(&self, node: NodeId) -> &[NameId] {
        &self.attrs[node.index()]
    }

    /// `(relationship, target)` pairs, sorted by name then target.
    pub fn outgoing(&self, node: NodeId) -> &[(NameId, NodeId)] {
        &self.outgoing[node.index()]
    }

    /// `(relationship, source)` pairs, sorted by name then source.
    pub fn incoming(&self, node: NodeId) -> &[(NameId, NodeId)] {
        &self.incoming[node.index()]
    }

    pub fn edge_count(&self) -> usize {
        self.outgoing.iter().map(Vec::len).sum()
    }

    /// Copy of the graph restricted to nodes for which `keep` holds. Edges
    /// touching a dropped node are removed. Ids are reassigned densely.
    pub fn retain_nodes(&self, keep: impl Fn(NodeId) -> bool) -> SemanticGraph {
        let mut b = GraphBuilder::new();
        for node in self.nodes().filter(|&n| keep(n)) {
            let name = self.name_of(node);
            b.add_node(name);
            for &a in self.attrs(node) {
                b.add_attribute(name, self.label(a));
            }
            for &(r, to) in self.outgoing(node) {
                if keep(to) {
                    b.add_edge(name, self.label(r), self.name_of(to));
                }
            }
        }
        b.build()
    }

    pub fn stats(&self) -> Result<GraphStats, GraphError> {
        graph_stats(self)
    }

    pub fn save<W: Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(SNAPSHOT_MAGIC)?;
        binio::write_u32(w, SNAPSHOT_VERSION)?;
        binio::write_u32(w, self.names.len() as u32)?;
        for n in &self.names {
            binio::write_str(w, n)?;
        }
        binio::write_u32(w, self.node_names.len() as u32)?;
        for (i, n) in self.node_names.iter().enumerate() {
            binio::write_str(w, n)?;
            binio::write_u32(w, self.attrs[i].len() as u32)?;
            for a in &self.attrs[i] {
                binio::write_u32(w, a.0)?;
            }
            binio::write_u32(w, self.outgoing[i].len() as u32)?;
            for (r, to) in &self.outgoing[i] {
                binio::write_u32(w, r.0)?;
                binio::write_u32(w, to.0)?;
            }
        }
        Ok(())
    }

    pub fn load<R: Read>(r: &mut R) -> io::Result<SemanticGraph> {
        binio::expect_magic(r, SNAPSHOT_MAGIC)?;
        let version = binio::read_u32(r)?;
        if version != SNAPSHOT_VERSION {
            return Err(invalid(format!(
                "unsupported graph snapshot version {version}"
            )));
        }
        let name_count = binio::read_u32(r)? as usize;
        let names = (0..name_count)
            .map(|_| binio::read_str(r))
            .collect::<io::Result<Vec<_>>>()?;
        let n = binio::read_u32(r)? as usize;
        let mut g = SemanticGraph {
            names,
            ..Default::default()
        };
        g.incoming = vec![Vec::new(); n];
        for i in 0..n {
            let name = binio::read_str(r)?;
            g.node_index.insert(name.clone(), NodeId(i as u32));
            g.node_names.push(name);
            let na = binio::read_u32(r)? as usize;
            let mut attrs = Vec::with_capacity(na);
            for _ in 0..na {
                let a = binio::read_u32(r)?;
                if a as usize >= name_count {
                    return Err(invalid("attribute name id out of range"));
                }
                attrs.push(NameId(a));
            }
            g.attrs.push(attrs);
            let ne = binio::read_u32(r)? as usize;
            let mut out = Vec::with_capacity(ne);
            for _ in 0..ne {
                let rel = binio::read_u32(r)?;
                let to = binio::read_u32(r)?;
                if rel as usize >= name_count || to as usize >= n {
                    return Err(invalid("edge id out of range"));
                }
                out.push((NameId(rel), NodeId(to)));
                g.incoming[to as usize].push((NameId(rel), NodeId(i as u32)));
            }
            g.outgoing.push(out);
        }
        g.normalize();
        Ok(g)
    }
}

pub fn graph_stats(g: &SemanticGraph) -> Result<GraphStats, GraphError> {
    let n = g.node_count();
    if n == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let mean = |total: usize| total as f64 / n as f64;
    Ok(GraphStats {
        node_count: n,
        mean_attrs: mean(g.attrs.iter().map(Vec::len).sum()),
        mean_incoming: mean(g.incoming.iter().map(Vec::len).sum()),
        mean_outgoing: mean(g.outgoing.iter().map(Vec::len).sum()),
    })
}
