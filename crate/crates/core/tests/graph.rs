mod common;

use common::{graph_of, hand_graphs, triples, NS};
use kg_typer::graph::{build_graph, SemanticGraph};
use kg_typer::rdf::{Term, Triple};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn snapshot(g: &SemanticGraph) -> Vec<u8> {
    let mut buf = Vec::new();
    g.save(&mut buf).unwrap();
    buf
}

#[test]
fn triple_order_does_not_change_the_graph() {
    for (name, spec) in hand_graphs() {
        let ts = triples(spec);
        let reference = snapshot(&build_graph(&ts));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let mut shuffled = ts.clone();
            shuffled.shuffle(&mut rng);
            assert_eq!(snapshot(&build_graph(&shuffled)), reference, "{name}");
        }
    }
}

#[test]
fn duplicate_triples_collapse() {
    let (_, spec) = hand_graphs()[0];
    let ts = triples(spec);
    let doubled: Vec<Triple> = ts.iter().chain(&ts).cloned().collect();
    assert_eq!(
        snapshot(&build_graph(&doubled)),
        snapshot(&build_graph(&ts))
    );
}

#[test]
fn snapshots_round_trip() {
    for (name, spec) in hand_graphs() {
        let g = graph_of(spec);
        let bytes = snapshot(&g);
        let back = SemanticGraph::load(&mut bytes.as_slice()).unwrap();
        assert_eq!(snapshot(&back), bytes, "{name}");
        for n in g.nodes() {
            assert_eq!(back.name_of(n), g.name_of(n));
            assert_eq!(back.outgoing(n), g.outgoing(n));
            assert_eq!(back.incoming(n), g.incoming(n));
            assert_eq!(back.attrs(n), g.attrs(n));
        }
    }
}

#[test]
fn corrupt_snapshots_are_rejected() {
    let bytes = snapshot(&graph_of(hand_graphs()[1].1));
    assert!(SemanticGraph::load(&mut &bytes[..bytes.len() - 3]).is_err());
    let mut bad = bytes.clone();
    bad[0] ^= 0xff;
    assert!(SemanticGraph::load(&mut bad.as_slice()).is_err());
}

#[test]
fn adjacency_mirrors_the_triples() {
    let (_, spec) = hand_graphs()[1];
    let g = graph_of(spec);
    let hub = g.node_id(&format!("{NS}hub")).unwrap();
    let label = |n: &[(kg_typer::graph::NameId, kg_typer::graph::NodeId)]| {
        n.iter()
            .map(|&(r, o)| format!("{} {}", g.label(r), g.name_of(o)))
            .collect::<Vec<_>>()
    };
    assert_eq!(g.outgoing(hub).len(), 3);
    assert_eq!(g.incoming(hub).len(), 3);
    assert_eq!(g.attrs(hub).len(), 1);
    assert!(label(g.outgoing(hub)).contains(&format!("owns {NS}x3")));
    assert!(label(g.incoming(hub)).contains(&format!("likes {NS}y3")));
    // literal objects are attributes, never nodes
    assert!(g.node_id(&format!("{NS}h")).is_none());
}

#[test]
fn retaining_nodes_drops_dangling_edges() {
    let (_, spec) = hand_graphs()[0];
    let g = graph_of(spec);
    let b = g.node_id(&format!("{NS}b")).unwrap();
    let kept = g.retain_nodes(|n| n != b);
    assert_eq!(kept.node_count(), g.node_count() - 1);
    assert!(kept.node_id(&format!("{NS}b")).is_none());
    // a->b and b->c are gone, c->d survives
    assert_eq!(kept.edge_count(), 1);
    let a = kept.node_id(&format!("{NS}a")).unwrap();
    assert!(kept.outgoing(a).is_empty());
    assert_eq!(kept.attrs(a).len(), 1);
}

fn random_triples() -> impl Strategy<Value = Vec<Triple>> {
    prop::collection::vec((0u8..10, 0u8..4, 0u8..10, any::<bool>()), 1..40).prop_map(|v| {
        v.into_iter()
            .map(|(s, p, o, lit)| {
                Triple::new(
                    Term::iri(format!("n{s}")),
                    Term::iri(format!("p/r{p}")),
                    if lit {
                        Term::literal(format!("{o}"))
                    } else {
                        Term::iri(format!("n{o}"))
                    },
                )
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn incoming_is_the_transpose_of_outgoing(ts in random_triples()) {
        let g = build_graph(&ts);
        let mut out = Vec::new();
        let mut inc = Vec::new();
        for n in g.nodes() {
            out.extend(g.outgoing(n).iter().map(|&(r, o)| (n, r, o)));
            inc.extend(g.incoming(n).iter().map(|&(r, s)| (s, r, n)));
            prop_assert!(g.outgoing(n).windows(2).all(|w| w[0] < w[1]));
            prop_assert!(g.attrs(n).windows(2).all(|w| w[0] < w[1]));
        }
        out.sort();
        inc.sort();
        prop_assert_eq!(out, inc);
    }

    #[test]
    fn node_ids_follow_name_order(ts in random_triples()) {
        let g = build_graph(&ts);
        let names: Vec<&str> = g.nodes().map(|n| g.name_of(n)).collect();
        prop_assert!(names.windows(2).all(|w| w[0] < w[1]));
    }
}
