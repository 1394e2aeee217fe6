//! Build the adjacency store from N-Triples, print its shape, and round-trip
//! it through the binary snapshot format.
//!
//! ```bash
//! cargo run --example graph_snapshot -- crates/core/examples/data/planted200/graph.nt
//! ```

use std::fs::File;
use std::io::BufReader;

use kg_typer::graph::{build_graph, SemanticGraph};
use kg_typer::rdf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .ok_or("usage: graph_snapshot <file.nt>")?;
    let triples = rdf::parse_ntriples(BufReader::new(File::open(&path)?), false)
        .collect::<Result<Vec<_>, _>>()?;
    let g = build_graph(&triples);
    let s = g.stats()?;
    println!(
        "{} nodes, {} edges, {} interned names; per node: {:.2} attributes, {:.2} out, {:.2} in",
        s.node_count,
        g.edge_count(),
        g.name_count(),
        s.mean_attrs,
        s.mean_outgoing,
        s.mean_incoming
    );
    if let Some(n) = g
        .nodes()
        .max_by_key(|&n| g.outgoing(n).len() + g.incoming(n).len())
    {
        println!("busiest node {}:", g.name_of(n));
        for &(r, to) in g.outgoing(n) {
            println!("  {} -> {}", g.label(r), g.name_of(to));
        }
        for &(r, from) in g.incoming(n) {
            println!("  {} <- {}", g.label(r), g.name_of(from));
        }
    }

    let mut bytes = Vec::new();
    g.save(&mut bytes)?;
    let back = SemanticGraph::load(&mut bytes.as_slice())?;
    println!(
        "snapshot {} bytes, reloads identical: {}",
        bytes.len(),
        back == g
    );
    Ok(())
}
