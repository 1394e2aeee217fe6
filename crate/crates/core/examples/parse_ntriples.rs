//! Stream an N-Triples file, printing each statement's role and every
//! malformed line.
//!
//! ```bash
//! cargo run --example parse_ntriples -- crates/core/examples/data/planted200/graph.nt [--strict]
//! ```

use std::fs::File;
use std::io::BufReader;

use kg_typer::rdf::{self, predicate_local_name, TripleRole};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .ok_or("usage: parse_ntriples <file.nt> [--strict]")?;
    let strict = std::env::args().any(|a| a == "--strict");
    let mut triples = rdf::parse_ntriples(BufReader::new(File::open(&path)?), strict);
    let (mut attrs, mut rels) = (0, 0);
    for t in triples.by_ref() {
        let t = t?;
        match t.role() {
            TripleRole::Attribute => attrs += 1,
            TripleRole::Relationship => rels += 1,
        }
        if attrs + rels <= 5 {
            println!(
                "{:?} {} -> {t}",
                t.role(),
                predicate_local_name(&t.predicate.value)
            );
        }
    }
    for m in triples.malformed() {
        println!("malformed {m}");
    }
    println!(
        "{} lines: {attrs} attributes, {rels} relationships, {} malformed",
        triples.lines_read(),
        triples.malformed_count()
    );
    Ok(())
}
