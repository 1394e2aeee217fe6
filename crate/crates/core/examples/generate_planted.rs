//! Writes a planted-rule graph as two N-Triples files.
//!
//! ```bash
//! cargo run --example generate_planted -- <out-dir> [individuals] [noise] [seed]
//! ```

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use kg_typer::synth::{self, PlantedConfig, PlantedGraph};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(
        args.next()
            .ok_or("usage: generate_planted <out-dir> [individuals] [noise] [seed]")?,
    );
    let defaults = PlantedConfig::default();
    let cfg = PlantedConfig {
        individuals: args
            .next()
            .map_or(Ok(defaults.individuals), |s| s.parse())?,
        label_noise: args
            .next()
            .map_or(Ok(defaults.label_noise), |s| s.parse())?,
        seed: args.next().map_or(Ok(defaults.seed), |s| s.parse())?,
        ..defaults
    };
    let g = synth::generate(&cfg);
    std::fs::create_dir_all(&dir)?;
    for (name, triples) in [
        ("graph.nt", g.graph_triples()),
        ("types.nt", g.type_triples()),
    ] {
        let mut w = BufWriter::new(File::create(dir.join(name))?);
        PlantedGraph::write_ntriples(&triples, &mut w)?;
        println!("{}: {} triples", dir.join(name).display(), triples.len());
    }
    Ok(())
}
