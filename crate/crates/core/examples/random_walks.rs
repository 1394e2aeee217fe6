//! Walk features for a few individuals under each step category, plus the
//! node path of single traced walks.
//!
//! ```bash
//! cargo run --example random_walks -- [max_length] [n_walks]
//! ```

use kg_typer::graph::build_graph;
use kg_typer::synth::{self, PlantedConfig};
use kg_typer::walker::{self, LengthStrategy, StepKinds, WalkConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let max_length: usize = args.next().map_or(Ok(2), |s| s.parse())?;
    let n_walks: usize = args.next().map_or(Ok(10), |s| s.parse())?;

    let planted = synth::generate(&PlantedConfig {
        individuals: 50,
        ..Default::default()
    });
    let g = build_graph(&planted.graph_triples());
    let start = g.node_id(&synth::node_iri(0)).ok_or("node 0 missing")?;

    for (name, steps) in [
        ("stay", StepKinds::STAY),
        ("move", StepKinds::MOVE),
        ("both", StepKinds::BOTH),
    ] {
        let cfg = WalkConfig {
            n_walks,
            max_length,
            length_strategy: LengthStrategy::Variable,
            steps,
            seed: 1,
            ..Default::default()
        };
        let features = walker::extract_features(&g, start, &cfg)?;
        println!("{name}: {} distinct of {n_walks} walks", features.len());
        for f in &features {
            println!("  {f}");
        }
        let mut rng = walker::individual_rng(&g, start, cfg.seed);
        let trace = walker::random_walk_traced(&g, start, &cfg, &mut rng)?;
        let path: Vec<&str> = trace.nodes.iter().map(|&n| g.name_of(n)).collect();
        println!("  one walk visits {}", path.join(" -> "));
    }
    Ok(())
}
