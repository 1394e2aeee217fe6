//! Run every stage of an experiment config, reusing finished stages, and
//! print the evaluation row.
//!
//! ```bash
//! cargo run --release --example run_pipeline -- crates/core/examples/data/planted200/experiment.conf
//! ```

use kg_typer::pipeline::{self, ExperimentConfig, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .ok_or("usage: run_pipeline <experiment.conf>")?;
    let cfg = ExperimentConfig::load(path.as_ref())?;
    let (outcomes, row) = pipeline::run_pipeline(&cfg, RunOptions::default())?;
    for o in &outcomes {
        let status = if o.skipped {
            "reused"
        } else {
            o.summary.as_str()
        };
        println!("{:<7} {} ({status})", o.stage.name(), o.dir.display());
    }
    println!("{}", row.kv());
    Ok(())
}
