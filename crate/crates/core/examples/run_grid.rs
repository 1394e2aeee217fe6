//! Run the `[grid]` section of an experiment config: every combination of
//! the axis values, sharing stages between cells where settings agree.
//!
//! ```bash
//! cargo run --release --example run_grid -- crates/core/examples/data/planted200/experiment.conf
//! ```

use kg_typer::pipeline::{run_grid, ExperimentConfig, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .ok_or("usage: run_grid <experiment.conf>")?;
    let cfg = ExperimentConfig::load(path.as_ref())?;
    let report = run_grid(&cfg, &cfg.axes, RunOptions::default())?;
    print!("{}", report.render());
    println!(
        "{} cells, {} failed; written to {}",
        report.cells.len(),
        report.failures(),
        report.path.display()
    );
    Ok(())
}
