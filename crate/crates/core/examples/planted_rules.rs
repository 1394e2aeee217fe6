//! Planted-rule benchmark: generate a typed graph, walk it, train the
//! tapered network and report micro-F1 on held-out individuals.
//!
//! ```bash
//! cargo run --release --example planted_rules -- [noise] [epochs]
//! ```

use std::time::Instant;

use kg_typer::synth::{self, Benchmark};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let mut b = Benchmark::default();
    if let Some(noise) = args.next() {
        b.planted.label_noise = noise.parse()?;
    }
    if let Some(epochs) = args.next() {
        b.train.epochs = epochs.parse()?;
    }
    let started = Instant::now();
    let r = synth::run_benchmark(&b)?;
    println!(
        "{} labels, {} distinct training features",
        r.labels.len(),
        r.vocabulary
    );
    for e in &r.trace.epochs {
        println!(
            "epoch {} loss {:.4} train-f1 {:.4} val-f1 {:.4}",
            e.epoch,
            e.loss,
            e.train.f1,
            e.validation.map_or(f64::NAN, |m| m.f1)
        );
    }
    println!("test {}", r.test);
    for t in 0..r.labels.len() as u32 {
        let (mut tp, mut fp, mut fn_) = (0, 0, 0);
        for (p, a) in r.predicted.iter().zip(&r.actual) {
            match (p.contains(t), a.contains(t)) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                _ => {}
            }
        }
        println!(
            "  {:<8} tp={tp:<3} fp={fp:<3} fn={fn_}",
            r.labels.type_of(t)
        );
    }
    println!("elapsed {:.1}s", started.elapsed().as_secs_f64());
    Ok(())
}
