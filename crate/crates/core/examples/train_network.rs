//! Train each network preset on a small synthetic multi-label task and
//! print the per-epoch trace and a checkpoint round trip.
//!
//! ```bash
//! cargo run --release --example train_network -- [epochs]
//! ```

use kg_typer::codec::{EncodedExample, SparseInput};
use kg_typer::dataset::LabelSet;
use kg_typer::nn::{self, load_checkpoint, save_checkpoint, ModelState, Preset, TrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Label `j` is on when input `j` or input `j + 6` is.
fn examples(n: usize, rng: &mut ChaCha8Rng) -> Vec<EncodedExample> {
    (0..n)
        .map(|i| {
            let on: Vec<u32> = (0..24).filter(|_| rng.random_bool(0.15)).collect();
            let labels = (0..6)
                .filter(|j| on.contains(j) || on.contains(&(j + 6)))
                .collect();
            EncodedExample {
                node: format!("n{i}"),
                input: SparseInput(on.into_iter().map(|s| (s, 1)).collect()),
                targets: LabelSet::new(labels),
            }
        })
        .collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let epochs: usize = std::env::args().nth(1).map_or(Ok(6), |s| s.parse())?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let train: Vec<Vec<EncodedExample>> = (0..4).map(|_| examples(500, &mut rng)).collect();
    let val = examples(400, &mut rng);

    for preset in [Preset::LogReg, Preset::Dnn4, Preset::Final6] {
        let cfg = TrainConfig {
            epochs,
            seed: 2,
            ..Default::default()
        };
        let mut state = ModelState::new(preset.spec(24, 6, cfg.dropout_rate), &cfg)?;
        let trace = nn::train(&mut state, &train, Some(&val), &cfg)?;
        println!("{preset}:");
        for e in &trace.epochs {
            println!(
                "  epoch {} loss {:.4} train-f1 {:.4} val-f1 {:.4}",
                e.epoch,
                e.loss,
                e.train.f1,
                e.validation.map_or(f64::NAN, |m| m.f1)
            );
        }
        let mut bytes = Vec::new();
        save_checkpoint(&state.network, &mut bytes)?;
        let back = load_checkpoint(&mut bytes.as_slice())?;
        println!(
            "  checkpoint {} bytes, reloads identical: {}",
            bytes.len(),
            back == state.network
        );
    }
    Ok(())
}
