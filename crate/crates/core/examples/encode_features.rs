//! Build a feature vocabulary and compare the superposed and dense input
//! encodings of the same walk features.
//!
//! ```bash
//! cargo run --example encode_features
//! ```

use kg_typer::codec::{self, superposed_slot, Encoding, SUPERPOSED_WIDTH};

fn main() {
    // far more features than input slots
    let vocab = codec::build_vocabulary((0..20_000).map(|i| format!("hasAttr_a{i:05}")));
    println!(
        "{} features fold into {SUPERPOSED_WIDTH} slots",
        vocab.len()
    );
    for i in [0u32, 1, 8383, 8384, 8385, 16768] {
        let (slot, value) = superposed_slot(i);
        println!("  feature {i:>5} -> slot {slot:>4} value {value}");
    }

    let walks: Vec<String> = [3, 8384 + 3, 17, 19_999]
        .iter()
        .map(|&i| vocab.feature(i).to_string())
        .chain(["unseen,feature".to_string()])
        .collect();
    for enc in [Encoding::Superposed, Encoding::Dense] {
        let row = enc.encode(&walks, &vocab);
        println!(
            "{:>10} (width {:>5}): {row}",
            enc.to_string(),
            enc.input_width(&vocab)
        );
    }
}
