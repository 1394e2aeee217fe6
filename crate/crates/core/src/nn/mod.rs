//! Fully-connected multi-label network written from scratch.
//!
//! Hidden layers are `dense -> batch norm -> relu -> dropout`; the output
//! layer is `dense -> sigmoid`, trained with binary cross-entropy and the
//! Nesterov-accelerated Adam rule.

mod checkpoint;
mod network;
mod optim;
mod train;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use network::{
    bce_loss, glorot_init, Cache, Gradients, Inputs, LayerGradients, Mode, Network, BN_EPSILON,
    BN_MOMENTUM, PROB_EPSILON,
};
pub use optim::{Nadam, NadamConfig};
pub use train::{
    examples_to_targets, predict_batches, train, EpochStats, ModelState, TrainConfig, TrainTrace,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NnError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HiddenLayer {
    pub width: usize,
    pub batch_norm: bool,
    pub dropout_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    pub input_width: usize,
    pub hidden: Vec<HiddenLayer>,
    pub output_width: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// No hidden layers.
    LogReg,
    /// Two hidden layers of 1024.
    Dnn4,
    /// Six hidden layers of 512.
    Dnn8,
    /// Tapered: 1024, 1024, 512, 256.
    Final6,
}

impl Preset {
    pub fn hidden_widths(self) -> Vec<usize> {
        match self {
            Preset::LogReg => vec![],
            Preset::Dnn4 => vec![1024; 2],
            Preset::Dnn8 => vec![512; 6],
            Preset::Final6 => vec![1024, 1024, 512, 256],
        }
    }

    pub fn spec(self, input_width: usize, output_width: usize, dropout_rate: f64) -> NetworkSpec {
        NetworkSpec::mlp(
            input_width,
            &self.hidden_widths(),
            output_width,
            dropout_rate,
        )
    }

    /// Same depth as the preset with every hidden layer `width` wide.
    pub fn toy_spec(self, input_width: usize, width: usize, output_width: usize) -> NetworkSpec {
        let widths = vec![width; self.hidden_widths().len()];
        NetworkSpec::mlp(input_width, &widths, output_width, 0.2)
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "logreg" => Ok(Preset::LogReg),
            "dnn4" => Ok(Preset::Dnn4),
            "dnn8" => Ok(Preset::Dnn8),
            "final6" => Ok(Preset::Final6),
            _ => Err(format!(
                "unknown network preset {s:?} (expected logreg, dnn4, dnn8 or final6)"
            )),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::LogReg => "logreg",
            Preset::Dnn4 => "dnn4",
            Preset::Dnn8 => "dnn8",
            Preset::Final6 => "final6",
        })
    }
}

impl NetworkSpec {
    /// Hidden layers with batch norm and the given dropout rate.
    pub fn mlp(
        input_width: usize,
        widths: &[usize],
        output_width: usize,
        dropout_rate: f64,
    ) -> Self {
        NetworkSpec {
            input_width,
            hidden: widths
                .iter()
                .map(|&width| HiddenLayer {
                    width,
                    batch_norm: true,
                    dropout_rate,
                })
                .collect(),
            output_width,
        }
    }

    /// `(fan_in, fan_out)` of every dense layer, output layer last.
    pub fn layer_shapes(&self) -> Vec<(usize, usize)> {
        let mut shapes = Vec::with_capacity(self.hidden.len() + 1);
        let mut fan_in = self.input_width;
        for h in &self.hidden {
            shapes.push((fan_in, h.width));
            fan_in = h.width;
        }
        shapes.push((fan_in, self.output_width));
        shapes
    }

    pub fn validate(&self) -> Result<(), NnError> {
        let bad = |m: String| Err(NnError::ShapeMismatch(m));
        if self.input_width == 0 || self.output_width == 0 {
            return bad("input and output widths must be positive".into());
        }
        for (i, h) in self.hidden.iter().enumerate() {
            if h.width == 0 {
                return bad(format!("hidden layer {i} has zero width"));
            }
            if !(0.0..1.0).contains(&h.dropout_rate) {
                return bad(format!(
                    "hidden layer {i} dropout {} not in [0,1)",
                    h.dropout_rate
                ));
            }
        }
        Ok(())
    }

    pub fn parameter_count(&self) -> usize {
        let dense: usize = self.layer_shapes().iter().map(|(i, o)| i * o + o).sum();
        let bn: usize = self
            .hidden
            .iter()
            .filter(|h| h.batch_norm)
            .map(|h| 2 * h.width)
            .sum();
        dense + bn
    }
}
