//! Checkpoint layout (little-endian):
//!
//! ```text
//! "KGTCKPT\0" u32:version
//! u32:input_width u32:output_width u32:hidden_count
//!   per hidden layer: u32:width u32:batch_norm f64:dropout_rate
//! per dense layer, input side first:
//!   f64[fan_in * fan_out]:weights (row-major) f64[fan_out]:bias
//!   if batch norm: f64[w]:gamma f64[w]:beta f64[w]:mean_ema f64[w]:var_ema u64:updates
//! ```

use std::io::{self, Read, Write};

use ndarray::{Array1, Array2};

use super::network::{BatchNorm, Layer, Network};
use super::{HiddenLayer, NetworkSpec};
use crate::binio::{self, invalid};

const MAGIC: &[u8; 8] = b"KGTCKPT\0";
const VERSION: u32 = 1;

pub fn save_checkpoint<W: Write>(net: &Network, w: &mut W) -> io::Result<()> {
    let spec = net.spec();
    w.write_all(MAGIC)?;
    binio::write_u32(w, VERSION)?;
    binio::write_u32(w, spec.input_width as u32)?;
    binio::write_u32(w, spec.output_width as u32)?;
    binio::write_u32(w, spec.hidden.len() as u32)?;
    for h in &spec.hidden {
        binio::write_u32(w, h.width as u32)?;
        binio::write_u32(w, u32::from(h.batch_norm))?;
        binio::write_f64(w, h.dropout_rate)?;
    }
    for layer in net.layers() {
        binio::write_f64s(w, layer.weights.iter().copied())?;
        binio::write_f64s(w, layer.bias.iter().copied())?;
        if let Some(bn) = &layer.batch_norm {
            for v in [&bn.gamma, &bn.beta, &bn.mean_ema, &bn.var_ema] {
                binio::write_f64s(w, v.iter().copied())?;
            }
            binio::write_u64(w, bn.updates)?;
        }
    }
    Ok(())
}

pub fn load_checkpoint<R: Read>(r: &mut R) -> io::Result<Network> {
    binio::expect_magic(r, MAGIC)?;
    let version = binio::read_u32(r)?;
    if version != VERSION {
        return Err(invalid(format!("unsupported checkpoint version {version}")));
    }
    let input_width = binio::read_u32(r)? as usize;
    let output_width = binio::read_u32(r)? as usize;
    let hidden_count = binio::read_u32(r)? as usize;
    let mut hidden = Vec::with_capacity(hidden_count);
    for _ in 0..hidden_count {
        hidden.push(HiddenLayer {
            width: binio::read_u32(r)? as usize,
            batch_norm: binio::read_u32(r)? != 0,
            dropout_rate: binio::read_f64(r)?,
        });
    }
    let spec = NetworkSpec {
        input_width,
        hidden,
        output_width,
    };
    spec.validate().map_err(|e| invalid(e.to_string()))?;

    let read_vec = |r: &mut R, n: usize| -> io::Result<Vec<f64>> {
        (0..n).map(|_| binio::read_f64(r)).collect()
    };
    let shapes = spec.layer_shapes();
    let mut layers = Vec::with_capacity(shapes.len());
    for (i, &(fan_in, fan_out)) in shapes.iter().enumerate() {
        let weights = Array2::from_shape_vec((fan_in, fan_out), read_vec(r, fan_in * fan_out)?)
            .map_err(|e| invalid(e.to_string()))?;
        let bias = Array1::from(read_vec(r, fan_out)?);
        let h = spec.hidden.get(i);
        let batch_norm = match h {
            Some(h) if h.batch_norm => Some(BatchNorm {
                gamma: Array1::from(read_vec(r, fan_out)?),
                beta: Array1::from(read_vec(r, fan_out)?),
                mean_ema: Array1::from(read_vec(r, fan_out)?),
                var_ema: Array1::from(read_vec(r, fan_out)?),
                updates: binio::read_u64(r)?,
            }),
            _ => None,
        };
        layers.push(Layer {
            weights,
            bias,
            batch_norm,
            dropout_rate: h.map_or(0.0, |h| h.dropout_rate),
            hidden: h.is_some(),
        });
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(invalid("trailing bytes after checkpoint"));
    }
    Ok(Network::from_parts(spec, layers))
}
