//! Network checkpoints: a JSON manifest plus a raw little-endian payload.
//!
//! `<stem>.json` records the dtype, byte order and layer widths
//! `[d_0, ..., d_L]`. `<stem>.bin` holds every layer's `(d_in, d_out)` weights
//! (row-major) followed by its bias, layer after layer, with no padding.

use std::fs;
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::mlp::{Layer, Mlp};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const FORMAT: &str = "clcgan-mlp-v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format: String,
    pub dtype: String,
    pub byte_order: String,
    pub layer_dims: Vec<usize>,
    /// Payload file name, relative to the manifest.
    pub payload: String,
    pub payload_bytes: usize,
}

fn paths(stem: &Path) -> (PathBuf, PathBuf) {
    (stem.with_extension("json"), stem.with_extension("bin"))
}

/// Writes `<stem>.json` and `<stem>.bin`.
pub fn save_checkpoint<T: Scalar>(net: &Mlp<T>, stem: &Path) -> Result<()> {
    let (json, bin) = paths(stem);
    let mut payload = Vec::with_capacity(net.param_count() * std::mem::size_of::<T>());
    for p in net.params_flat() {
        p.write_le(&mut payload);
    }
    let manifest = Manifest {
        format: FORMAT.into(),
        dtype: T::DTYPE.into(),
        byte_order: "little".into(),
        layer_dims: net.layer_dims(),
        payload: bin.file_name().unwrap().to_string_lossy().into_owned(),
        payload_bytes: payload.len(),
    };
    fs::write(&bin, &payload)?;
    fs::write(&json, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

/// Reads a checkpoint written by [`save_checkpoint`] for the same dtype.
pub fn load_checkpoint<T: Scalar>(stem: &Path) -> Result<Mlp<T>> {
    let (json, _) = paths(stem);
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(&json)?)?;
    if manifest.format != FORMAT {
        return Err(Error::Checkpoint(format!("unknown format '{}'", manifest.format)));
    }
    if manifest.dtype != T::DTYPE {
        return Err(Error::Checkpoint(format!("dtype '{}' does not match '{}'", manifest.dtype, T::DTYPE)));
    }
    if manifest.byte_order != "little" {
        return Err(Error::Checkpoint(format!("unsupported byte order '{}'", manifest.byte_order)));
    }
    let bytes = fs::read(json.with_file_name(&manifest.payload))?;
    let width = std::mem::size_of::<T>();
    let dims = &manifest.layer_dims;
    if dims.len() < 2 {
        return Err(Error::Checkpoint("need at least two layer dims".into()));
    }
    let expected: usize = dims.windows(2).map(|d| (d[0] + 1) * d[1]).sum::<usize>() * width;
    if bytes.len() != expected || manifest.payload_bytes != expected {
        return Err(Error::Checkpoint(format!("payload has {} bytes, expected {expected}", bytes.len())));
    }
    let mut values = bytes.chunks_exact(width).map(T::read_le);
    let layers = dims
        .windows(2)
        .map(|d| {
            let w = Array2::from_shape_simple_fn((d[0], d[1]), || values.next().unwrap());
            let b = Array1::from_shape_simple_fn(d[1], || values.next().unwrap());
            Layer { w, b }
        })
        .collect();
    Mlp::from_layers(layers)
}
