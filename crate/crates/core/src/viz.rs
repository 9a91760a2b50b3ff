//! Visual probes: checkerboards and false-colour renderings of fields.

use crate::error::{Error, Result};
use crate::raster::{ImageBuffer, ScalarField, UVField};
use crate::sample::quantize;

const WHITE: [u8; 3] = [255, 255, 255];
const BLACK: [u8; 3] = [0, 0, 0];

/// Black and white cells of `cell` pixels; the top-left cell is white.
pub fn render_checkerboard(width: usize, height: usize, cell: usize) -> Result<ImageBuffer> {
    if cell == 0 {
        return Err(Error::param("cell", "must be at least 1 pixel"));
    }
    ImageBuffer::from_fn(width, height, |x, y| {
        if (x / cell + y / cell).is_multiple_of(2) {
            WHITE
        } else {
            BLACK
        }
    })
}

/// Encodes `u` in red and `v` in green around a mid-grey of 128; a
/// displacement of `scale` pixels maps to 255 and `-scale` to 1.
pub fn visualize_uv(field: &UVField, scale: f64) -> Result<ImageBuffer> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::param("scale", format!("must be positive, got {scale}")));
    }
    let (w, h) = field.dims();
    let encode = |d: f64| quantize(128.0 + 127.0 * d / scale);
    ImageBuffer::from_fn(w, h, |x, y| {
        let (u, v) = field.get(x, y);
        [encode(u), encode(v), 0]
    })
}

/// Grey-level rendering stretched to the field's own range. A constant field
/// renders as uniform mid-grey.
pub fn visualize_scalar(field: &ScalarField) -> Result<ImageBuffer> {
    let (lo, hi) = field.min_max();
    let (w, h) = field.dims();
    ImageBuffer::from_fn(w, h, |x, y| {
        let g = if hi > lo {
            quantize(255.0 * (field.get(x, y) - lo) / (hi - lo))
        } else {
            128
        };
        [g, g, g]
    })
}
