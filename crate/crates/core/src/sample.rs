//! Bilinear resampling of images and displacement fields.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{ImageBuffer, Rgb, UVField};

/// How lookups outside the raster are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BorderPolicy {
    /// Out-of-range neighbours read the nearest edge pixel.
    #[default]
    Clamp,
    /// Out-of-range neighbours read a fixed colour.
    Constant(Rgb),
}

// Keeps `floor` well inside i64 for absurd coordinates; anything past one
// pixel outside the raster already resolves entirely through the border.
#[inline]
fn limit(c: f64, len: usize) -> f64 {
    c.clamp(-2.0, len as f64 + 1.0)
}

#[inline]
fn fetch(img: &ImageBuffer, ix: i64, iy: i64, border: BorderPolicy) -> [f64; 3] {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let px = match border {
        BorderPolicy::Clamp => img.pixel(ix.clamp(0, w - 1) as usize, iy.clamp(0, h - 1) as usize),
        BorderPolicy::Constant(c) => {
            if ix < 0 || iy < 0 || ix >= w || iy >= h {
                c
            } else {
                img.pixel(ix as usize, iy as usize)
            }
        }
    };
    [px[0] as f64, px[1] as f64, px[2] as f64]
}

/// Real-valued bilinear blend of the four neighbours of `(x, y)`.
pub fn bilinear_sample_f64(img: &ImageBuffer, x: f64, y: f64, border: BorderPolicy) -> [f64; 3] {
    let x = limit(x, img.width());
    let y = limit(y, img.height());
    let (x0, y0) = (x.floor(), y.floor());
    let (fx, fy) = (x - x0, y - y0);
    let (ix, iy) = (x0 as i64, y0 as i64);
    let p00 = fetch(img, ix, iy, border);
    if fx == 0.0 && fy == 0.0 {
        return p00;
    }
    let p10 = fetch(img, ix + 1, iy, border);
    let p01 = fetch(img, ix, iy + 1, border);
    let p11 = fetch(img, ix + 1, iy + 1, border);
    let mut out = [0.0; 3];
    for c in 0..3 {
        let top = p00[c] + (p10[c] - p00[c]) * fx;
        let bottom = p01[c] + (p11[c] - p01[c]) * fx;
        out[c] = top + (bottom - top) * fy;
    }
    out
}

#[inline]
pub(crate) fn quantize(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Bilinear sample rounded to 8 bits. Integer in-bounds coordinates return
/// the stored pixel exactly.
pub fn bilinear_sample(img: &ImageBuffer, x: f64, y: f64, border: BorderPolicy) -> Rgb {
    let [r, g, b] = bilinear_sample_f64(img, x, y, border);
    [quantize(r), quantize(g), quantize(b)]
}

/// Backward warp: `out(x, y) = sample(img, x + u(x, y), y + v(x, y))`.
pub fn remap(img: &ImageBuffer, field: &UVField, border: BorderPolicy) -> Result<ImageBuffer> {
    if img.dims() != field.dims() {
        return Err(Error::SizeMismatch {
            expected: img.dims(),
            actual: field.dims(),
        });
    }
    let w = img.width();
    let mut data = vec![0u8; img.as_raw().len()];
    data.par_chunks_exact_mut(w * 3).enumerate().for_each(|(y, row)| {
        for x in 0..w {
            let (u, v) = field.get(x, y);
            let px = bilinear_sample(img, x as f64 + u, y as f64 + v, border);
            row[x * 3..x * 3 + 3].copy_from_slice(&px);
        }
    });
    ImageBuffer::new(w, img.height(), data)
}

/// Clamped bilinear lookup of a displacement field at a fractional position.
pub fn sample_uv(field: &UVField, x: f64, y: f64) -> (f64, f64) {
    let (w, h) = field.dims();
    let x = x.clamp(0.0, (w - 1) as f64);
    let y = y.clamp(0.0, (h - 1) as f64);
    let (x0, y0) = (x.floor() as usize, y.floor() as usize);
    let (fx, fy) = (x - x0 as f64, y - y0 as f64);
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let lerp2 = |c: &[f64]| {
        let top = c[y0 * w + x0] + (c[y0 * w + x1] - c[y0 * w + x0]) * fx;
        let bottom = c[y1 * w + x0] + (c[y1 * w + x1] - c[y1 * w + x0]) * fx;
        top + (bottom - top) * fy
    };
    (lerp2(field.u()), lerp2(field.v()))
}
