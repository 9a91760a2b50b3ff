//! Extended Brown-Conrady lens distortion.
//!
//! In normalised image coordinates `(x, y)` with `r^2 = x^2 + y^2`:
//!
//! ```text
//! x_d = x (1 + sum_{i=1..6} k_i r^{2i}) + 2 p1 x y + p2 (r^2 + 2 x^2) + s1 r^2 + s2 r^4
//! y_d = y (1 + sum_{i=1..6} k_i r^{2i}) + p1 (r^2 + 2 y^2) + 2 p2 x y + s3 r^2 + s4 r^4
//! ```
//!
//! The field is built remap-style: each destination pixel is normalised,
//! pushed through the model, and de-normalised; the stored displacement is
//! that source position minus the pixel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::UVField;

/// Pinhole intrinsics in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl CameraIntrinsics {
    /// Principal point at the image centre and a focal length of half the
    /// larger dimension, i.e. a 90 degree field of view along that axis.
    pub fn centered(width: usize, height: usize) -> Self {
        let f = 0.5 * width.max(height) as f64;
        Self {
            fx: f,
            fy: f,
            cx: (width as f64 - 1.0) / 2.0,
            cy: (height as f64 - 1.0) / 2.0,
        }
    }

    pub fn validate(&self, width: usize, height: usize) -> Result<()> {
        for (name, f) in [("fx", self.fx), ("fy", self.fy)] {
            if !(f > 0.0 && f.is_finite()) {
                return Err(Error::param(name, format!("focal length must be positive, got {f}")));
            }
        }
        let inside = |c: f64, n: usize| c >= 0.0 && c <= (n as f64 - 1.0);
        if !inside(self.cx, width) || !inside(self.cy, height) {
            return Err(Error::param(
                "principal_point",
                format!("({}, {}) lies outside the {width}x{height} image", self.cx, self.cy),
            ));
        }
        Ok(())
    }

    #[inline]
    pub fn normalize(&self, px: f64, py: f64) -> (f64, f64) {
        ((px - self.cx) / self.fx, (py - self.cy) / self.fy)
    }

    #[inline]
    pub fn denormalize(&self, x: f64, y: f64) -> (f64, f64) {
        (x * self.fx + self.cx, y * self.fy + self.cy)
    }
}

/// Radial `k1..k6`, tangential `p1, p2` and thin-prism `s1..s4` coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LensParams {
    pub k: [f64; 6],
    pub p: [f64; 2],
    pub s: [f64; 4],
}

impl LensParams {
    pub fn validate(&self) -> Result<()> {
        if self.k.iter().chain(&self.p).chain(&self.s).all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(Error::param("lens", "coefficients must be finite"))
        }
    }

    /// `(x_d - x, y_d - y)` for a normalised point.
    #[inline]
    pub fn offset_normalized(&self, x: f64, y: f64) -> (f64, f64) {
        let r2 = x * x + y * y;
        let k = &self.k;
        // sum_i k_i r^{2i} by Horner.
        let radial = r2 * (k[0] + r2 * (k[1] + r2 * (k[2] + r2 * (k[3] + r2 * (k[4] + r2 * k[5])))));
        let [p1, p2] = self.p;
        let [s1, s2, s3, s4] = self.s;
        let r4 = r2 * r2;
        let dx = x * radial + 2.0 * p1 * x * y + p2 * (r2 + 2.0 * x * x) + s1 * r2 + s2 * r4;
        let dy = y * radial + p1 * (r2 + 2.0 * y * y) + 2.0 * p2 * x * y + s3 * r2 + s4 * r4;
        (dx, dy)
    }

    /// The distorted normalised position `(x_d, y_d)`.
    #[inline]
    pub fn distort_normalized(&self, x: f64, y: f64) -> (f64, f64) {
        let (dx, dy) = self.offset_normalized(x, y);
        (x + dx, y + dy)
    }
}

pub fn brown_conrady_uv(width: usize, height: usize, intr: &CameraIntrinsics, lens: &LensParams) -> Result<UVField> {
    intr.validate(width, height)?;
    lens.validate()?;
    let n = width * height;
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    u.par_chunks_mut(width)
        .zip(v.par_chunks_mut(width))
        .enumerate()
        .for_each(|(py, (urow, vrow))| {
            for px in 0..width {
                let (x, y) = intr.normalize(px as f64, py as f64);
                let (dx, dy) = lens.offset_normalized(x, y);
                // `+ 0.0` folds -0.0 into +0.0 so identity fields serialise as zero bytes.
                urow[px] = dx * intr.fx + 0.0;
                vrow[px] = dy * intr.fy + 0.0;
            }
        });
    UVField::new(width, height, u, v)
}
