//! Gaussian random fields with exponential covariance.
//!
//! Sampling uses circulant embedding: the covariance is laid out on a
//! periodic grid twice the size of the output in each axis, its eigenvalues
//! are obtained with a 2D FFT, and a field is drawn as the FFT of complex
//! white noise shaped by the square-rooted spectrum. The top-left
//! `width x height` window is kept. Small negative eigenvalues produced by
//! the embedding are clipped to zero.
//!
//! The covariance is the exponential model with an optional inner scale `s`:
//!
//! ```text
//! C(d) = exp(-d / l)                               s = 0
//! C(d) = exp((s - sqrt(d^2 + s^2)) / l'),  l' = sqrt(l^2 + s^2) - s
//! ```
//!
//! The second form is positive definite in any dimension, equals `e^-1` at
//! lag `l` exactly and decays like `exp(-d / l')` at long range, but is
//! smooth at the origin. With `s = 0` the field is only continuous, and at
//! pixel scale its increments are large enough for a displacement field of a
//! few pixels to fold over. The default inner scale is `l / 4`.
//!
//! Every sample is recentred to zero empirical mean and rescaled to the
//! target empirical variance.

use std::sync::Arc;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::ScalarField;
use crate::seed::rng_from_seed;

/// Inner scale as a fraction of the correlation length.
pub const DEFAULT_INNER_SCALE_RATIO: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrfParams {
    /// Distance in pixels at which the covariance falls to `e^-1`.
    pub correlation_length: f64,
    /// Empirical variance of every sample.
    pub target_variance: f64,
    /// Smoothing radius of the covariance at the origin, in pixels.
    pub inner_scale: f64,
}

impl GrfParams {
    pub fn new(correlation_length: f64) -> Self {
        Self {
            correlation_length,
            target_variance: 1.0,
            inner_scale: correlation_length * DEFAULT_INNER_SCALE_RATIO,
        }
    }

    /// The unsmoothed `exp(-d / l)` model.
    pub fn pure_exponential(correlation_length: f64) -> Self {
        Self {
            inner_scale: 0.0,
            ..Self::new(correlation_length)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.correlation_length > 0.0 && self.correlation_length.is_finite()) {
            return Err(Error::param(
                "correlation_length",
                format!("must be positive, got {}", self.correlation_length),
            ));
        }
        if !(self.target_variance > 0.0 && self.target_variance.is_finite()) {
            return Err(Error::param(
                "target_variance",
                format!("must be positive, got {}", self.target_variance),
            ));
        }
        if !(self.inner_scale >= 0.0 && self.inner_scale.is_finite()) {
            return Err(Error::param(
                "inner_scale",
                format!("must be non-negative, got {}", self.inner_scale),
            ));
        }
        Ok(())
    }

    /// Correlation at distance `d` pixels.
    pub fn covariance(&self, d: f64) -> f64 {
        let l = self.correlation_length;
        let s = self.inner_scale;
        if s == 0.0 {
            (-d / l).exp()
        } else {
            let l_eff = (l * l + s * s).sqrt() - s;
            ((s - (d * d + s * s).sqrt()) / l_eff).exp()
        }
    }
}

/// Precomputed spectrum for repeated draws at one size and parameter set.
pub struct GrfSampler {
    width: usize,
    height: usize,
    params: GrfParams,
    // Embedding grid is `rows x cols`, row-major.
    rows: usize,
    cols: usize,
    amplitude: Vec<f64>,
    row_fft: Arc<dyn Fft<f64>>,
    col_fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for GrfSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GrfSampler")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("params", &self.params)
            .field("embedding", &(self.cols, self.rows))
            .finish_non_exhaustive()
    }
}

impl GrfSampler {
    pub fn new(width: usize, height: usize, params: GrfParams) -> Result<Self> {
        params.validate()?;
        if width == 0 || height == 0 {
            return Err(Error::InvalidDimensions {
                width,
                height,
                reason: "fields must be at least 1x1",
            });
        }
        let rows = 2 * height;
        let cols = 2 * width;
        let mut planner = FftPlanner::<f64>::new();
        let row_fft = planner.plan_fft_forward(cols);
        let col_fft = planner.plan_fft_forward(rows);

        let wrapped = |i: usize, n: usize| i.min(n - i) as f64;
        let mut grid: Vec<Complex<f64>> = (0..rows * cols)
            .into_par_iter()
            .map(|idx| {
                let (r, c) = (idx / cols, idx % cols);
                let d = wrapped(r, rows).hypot(wrapped(c, cols));
                Complex::new(params.covariance(d), 0.0)
            })
            .collect();
        fft2(&mut grid, rows, cols, &row_fft, &col_fft);

        let norm = (rows * cols) as f64;
        let amplitude = grid.iter().map(|z| (z.re.max(0.0) / norm).sqrt()).collect();
        Ok(Self {
            width,
            height,
            params,
            rows,
            cols,
            amplitude,
            row_fft,
            col_fft,
        })
    }

    pub fn params(&self) -> &GrfParams {
        &self.params
    }

    /// Draws one field. Identical seeds give bit-identical fields.
    pub fn sample(&self, seed: u64) -> Result<ScalarField> {
        let mut rng = rng_from_seed(seed);
        let mut grid: Vec<Complex<f64>> = self
            .amplitude
            .iter()
            .map(|&a| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex::new(a * re, a * im)
            })
            .collect();
        fft2(&mut grid, self.rows, self.cols, &self.row_fft, &self.col_fft);

        let mut values = Vec::with_capacity(self.width * self.height);
        for y in 0..self.height {
            let row = &grid[y * self.cols..y * self.cols + self.width];
            values.extend(row.iter().map(|z| z.re));
        }
        standardize(&mut values, self.params.target_variance);
        ScalarField::new(self.width, self.height, values)
    }
}

/// One-shot draw of a `width x height` field.
pub fn sample_grf(width: usize, height: usize, params: &GrfParams, seed: u64) -> Result<ScalarField> {
    GrfSampler::new(width, height, *params)?.sample(seed)
}

fn standardize(values: &mut [f64], target_variance: f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter_mut().for_each(|v| *v -= mean);
    let var = values.iter().map(|v| v * v).sum::<f64>() / n;
    if var > 0.0 {
        let k = (target_variance / var).sqrt();
        values.iter_mut().for_each(|v| *v *= k);
    }
}

const FFT_ROWS_PER_TASK: usize = 16;

fn fft_rows(buf: &mut [Complex<f64>], len: usize, fft: &Arc<dyn Fft<f64>>) {
    buf.par_chunks_mut(len * FFT_ROWS_PER_TASK)
        .for_each(|chunk| fft.process(chunk));
}

fn transpose(src: &[Complex<f64>], rows: usize, cols: usize) -> Vec<Complex<f64>> {
    let mut dst = vec![Complex::new(0.0, 0.0); src.len()];
    dst.par_chunks_mut(rows).enumerate().for_each(|(c, out)| {
        for (r, slot) in out.iter_mut().enumerate() {
            *slot = src[r * cols + c];
        }
    });
    dst
}

fn fft2(
    buf: &mut Vec<Complex<f64>>,
    rows: usize,
    cols: usize,
    row_fft: &Arc<dyn Fft<f64>>,
    col_fft: &Arc<dyn Fft<f64>>,
) {
    fft_rows(buf, cols, row_fft);
    let mut t = transpose(buf, rows, cols);
    fft_rows(&mut t, rows, col_fft);
    *buf = transpose(&t, cols, rows);
}
