//! Range normalisation and weighted multi-scale noise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::perlin::sample_perlin;
use crate::raster::ScalarField;
use crate::seed::{subseed, PurposeTag};

/// Noise scales (pixels) and their weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OctaveSpec {
    pub scales: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Default for OctaveSpec {
    /// Six octaves from 4 to 128 pixels, weighted towards fine detail.
    fn default() -> Self {
        Self {
            scales: vec![4.0, 8.0, 16.0, 32.0, 64.0, 128.0],
            weights: vec![0.30, 0.22, 0.15, 0.11, 0.08, 0.07],
        }
    }
}

impl OctaveSpec {
    pub fn new(scales: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let spec = Self { scales, weights };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.scales.is_empty() || self.scales.len() != self.weights.len() {
            return Err(Error::param(
                "octaves",
                format!(
                    "need equal, non-empty scale and weight lists (got {} and {})",
                    self.scales.len(),
                    self.weights.len()
                ),
            ));
        }
        if let Some(s) = self.scales.iter().find(|s| !(**s >= 1.0 && s.is_finite())) {
            return Err(Error::param("scales", format!("every scale must be >= 1, got {s}")));
        }
        if let Some(w) = self.weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::param("weights", format!("every weight must be > 0, got {w}")));
        }
        Ok(())
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Affine rescale of a field onto `[0, 1]` using its own extremes.
pub fn normalize_01(field: &ScalarField) -> Result<ScalarField> {
    let (lo, hi) = field.min_max();
    if hi <= lo {
        return Err(Error::DegenerateRange { value: lo });
    }
    let span = hi - lo;
    field.map(|v| (v - lo) / span)
}

/// `sum_i w_i P_i / sum_i w_i` over equally sized fields.
pub fn combine_octaves(fields: &[ScalarField], weights: &[f64]) -> Result<ScalarField> {
    let first = fields.first().ok_or_else(|| Error::param("octaves", "no fields to combine"))?;
    if fields.len() != weights.len() {
        return Err(Error::param(
            "weights",
            format!("{} fields but {} weights", fields.len(), weights.len()),
        ));
    }
    if let Some(f) = fields.iter().find(|f| f.dims() != first.dims()) {
        return Err(Error::SizeMismatch {
            expected: first.dims(),
            actual: f.dims(),
        });
    }
    // Numerator and denominator accumulate in the same order so that equal
    // inputs reproduce themselves exactly and the result never leaves [0, 1].
    let total: f64 = weights.iter().sum();
    let n = first.values().len();
    let values = (0..n)
        .map(|i| {
            let num: f64 = fields.iter().zip(weights).map(|(f, w)| w * f.values()[i]).sum();
            num / total
        })
        .collect();
    ScalarField::new(first.width(), first.height(), values)
}

/// Per-octave noise normalised to `[0, 1]`, then weight-averaged. Octave `i`
/// uses the seed `subseed(seed, i, Octave)`.
pub fn multiscale_perlin(width: usize, height: usize, octaves: &OctaveSpec, seed: u64) -> Result<ScalarField> {
    octaves.validate()?;
    let fields = octaves
        .scales
        .iter()
        .enumerate()
        .map(|(i, &s)| normalize_01(&sample_perlin(width, height, s, subseed(seed, i as u64, PurposeTag::Octave))?))
        .collect::<Result<Vec<_>>>()?;
    combine_octaves(&fields, &octaves.weights)
}
