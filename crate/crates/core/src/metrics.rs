//! Reference metrics: PSNR between images and endpoint error between flows.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::raster::{ImageBuffer, UVField};

/// Peak sample value of 8-bit channels.
pub const MAX_VALUE: f64 = 255.0;

/// PSNR in decibels, or the sentinel for identical inputs.
///
/// Serialises as a number, or as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    Finite(f64),
    Infinite,
}

impl Psnr {
    pub fn finite(self) -> Option<f64> {
        match self {
            Psnr::Finite(db) => Some(db),
            Psnr::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Psnr::Infinite
    }

    /// Infinity for the sentinel.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psnr::Finite(db) => write!(f, "{db:.4} dB"),
            Psnr::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Psnr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Psnr::Finite(db) => s.serialize_f64(*db),
            Psnr::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Psnr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(db) => Ok(Psnr::Finite(db)),
            Raw::Str(s) if s == "inf" => Ok(Psnr::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

/// Mean squared error over every channel of every pixel.
pub fn mse(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(Error::SizeMismatch {
            expected: a.dims(),
            actual: b.dims(),
        });
    }
    let sum: f64 = a
        .as_raw()
        .par_iter()
        .zip(b.as_raw().par_iter())
        .map(|(&p, &q)| {
            let d = p as f64 - q as f64;
            d * d
        })
        .sum();
    Ok(sum / a.as_raw().len() as f64)
}

pub fn psnr(a: &ImageBuffer, b: &ImageBuffer) -> Result<Psnr> {
    let m = mse(a, b)?;
    Ok(if m == 0.0 {
        Psnr::Infinite
    } else {
        Psnr::Finite(10.0 * (MAX_VALUE * MAX_VALUE / m).log10())
    })
}

/// Mean per-pixel Euclidean distance between two flows.
pub fn epe(pred: &UVField, gt: &UVField) -> Result<f64> {
    if pred.dims() != gt.dims() {
        return Err(Error::SizeMismatch {
            expected: gt.dims(),
            actual: pred.dims(),
        });
    }
    let n = pred.u().len();
    let sum: f64 = (0..n)
        .into_par_iter()
        .map(|i| (pred.u()[i] - gt.u()[i]).hypot(pred.v()[i] - gt.v()[i]))
        .sum();
    Ok(sum / n as f64)
}

/// Metrics for one prediction against its ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairMetrics {
    pub id: String,
    pub psnr: Psnr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epe: Option<f64>,
}

/// Aggregate over a set of pairs. Infinite PSNRs are counted, not averaged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub pairs: usize,
    pub infinite_psnr: usize,
    /// Mean over the finite PSNRs; absent when there are none.
    pub mean_psnr: Option<f64>,
    pub epe_pairs: usize,
    pub mean_epe: Option<f64>,
}

impl MetricSummary {
    pub fn from_pairs(pairs: &[PairMetrics]) -> Self {
        let finite: Vec<f64> = pairs.iter().filter_map(|p| p.psnr.finite()).collect();
        let epes: Vec<f64> = pairs.iter().filter_map(|p| p.epe).collect();
        let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
        Self {
            pairs: pairs.len(),
            infinite_psnr: pairs.len() - finite.len(),
            mean_psnr: mean(&finite),
            epe_pairs: epes.len(),
            mean_epe: mean(&epes),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_offset_of_sixteen() {
        let a = ImageBuffer::filled(8, 6, [100, 120, 128]).unwrap();
        let b = ImageBuffer::filled(8, 6, [116, 136, 144]).unwrap();
        assert_eq!(mse(&a, &b).unwrap(), 256.0);
        let db = psnr(&a, &b).unwrap().finite().unwrap();
        assert!((db - 24.0484).abs() < 1e-4, "{db}");
    }

    #[test]
    fn one_channel_full_scale() {
        // Every pixel differs by 255 in one channel, so the MSE is 255^2 / 3
        // just as for a single pixel.
        let a = ImageBuffer::filled(2, 2, [0, 40, 90]).unwrap();
        let b = ImageBuffer::filled(2, 2, [255, 40, 90]).unwrap();
        let db = psnr(&a, &b).unwrap().finite().unwrap();
        assert!((db - 10.0 * 3f64.log10()).abs() < 1e-12);
        assert!((db - 4.77).abs() < 0.005);
    }

    #[test]
    fn identical_is_infinite() {
        let a = ImageBuffer::filled(3, 3, [7; 3]).unwrap();
        assert_eq!(psnr(&a, &a).unwrap(), Psnr::Infinite);
    }

    #[test]
    fn mismatch_rejected() {
        let a = ImageBuffer::filled(3, 3, [0; 3]).unwrap();
        let b = ImageBuffer::filled(3, 4, [0; 3]).unwrap();
        assert!(psnr(&a, &b).is_err());
        assert!(epe(&UVField::zeros(2, 2).unwrap(), &UVField::zeros(2, 3).unwrap()).is_err());
    }

    #[test]
    fn constant_flow_offset() {
        let gt = UVField::zeros(5, 4).unwrap();
        let pred = UVField::constant(5, 4, 3.0, 4.0).unwrap();
        assert_eq!(epe(&pred, &gt).unwrap(), 5.0);
        assert_eq!(epe(&gt, &gt).unwrap(), 0.0);
    }

    #[test]
    fn sentinel_round_trips_through_json() {
        let p = PairMetrics {
            id: "a".into(),
            psnr: Psnr::Infinite,
            epe: Some(0.0),
        };
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"id":"a","psnr":"inf","epe":0.0}"#);
        assert_eq!(serde_json::from_str::<PairMetrics>(&s).unwrap(), p);
        let q: PairMetrics = serde_json::from_str(r#"{"id":"b","psnr":31.5}"#).unwrap();
        assert_eq!(q.psnr, Psnr::Finite(31.5));
    }

    #[test]
    fn summary_excludes_infinite_from_mean() {
        let pairs = vec![
            PairMetrics { id: "a".into(), psnr: Psnr::Infinite, epe: None },
            PairMetrics { id: "b".into(), psnr: Psnr::Finite(30.0), epe: Some(1.0) },
            PairMetrics { id: "c".into(), psnr: Psnr::Finite(20.0), epe: Some(3.0) },
        ];
        let s = MetricSummary::from_pairs(&pairs);
        assert_eq!(s.pairs, 3);
        assert_eq!(s.infinite_psnr, 1);
        assert_eq!(s.mean_psnr, Some(25.0));
        assert_eq!(s.epe_pairs, 2);
        assert_eq!(s.mean_epe, Some(2.0));
    }
}
