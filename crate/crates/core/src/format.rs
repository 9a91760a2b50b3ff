//! Binary field formats.
//!
//! ```text
//! UVF1: b"UVF1" | width: u32 LE | height: u32 LE | (u: f32 LE, v: f32 LE) * width * height
//! KMF1: b"KMF1" | width: u32 LE | height: u32 LE | value: f32 LE * width * height
//! ```
//!
//! Samples are row-major. Values are stored as `f32`; reading widens them back
//! to `f64`.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::{ScalarField, UVField};

pub const UVF_MAGIC: [u8; 4] = *b"UVF1";
pub const KMF_MAGIC: [u8; 4] = *b"KMF1";
pub const HEADER_LEN: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("bad magic at byte offset 0: expected {expected:?}, found {found:?}")]
    BadMagic { expected: String, found: Vec<u8> },

    #[error("truncated file: expected {expected} bytes, found {actual} (data ends at byte offset {actual})")]
    Truncated { expected: usize, actual: usize },

    #[error("unexpected trailing data: expected {expected} bytes, found {actual} (extra data starts at byte offset {expected})")]
    TrailingData { expected: usize, actual: usize },

    #[error("invalid header at byte offset 4: dimensions {width}x{height}")]
    BadDimensions { width: u32, height: u32 },

    #[error("non-finite sample at byte offset {offset}")]
    NonFinite { offset: usize },
}

/// Which field format a buffer holds, judged by its magic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Uvf,
    Kmf,
}

pub fn sniff(bytes: &[u8]) -> Result<FieldKind, FormatError> {
    match bytes.get(..4) {
        Some(m) if m == UVF_MAGIC => Ok(FieldKind::Uvf),
        Some(m) if m == KMF_MAGIC => Ok(FieldKind::Kmf),
        other => Err(FormatError::BadMagic {
            expected: "UVF1 or KMF1".into(),
            found: other.unwrap_or(bytes).to_vec(),
        }),
    }
}

fn header(magic: [u8; 4], width: usize, height: usize, capacity: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(capacity);
    out.extend_from_slice(&magic);
    out.extend_from_slice(&(width as u32).to_le_bytes());
    out.extend_from_slice(&(height as u32).to_le_bytes());
    out
}

/// Validates magic and length, returning `(width, height)`.
fn parse_header(bytes: &[u8], magic: [u8; 4], per_pixel: usize) -> Result<(usize, usize), FormatError> {
    if bytes.len() < 4 || bytes[..4] != magic {
        return Err(FormatError::BadMagic {
            expected: String::from_utf8_lossy(&magic).into_owned(),
            found: bytes[..bytes.len().min(4)].to_vec(),
        });
    }
    if bytes.len() < HEADER_LEN {
        return Err(FormatError::Truncated {
            expected: HEADER_LEN,
            actual: bytes.len(),
        });
    }
    let width = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    let height = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if width == 0 || height == 0 {
        return Err(FormatError::BadDimensions { width, height });
    }
    let expected = (width as usize)
        .checked_mul(height as usize)
        .and_then(|n| n.checked_mul(per_pixel))
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or(FormatError::BadDimensions { width, height })?;
    if bytes.len() < expected {
        return Err(FormatError::Truncated {
            expected,
            actual: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(FormatError::TrailingData {
            expected,
            actual: bytes.len(),
        });
    }
    Ok((width as usize, height as usize))
}

fn read_f32s(bytes: &[u8]) -> Result<Vec<f64>, FormatError> {
    bytes
        .chunks_exact(4)
        .enumerate()
        .map(|(i, c)| {
            let v = f32::from_le_bytes(c.try_into().unwrap());
            if v.is_finite() {
                Ok(v as f64)
            } else {
                Err(FormatError::NonFinite {
                    offset: HEADER_LEN + 4 * i,
                })
            }
        })
        .collect()
}

pub fn encode_uvf(field: &UVField) -> Vec<u8> {
    let (w, h) = field.dims();
    let mut out = header(UVF_MAGIC, w, h, HEADER_LEN + 8 * w * h);
    for (u, v) in field.u().iter().zip(field.v()) {
        out.extend_from_slice(&(*u as f32).to_le_bytes());
        out.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    out
}

pub fn decode_uvf(bytes: &[u8]) -> Result<UVField> {
    let (w, h) = parse_header(bytes, UVF_MAGIC, 8)?;
    let samples = read_f32s(&bytes[HEADER_LEN..])?;
    let (u, v) = samples.chunks_exact(2).map(|p| (p[0], p[1])).unzip();
    UVField::new(w, h, u, v)
}

pub fn encode_kmf(field: &ScalarField) -> Vec<u8> {
    let (w, h) = field.dims();
    let mut out = header(KMF_MAGIC, w, h, HEADER_LEN + 4 * w * h);
    for v in field.values() {
        out.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    out
}

pub fn decode_kmf(bytes: &[u8]) -> Result<ScalarField> {
    let (w, h) = parse_header(bytes, KMF_MAGIC, 4)?;
    ScalarField::new(w, h, read_f32s(&bytes[HEADER_LEN..])?)
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn write_uvf(path: impl AsRef<Path>, field: &UVField) -> Result<()> {
    write_file(path.as_ref(), &encode_uvf(field))
}

pub fn read_uvf(path: impl AsRef<Path>) -> Result<UVField> {
    decode_uvf(&read_file(path.as_ref())?)
}

pub fn write_kmf(path: impl AsRef<Path>, field: &ScalarField) -> Result<()> {
    write_file(path.as_ref(), &encode_kmf(field))
}

pub fn read_kmf(path: impl AsRef<Path>) -> Result<ScalarField> {
    decode_kmf(&read_file(path.as_ref())?)
}
