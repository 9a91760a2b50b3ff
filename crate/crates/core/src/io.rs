//! PNG input and output.

use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::ImageBuffer;

/// Decodes any PNG colour type to 8-bit RGB; alpha is discarded.
pub fn load_png(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    let path = path.as_ref();
    let img = image::ImageReader::open(path)
        .map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?
        .with_guessed_format()
        .map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?
        .decode()
        .map_err(|source| Error::Image {
            path: path.to_owned(),
            source,
        })?
        .into_rgb8();
    let (w, h) = img.dimensions();
    ImageBuffer::new(w as usize, h as usize, img.into_raw())
}

pub fn save_png(path: impl AsRef<Path>, img: &ImageBuffer) -> Result<()> {
    let path = path.as_ref();
    image::save_buffer_with_format(
        path,
        img.as_raw(),
        img.width() as u32,
        img.height() as u32,
        image::ExtendedColorType::Rgb8,
        image::ImageFormat::Png,
    )
    .map_err(|source| Error::Image {
        path: path.to_owned(),
        source,
    })
}
