#![allow(dead_code)]

use std::path::Path;

use distortkit_core::io::save_png;
use distortkit_core::ImageBuffer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Smooth colour ramps with a seeded texture, so warps visibly move content.
pub fn frame(w: usize, h: usize, seed: u64) -> ImageBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b): (f64, f64) = (rng.random_range(0.02..0.2), rng.random_range(0.02..0.2));
    ImageBuffer::from_fn(w, h, |x, y| {
        let (x, y) = (x as f64, y as f64);
        [
            (127.5 + 120.0 * (a * x).sin()) as u8,
            (127.5 + 120.0 * (b * y).cos()) as u8,
            (127.5 + 120.0 * (a * x + b * y).sin()) as u8,
        ]
    })
    .unwrap()
}

/// Writes `n` frames named `img_000.png`, ... into `dir`.
pub fn write_corpus(dir: &Path, n: usize, w: usize, h: usize) {
    std::fs::create_dir_all(dir).unwrap();
    for i in 0..n {
        save_png(dir.join(format!("img_{i:03}.png")), &frame(w, h, i as u64)).unwrap();
    }
}

pub fn config_file(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(&path, body).unwrap();
    path
}
