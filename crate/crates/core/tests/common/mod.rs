#![allow(dead_code)]

use std::path::PathBuf;

use apvd_core::{read_image, resize_nearest, ImageBuffer};
use rand::Rng;

/// The shared image corpus lives with the core crate; other crates in the
/// workspace include this module by path.
pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data")
}

/// `(name, image)` for every PNG in `tests/data/<sub>`, sorted by name.
pub fn corpus(sub: &str) -> Vec<(String, ImageBuffer)> {
    let mut paths: Vec<_> = std::fs::read_dir(data_dir().join(sub))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "png"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            (
                p.file_stem().unwrap().to_string_lossy().into_owned(),
                read_image(&p).unwrap(),
            )
        })
        .collect()
}

/// A cover of the requested size: a random crop of a natural image, or one
/// of a few synthetic patterns including saturated extremes.
pub fn random_cover(
    rng: &mut impl Rng,
    natural: &[ImageBuffer],
    w: usize,
    h: usize,
    channels: usize,
) -> ImageBuffer {
    match rng.gen_range(0..5) {
        0 | 1 => {
            let pool: Vec<_> = natural
                .iter()
                .filter(|i| i.channels() == channels)
                .collect();
            let src = pool[rng.gen_range(0..pool.len())];
            let src = if src.width() < w || src.height() < h {
                resize_nearest(src, w.max(src.width()), h.max(src.height()))
            } else {
                src.clone()
            };
            let (x0, y0) = (
                rng.gen_range(0..=src.width() - w),
                rng.gen_range(0..=src.height() - h),
            );
            ImageBuffer::from_fn(w, h, channels, |c, r, col| src.get(c, y0 + r, x0 + col))
        }
        2 => {
            let seed: u64 = rng.gen();
            let mut local = rand_chacha::ChaCha8Rng::from_seed_u64(seed);
            ImageBuffer::from_fn(w, h, channels, |_, _, _| local.gen())
        }
        3 => ImageBuffer::from_fn(w, h, channels, |c, r, col| {
            ((r * 255 / h.max(1) + col + c * 40) % 256) as u8
        }),
        _ => {
            // mostly near-saturated with occasional mid-tones
            let seed: u64 = rng.gen();
            let mut local = rand_chacha::ChaCha8Rng::from_seed_u64(seed);
            ImageBuffer::from_fn(w, h, channels, |_, _, _| match local.gen_range(0..4) {
                0 => local.gen_range(0..4),
                1 => local.gen_range(252..=255),
                _ => local.gen_range(40..220),
            })
        }
    }
}

pub trait FromSeedU64 {
    fn from_seed_u64(seed: u64) -> Self;
}

impl FromSeedU64 for rand_chacha::ChaCha8Rng {
    fn from_seed_u64(seed: u64) -> Self {
        rand::SeedableRng::seed_from_u64(seed)
    }
}
