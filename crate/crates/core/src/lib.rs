//! Adaptive pixel-value-differencing (APVD) steganography with a keyed
//! pseudorandom pixel-pair order.
//!
//! A secret payload (raw bytes or an image) is framed behind a 64-bit
//! header, then spread over the horizontal pixel pairs of a cover image in
//! an order drawn from a seeded SplitMix64 Fisher–Yates shuffle. Each pair
//! carries as many bits as its difference range allows; pairs that could
//! overflow `[0, 255]` are skipped identically by embedder and extractor.
//!
//! ```
//! use apvd_core::{embed, extract, frame_payload, parse_payload, EmbedMode, ImageBuffer,
//!     Payload, RangeTable, StegoKey};
//!
//! let cover = ImageBuffer::from_fn(64, 64, 1, |_, r, c| ((r * 3 + c * 5) % 200) as u8 + 20);
//! let secret = Payload::Bytes(b"attack at dawn".to_vec());
//! let framed = frame_payload(&secret).unwrap();
//! let key = StegoKey::new(42);
//! let table = RangeTable::default();
//!
//! let stego = embed(&cover, &framed, key, EmbedMode::ApvdPrng, &table).unwrap();
//! let recovered = extract(&stego, key, EmbedMode::ApvdPrng, &table).unwrap();
//! assert_eq!(parse_payload(&recovered).unwrap(), secret);
//! ```

pub mod bits;
pub mod codec;
pub mod crc;
pub mod error;
pub mod frame;
pub mod image;
pub mod imageio;
pub mod keystream;
pub mod metrics;
pub mod par;
pub mod pipeline;

pub use bits::Bitstream;
pub use codec::{PixelPair, RangeEntry, RangeTable};
pub use crc::crc8;
pub use error::StegoError;
pub use frame::{
    decode_header, encode_header, frame_bits, frame_payload, parse_payload, Payload, PayloadHeader,
    PayloadType, HEADER_BITS,
};
pub use image::ImageBuffer;
pub use imageio::{read_image, resize_nearest, write_image, ImageFormat, ImageIoError};
pub use keystream::{derive_seed, permutation, SlotPermutation, SplitMix64, StegoKey};
pub use metrics::{
    ber, format_db, mse, psnr, psnr_from_mse, quality_report, quality_report_with, ssim_global,
    uiq, QualityReport,
};
pub use par::Exec;
pub use pipeline::{
    capacity_summary, capacity_summary_with, embed, enumerate_slots, estimate_capacity,
    estimate_capacity_with, extract, lsb_capacity, lsb_embed, lsb_extract, CapacitySummary,
    EmbedMode, Slot,
};
