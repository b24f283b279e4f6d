//! Whole-image embedding and extraction.
//!
//! Slots are horizontal, non-overlapping pixel pairs enumerated
//! channel-major, then row-major; an odd last column is never paired. A
//! single keyed permutation orders every slot of every channel, and each
//! slot only ever touches its own channel.

use std::fmt;
use std::str::FromStr;

use crate::bits::Bitstream;
use crate::codec::{PixelPair, RangeEntry, RangeTable};
use crate::error::StegoError;
use crate::frame::{decode_header, HEADER_BITS};
use crate::image::ImageBuffer;
use crate::keystream::{permutation, StegoKey};
use crate::par::{map_reduce_chunks, Exec};

const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slot {
    pub channel: usize,
    pub row: usize,
    /// Covers columns `2 * col_pair` and `2 * col_pair + 1`.
    pub col_pair: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EmbedMode {
    /// APVD over the keyed pseudorandom slot order.
    #[default]
    ApvdPrng,
    /// APVD over the plain raster slot order; the key is ignored.
    ApvdSeq,
    /// Replace the given number (1..=4) of low bits per sample, samples
    /// visited in keyed order.
    Lsb(u8),
}

impl fmt::Display for EmbedMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmbedMode::ApvdPrng => f.write_str("apvd-prng"),
            EmbedMode::ApvdSeq => f.write_str("apvd-seq"),
            EmbedMode::Lsb(_) => f.write_str("lsb"),
        }
    }
}

impl FromStr for EmbedMode {
    type Err = String;

    /// Parses `apvd-prng`, `apvd-seq` or `lsb` (1-bit; see
    /// [`EmbedMode::with_lsb_depth`]).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "apvd-prng" => Ok(EmbedMode::ApvdPrng),
            "apvd-seq" => Ok(EmbedMode::ApvdSeq),
            "lsb" => Ok(EmbedMode::Lsb(1)),
            other => Err(format!(
                "unknown mode {other:?} (expected apvd-prng, apvd-seq or lsb)"
            )),
        }
    }
}

impl EmbedMode {
    pub fn with_lsb_depth(self, k: u8) -> Self {
        match self {
            EmbedMode::Lsb(_) => EmbedMode::Lsb(k),
            other => other,
        }
    }
}

/// Index arithmetic for the slot list of one image.
#[derive(Debug, Clone, Copy)]
struct SlotGrid {
    width: usize,
    height: usize,
    pairs_per_row: usize,
}

impl SlotGrid {
    fn of(image: &ImageBuffer) -> (Self, usize) {
        let grid = SlotGrid {
            width: image.width(),
            height: image.height(),
            pairs_per_row: image.width() / 2,
        };
        (grid, image.channels() * image.height() * grid.pairs_per_row)
    }

    #[inline]
    fn slot(&self, i: usize) -> Slot {
        let per_channel = self.height * self.pairs_per_row;
        let channel = i / per_channel;
        let rem = i % per_channel;
        Slot {
            channel,
            row: rem / self.pairs_per_row,
            col_pair: rem % self.pairs_per_row,
        }
    }

    /// Sample index of the first pixel of slot `i`; the second follows it.
    #[inline]
    fn first_sample(&self, i: usize) -> usize {
        let s = self.slot(i);
        (s.channel * self.height + s.row) * self.width + 2 * s.col_pair
    }
}

#[inline]
fn pair_at(samples: &[u8], at: usize) -> PixelPair {
    PixelPair::new(samples[at], samples[at + 1])
}

pub fn enumerate_slots(image: &ImageBuffer) -> Vec<Slot> {
    let (grid, n) = SlotGrid::of(image);
    (0..n).map(|i| grid.slot(i)).collect()
}

/// Exact number of bits the cover can carry: the sum of per-pair
/// capacities. Independent of key and slot order.
pub fn estimate_capacity(cover: &ImageBuffer, table: &RangeTable) -> u64 {
    estimate_capacity_with(cover, table, Exec::default())
}

pub fn estimate_capacity_with(cover: &ImageBuffer, table: &RangeTable, exec: Exec) -> u64 {
    let (grid, n) = SlotGrid::of(cover);
    let samples = cover.samples();
    map_reduce_chunks(
        exec,
        n,
        CHUNK,
        0u64,
        |r| {
            r.map(|i| pair_at(samples, grid.first_sample(i)).capacity_bits(table) as u64)
                .sum()
        },
        |a, b| a + b,
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacitySummary {
    pub total_bits: u64,
    pub usable_pairs: u64,
    pub skipped_pairs: u64,
    /// Usable pair count per range entry, in table order.
    pub per_range: Vec<(RangeEntry, u64)>,
}

pub fn capacity_summary(cover: &ImageBuffer, table: &RangeTable) -> CapacitySummary {
    capacity_summary_with(cover, table, Exec::default())
}

pub fn capacity_summary_with(
    cover: &ImageBuffer,
    table: &RangeTable,
    exec: Exec,
) -> CapacitySummary {
    let (grid, n) = SlotGrid::of(cover);
    let samples = cover.samples();
    let n_ranges = table.entries().len();
    // [usable histogram..., skipped]
    let counts = map_reduce_chunks(
        exec,
        n,
        CHUNK,
        vec![0u64; n_ranges + 1],
        |r| {
            let mut c = vec![0u64; n_ranges + 1];
            for i in r {
                let pair = pair_at(samples, grid.first_sample(i));
                if pair.is_usable(table) {
                    c[table.locate_index(pair.difference())] += 1;
                } else {
                    c[n_ranges] += 1;
                }
            }
            c
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    let per_range: Vec<(RangeEntry, u64)> = table
        .entries()
        .iter()
        .copied()
        .zip(counts.iter().copied())
        .collect();
    CapacitySummary {
        total_bits: per_range
            .iter()
            .map(|(e, c)| e.capacity_bits as u64 * c)
            .sum(),
        usable_pairs: per_range.iter().map(|(_, c)| c).sum(),
        skipped_pairs: counts[n_ranges],
        per_range,
    }
}

/// Walks `order`, reading the next `k` payload bits per call; the final
/// chunk is zero-padded on the right.
struct BitFeed<'a> {
    bits: &'a Bitstream,
    cursor: usize,
}

impl BitFeed<'_> {
    fn done(&self) -> bool {
        self.cursor >= self.bits.len()
    }

    fn take(&mut self, k: u32) -> u32 {
        let take = (k as usize).min(self.bits.len() - self.cursor);
        let v = if take == 0 {
            0
        } else {
            self.bits
                .read_bits(self.cursor, take as u32)
                .expect("bounds checked")
                << (k as usize - take)
        };
        self.cursor += take;
        v
    }
}

fn slot_order(n: usize, key: StegoKey, mode: EmbedMode) -> Box<dyn Iterator<Item = usize>> {
    match mode {
        EmbedMode::ApvdSeq => Box::new(0..n),
        _ => Box::new(permutation(n, key).order().to_vec().into_iter()),
    }
}

/// Hides an already framed stream in `cover`.
pub fn embed(
    cover: &ImageBuffer,
    payload: &Bitstream,
    key: StegoKey,
    mode: EmbedMode,
    table: &RangeTable,
) -> Result<ImageBuffer, StegoError> {
    if let EmbedMode::Lsb(k) = mode {
        return lsb_embed(cover, payload, key, k);
    }
    let (grid, n) = SlotGrid::of(cover);
    let mut stego = cover.clone();
    let mut feed = BitFeed {
        bits: payload,
        cursor: 0,
    };
    let samples = stego.samples_mut();
    for i in slot_order(n, key, mode) {
        if feed.done() {
            break;
        }
        let at = grid.first_sample(i);
        let pair = pair_at(samples, at);
        let k = pair.capacity_bits(table);
        if k == 0 {
            continue;
        }
        let out = pair.embed(feed.take(k), table)?;
        samples[at] = out.first;
        samples[at + 1] = out.second;
    }
    if !feed.done() {
        return Err(StegoError::CapacityExceeded {
            needed: payload.len() as u64,
            available: estimate_capacity(cover, table),
        });
    }
    Ok(stego)
}

/// Accumulates extracted bits until the header's declared length is met.
struct Collector {
    bits: Bitstream,
    total: Option<usize>,
}

impl Collector {
    fn new() -> Self {
        Self {
            bits: Bitstream::with_capacity(HEADER_BITS),
            total: None,
        }
    }

    /// Returns `Ok(true)` once the full framed stream is collected.
    fn push(&mut self, value: u32, k: u32) -> Result<bool, StegoError> {
        self.bits.push_bits(value, k);
        if self.total.is_none() && self.bits.len() >= HEADER_BITS {
            let header = decode_header(&self.bits)?;
            self.total = Some(header.total_bits() as usize);
        }
        Ok(self.total.is_some_and(|t| self.bits.len() >= t))
    }

    fn finish(mut self) -> Result<Bitstream, StegoError> {
        match self.total {
            Some(t) if self.bits.len() >= t => {
                self.bits.truncate(t);
                Ok(self.bits)
            }
            Some(t) => Err(StegoError::Truncated {
                needed: t as u64,
                available: self.bits.len() as u64,
            }),
            None => Err(StegoError::Truncated {
                needed: HEADER_BITS as u64,
                available: self.bits.len() as u64,
            }),
        }
    }
}

/// Recovers the framed stream (header included, padding removed).
pub fn extract(
    stego: &ImageBuffer,
    key: StegoKey,
    mode: EmbedMode,
    table: &RangeTable,
) -> Result<Bitstream, StegoError> {
    if let EmbedMode::Lsb(k) = mode {
        return lsb_extract(stego, key, k);
    }
    let (grid, n) = SlotGrid::of(stego);
    let samples = stego.samples();
    let mut acc = Collector::new();
    for i in slot_order(n, key, mode) {
        let pair = pair_at(samples, grid.first_sample(i));
        if !pair.is_usable(table) {
            continue;
        }
        let (s, k) = pair.extract(table)?;
        if acc.push(s, k)? {
            break;
        }
    }
    acc.finish()
}

fn check_lsb_depth(k: u8) -> Result<(), StegoError> {
    if (1..=4).contains(&k) {
        Ok(())
    } else {
        Err(StegoError::InvalidLsbDepth(k))
    }
}

pub fn lsb_capacity(cover: &ImageBuffer, k_lsb: u8) -> u64 {
    cover.samples().len() as u64 * k_lsb as u64
}

pub fn lsb_embed(
    cover: &ImageBuffer,
    payload: &Bitstream,
    key: StegoKey,
    k_lsb: u8,
) -> Result<ImageBuffer, StegoError> {
    check_lsb_depth(k_lsb)?;
    let k = k_lsb as u32;
    let mask = (1u8 << k_lsb) - 1;
    let mut stego = cover.clone();
    let n = stego.samples().len();
    let samples = stego.samples_mut();
    let mut feed = BitFeed {
        bits: payload,
        cursor: 0,
    };
    for i in permutation(n, key).iter() {
        if feed.done() {
            break;
        }
        samples[i] = (samples[i] & !mask) | feed.take(k) as u8;
    }
    if !feed.done() {
        return Err(StegoError::CapacityExceeded {
            needed: payload.len() as u64,
            available: lsb_capacity(cover, k_lsb),
        });
    }
    Ok(stego)
}

pub fn lsb_extract(stego: &ImageBuffer, key: StegoKey, k_lsb: u8) -> Result<Bitstream, StegoError> {
    check_lsb_depth(k_lsb)?;
    let mask = (1u8 << k_lsb) - 1;
    let samples = stego.samples();
    let mut acc = Collector::new();
    for i in permutation(samples.len(), key).iter() {
        if acc.push((samples[i] & mask) as u32, k_lsb as u32)? {
            break;
        }
    }
    acc.finish()
}
