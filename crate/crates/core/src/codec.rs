//! Pair-level APVD arithmetic.
//!
//! A pair's absolute difference selects a range `[l, u]` from a
//! [`RangeTable`]; the range's width fixes how many bits the pair carries.
//! Embedding first narrows the pair to its *canonical base* (difference
//! exactly `l`) and then widens it by the secret value `s`, so the stego
//! difference is `l + s`. The base is unchanged by embedding, which makes
//! the boundary test below identical on both sides of the channel.
//!
//! Odd residues are split with the low pixel taking the ceiling and the
//! high pixel the floor, in both directions. For equal pixels the first
//! element plays the low role in [`PixelPair::widen`]; [`PixelPair::embed`]
//! additionally keeps the orientation of the original pair.

use std::fmt;

use crate::error::StegoError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PixelPair {
    pub first: u8,
    pub second: u8,
}

impl PixelPair {
    pub const fn new(first: u8, second: u8) -> Self {
        Self { first, second }
    }

    /// `|second - first|`
    #[inline]
    pub fn difference(self) -> u8 {
        self.first.abs_diff(self.second)
    }

    #[inline]
    fn first_is_low(self) -> bool {
        self.first <= self.second
    }

    /// Narrows the pair so that its difference equals the lower bound of
    /// its range, keeping the positions of the low and high pixel.
    pub fn canonical_base(self, table: &RangeTable) -> PixelPair {
        let d = self.difference();
        let m = (d - table.locate(d).lower) as i32;
        self.shift((m + 1) / 2, -(m / 2))
    }

    /// Moves the low pixel down by `ceil(m/2)` and the high pixel up by
    /// `floor(m/2)`.
    pub fn widen(self, m: u8) -> Result<PixelPair, StegoError> {
        let m = m as i32;
        let (lo, hi) = self.shifted_values(-(m + 1) / 2, m / 2);
        if !(0..=255).contains(&lo) || !(0..=255).contains(&hi) {
            return Err(StegoError::BoundaryOverflow);
        }
        Ok(self.place(lo as u8, hi as u8))
    }

    /// True when widening the canonical base by the full range width stays
    /// inside `[0, 255]`. Embedding never changes the answer.
    pub fn is_usable(self, table: &RangeTable) -> bool {
        let entry = table.locate(self.difference());
        let base = self.canonical_base(table);
        let w = (entry.upper - entry.lower) as i32;
        let (lo, hi) = base.shifted_values(-(w + 1) / 2, w / 2);
        lo >= 0 && hi <= 255
    }

    /// Bits this pair carries; 0 for unusable pairs.
    pub fn capacity_bits(self, table: &RangeTable) -> u32 {
        if self.is_usable(table) {
            table.locate(self.difference()).capacity_bits
        } else {
            0
        }
    }

    pub fn embed(self, secret: u32, table: &RangeTable) -> Result<PixelPair, StegoError> {
        if !self.is_usable(table) {
            return Err(StegoError::UnusablePair(self.first, self.second));
        }
        let capacity = table.locate(self.difference()).capacity_bits;
        if secret >> capacity != 0 {
            return Err(StegoError::SecretOutOfRange { secret, capacity });
        }
        let base = self.canonical_base(table);
        let out = base.widen(secret as u8)?;
        // A tied base has lost the pair's orientation; restore it so the
        // high pixel stays high.
        if base.first == base.second && self.first > self.second {
            return Ok(PixelPair::new(out.second, out.first));
        }
        Ok(out)
    }

    /// Returns `(secret, bit count)`.
    pub fn extract(self, table: &RangeTable) -> Result<(u32, u32), StegoError> {
        if !self.is_usable(table) {
            return Err(StegoError::UnusablePair(self.first, self.second));
        }
        let d = self.difference();
        let entry = table.locate(d);
        Ok(((d - entry.lower) as u32, entry.capacity_bits))
    }

    #[inline]
    fn shifted_values(self, lo_delta: i32, hi_delta: i32) -> (i32, i32) {
        let (lo, hi) = if self.first_is_low() {
            (self.first, self.second)
        } else {
            (self.second, self.first)
        };
        (lo as i32 + lo_delta, hi as i32 + hi_delta)
    }

    #[inline]
    fn shift(self, lo_delta: i32, hi_delta: i32) -> PixelPair {
        let (lo, hi) = self.shifted_values(lo_delta, hi_delta);
        self.place(lo as u8, hi as u8)
    }

    #[inline]
    fn place(self, lo: u8, hi: u8) -> PixelPair {
        if self.first_is_low() {
            PixelPair::new(lo, hi)
        } else {
            PixelPair::new(hi, lo)
        }
    }
}

impl From<(u8, u8)> for PixelPair {
    fn from((first, second): (u8, u8)) -> Self {
        Self::new(first, second)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RangeEntry {
    pub lower: u8,
    pub upper: u8,
    /// `floor(log2(upper - lower + 1))`
    pub capacity_bits: u32,
}

impl RangeEntry {
    fn new(lower: u8, upper: u8) -> Result<Self, StegoError> {
        if lower > upper {
            return Err(StegoError::InvalidRangeTable(format!(
                "range [{lower}, {upper}] is inverted"
            )));
        }
        let width = (upper - lower) as u32 + 1;
        let capacity_bits = width.ilog2();
        if capacity_bits == 0 {
            return Err(StegoError::InvalidRangeTable(format!(
                "range [{lower}, {upper}] cannot carry a bit"
            )));
        }
        Ok(Self {
            lower,
            upper,
            capacity_bits,
        })
    }

    pub fn contains(&self, d: u8) -> bool {
        (self.lower..=self.upper).contains(&d)
    }
}

impl fmt::Display for RangeEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}] k={}",
            self.lower, self.upper, self.capacity_bits
        )
    }
}

/// Partition of `[0, 255]` into difference ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeTable {
    name: String,
    entries: Vec<RangeEntry>,
    lookup: Box<[u8; 256]>,
}

/// Bounds of the built-in `default` table.
pub const DEFAULT_BOUNDS: [(u8, u8); 6] =
    [(0, 7), (8, 15), (16, 31), (32, 63), (64, 127), (128, 255)];

impl Default for RangeTable {
    fn default() -> Self {
        Self::from_bounds("default", &DEFAULT_BOUNDS).expect("built-in table is valid")
    }
}

impl RangeTable {
    /// Builds a table from ordered `(lower, upper)` rows. Capacities are
    /// derived, never supplied.
    pub fn from_bounds(name: impl Into<String>, bounds: &[(u8, u8)]) -> Result<Self, StegoError> {
        let mut entries = Vec::with_capacity(bounds.len());
        let mut next = 0u32;
        for &(l, u) in bounds {
            if l as u32 != next {
                return Err(StegoError::InvalidRangeTable(format!(
                    "range starting at {l} leaves a gap or overlap (expected {next})"
                )));
            }
            entries.push(RangeEntry::new(l, u)?);
            next = u as u32 + 1;
        }
        if next != 256 {
            return Err(StegoError::InvalidRangeTable(format!(
                "ranges end at {} instead of 255",
                next as i32 - 1
            )));
        }
        let mut lookup = Box::new([0u8; 256]);
        for (i, e) in entries.iter().enumerate() {
            for d in e.lower..=e.upper {
                lookup[d as usize] = i as u8;
            }
        }
        Ok(Self {
            name: name.into(),
            entries,
            lookup,
        })
    }

    /// Looks up a built-in table by name.
    pub fn named(name: &str) -> Option<Self> {
        match name {
            "default" => Some(Self::default()),
            _ => None,
        }
    }

    /// Parses a table file: one `lower upper` (or `lower,upper`) row per
    /// line, `#` starts a comment.
    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self, StegoError> {
        let mut bounds = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let parse = |s: &str| {
                s.parse::<u8>().map_err(|_| {
                    StegoError::InvalidRangeTable(format!("line {}: bad bound {s:?}", lineno + 1))
                })
            };
            match fields.as_slice() {
                [l, u] => bounds.push((parse(l)?, parse(u)?)),
                _ => {
                    return Err(StegoError::InvalidRangeTable(format!(
                        "line {}: expected two bounds",
                        lineno + 1
                    )))
                }
            }
        }
        Self::from_bounds(name, &bounds)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn entries(&self) -> &[RangeEntry] {
        &self.entries
    }

    #[inline]
    pub fn locate(&self, d: u8) -> RangeEntry {
        self.entries[self.lookup[d as usize] as usize]
    }

    /// Position of `d`'s range within [`entries`](Self::entries).
    #[inline]
    pub fn locate_index(&self, d: u8) -> usize {
        self.lookup[d as usize] as usize
    }
}
