use crate::error::StegoError;

/// Growable MSB-first bit sequence.
///
/// Bits are packed eight to a byte, first bit in the most significant
/// position, so a stream built from whole bytes exposes them unchanged via
/// [`Bitstream::as_bytes`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bitstream {
    bytes: Vec<u8>,
    len: usize,
}

impl Bitstream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        Self {
            bytes: bytes.to_vec(),
            len: bytes.len() * 8,
        }
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut s = Self::new();
        for b in bits {
            s.push(b);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed bytes; trailing bits of the last byte are zero.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        let offset = self.len % 8;
        if offset == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> offset;
        }
        self.len += 1;
    }

    /// Appends the low `k` bits of `value`, most significant first.
    pub fn write(&mut self, value: u32, k: u32) -> Result<(), StegoError> {
        if !(1..=16).contains(&k) {
            return Err(StegoError::InvalidBitWidth(k));
        }
        if value >> k != 0 {
            return Err(StegoError::ValueOutOfRange { value, bits: k });
        }
        self.push_bits(value, k);
        Ok(())
    }

    /// Unchecked variant of [`write`](Self::write) for internal callers
    /// that already hold the invariants; widths up to 32 are accepted.
    #[inline]
    pub(crate) fn push_bits(&mut self, value: u32, k: u32) {
        for i in (0..k).rev() {
            self.push((value >> i) & 1 == 1);
        }
    }

    /// Reads `k` bits at `cursor` as an MSB-first unsigned integer.
    pub fn read(&self, cursor: usize, k: u32) -> Result<u32, StegoError> {
        if !(1..=16).contains(&k) {
            return Err(StegoError::InvalidBitWidth(k));
        }
        self.read_bits(cursor, k)
    }

    pub(crate) fn read_bits(&self, cursor: usize, k: u32) -> Result<u32, StegoError> {
        if cursor + k as usize > self.len {
            return Err(StegoError::ReadOutOfBounds {
                cursor,
                len: k,
                available: self.len,
            });
        }
        Ok((cursor..cursor + k as usize).fold(0u32, |acc, i| (acc << 1) | self.bit(i) as u32))
    }

    /// # Panics
    /// If `i >= len`.
    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range");
        self.bytes[i / 8] & (0x80 >> (i % 8)) != 0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }

    pub fn extend_from(&mut self, other: &Bitstream) {
        if self.len.is_multiple_of(8) {
            self.bytes.extend_from_slice(&other.bytes);
            self.len += other.len;
        } else {
            for b in other.iter() {
                self.push(b);
            }
        }
    }

    /// Shortens the stream to `len` bits; no-op if already shorter.
    pub fn truncate(&mut self, len: usize) {
        if len >= self.len {
            return;
        }
        self.len = len;
        self.bytes.truncate(len.div_ceil(8));
        if !len.is_multiple_of(8) {
            *self.bytes.last_mut().unwrap() &= 0xFFu8 << (8 - len % 8);
        }
    }

    /// Copy of bits `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> Result<Bitstream, StegoError> {
        if start + len > self.len {
            return Err(StegoError::ReadOutOfBounds {
                cursor: start,
                len: len as u32,
                available: self.len,
            });
        }
        if start.is_multiple_of(8) {
            let mut out = Bitstream {
                bytes: self.bytes[start / 8..(start + len).div_ceil(8)].to_vec(),
                len: len.div_ceil(8) * 8,
            };
            out.truncate(len);
            return Ok(out);
        }
        Ok(Bitstream::from_bits(
            (start..start + len).map(|i| self.bit(i)),
        ))
    }
}

impl FromIterator<bool> for Bitstream {
    fn from_iter<T: IntoIterator<Item = bool>>(iter: T) -> Self {
        Self::from_bits(iter)
    }
}
