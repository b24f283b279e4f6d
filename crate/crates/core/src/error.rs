use thiserror::Error;

/// Errors raised by framing, the pair codec, the embedding pipeline and the
/// quality metrics.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StegoError {
    #[error("value {value} does not fit in {bits} bits")]
    ValueOutOfRange { value: u32, bits: u32 },

    #[error("bit width {0} outside 1..=16")]
    InvalidBitWidth(u32),

    #[error("read of {len} bits at offset {cursor} overruns a {available}-bit stream")]
    ReadOutOfBounds {
        cursor: usize,
        len: u32,
        available: usize,
    },

    #[error("payload length of {0} bits does not fit the 32-bit header field")]
    PayloadTooLong(u64),

    #[error("image dimensions {width}x{height} exceed the 16-bit inner header")]
    DimensionsTooLarge { width: usize, height: usize },

    /// Bad magic, version, type code or checksum. Almost always a wrong
    /// key, mode or range table, or an image that carries no payload.
    #[error("invalid payload header: {0}")]
    InvalidHeader(&'static str),

    #[error("stream ended after {available} bits, {needed} required")]
    Truncated { needed: u64, available: u64 },

    #[error("malformed payload: {0}")]
    MalformedPayload(String),

    #[error("pixel pair falls outside [0, 255] after adjustment")]
    BoundaryOverflow,

    #[error("pixel pair ({0}, {1}) is not usable for embedding")]
    UnusablePair(u8, u8),

    #[error("secret {secret} does not fit in the pair's {capacity} bits")]
    SecretOutOfRange { secret: u32, capacity: u32 },

    #[error("payload needs {needed} bits but the cover only offers {available}")]
    CapacityExceeded { needed: u64, available: u64 },

    #[error("image dimensions differ: {0:?} vs {1:?}")]
    DimensionMismatch((usize, usize, usize), (usize, usize, usize)),

    #[error("invalid range table: {0}")]
    InvalidRangeTable(String),

    #[error("LSB depth {0} outside 1..=4")]
    InvalidLsbDepth(u8),
}
