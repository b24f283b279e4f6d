//! Payload framing.
//!
//! Every embedded stream starts with a 64-bit header:
//!
//! | byte | content                          |
//! |------|----------------------------------|
//! | 0    | magic `0xA7`                     |
//! | 1    | version `0x01`                   |
//! | 2    | payload type                     |
//! | 3..7 | payload length in bits, BE u32   |
//! | 7    | CRC-8 of bytes 0..7              |
//!
//! Image payloads add an inner header (width, height as BE u16) followed by
//! row-major samples, RGB interleaved per pixel. The length field counts
//! every bit after the outer header.

use crate::bits::Bitstream;
use crate::crc::crc8;
use crate::error::StegoError;
use crate::image::ImageBuffer;

pub const MAGIC: u8 = 0xA7;
pub const VERSION: u8 = 0x01;
pub const HEADER_BITS: usize = 64;
const INNER_HEADER_BITS: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum PayloadType {
    Raw = 0x01,
    GrayImage = 0x02,
    RgbImage = 0x03,
}

impl PayloadType {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0x01 => Some(Self::Raw),
            0x02 => Some(Self::GrayImage),
            0x03 => Some(Self::RgbImage),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PayloadHeader {
    pub payload_type: PayloadType,
    pub payload_len_bits: u32,
}

impl PayloadHeader {
    pub fn to_bytes(&self) -> [u8; 8] {
        let len = self.payload_len_bits.to_be_bytes();
        let mut out = [
            MAGIC,
            VERSION,
            self.payload_type.code(),
            len[0],
            len[1],
            len[2],
            len[3],
            0,
        ];
        out[7] = crc8(&out[..7]);
        out
    }

    pub fn from_bytes(bytes: &[u8; 8]) -> Result<Self, StegoError> {
        if bytes[0] != MAGIC {
            return Err(StegoError::InvalidHeader("bad magic"));
        }
        if bytes[1] != VERSION {
            return Err(StegoError::InvalidHeader("unsupported version"));
        }
        if crc8(&bytes[..7]) != bytes[7] {
            return Err(StegoError::InvalidHeader("checksum mismatch"));
        }
        let payload_type = PayloadType::from_code(bytes[2])
            .ok_or(StegoError::InvalidHeader("unknown payload type"))?;
        Ok(Self {
            payload_type,
            payload_len_bits: u32::from_be_bytes([bytes[3], bytes[4], bytes[5], bytes[6]]),
        })
    }

    /// Header plus payload, in bits.
    pub fn total_bits(&self) -> u64 {
        HEADER_BITS as u64 + self.payload_len_bits as u64
    }
}

/// A secret as the user sees it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Bytes(Vec<u8>),
    Image(ImageBuffer),
}

pub fn encode_header(
    payload_type: PayloadType,
    payload_len_bits: u64,
) -> Result<Bitstream, StegoError> {
    let payload_len_bits = u32::try_from(payload_len_bits)
        .map_err(|_| StegoError::PayloadTooLong(payload_len_bits))?;
    let header = PayloadHeader {
        payload_type,
        payload_len_bits,
    };
    Ok(Bitstream::from_bytes(&header.to_bytes()))
}

pub fn decode_header(stream: &Bitstream) -> Result<PayloadHeader, StegoError> {
    if stream.len() < HEADER_BITS {
        return Err(StegoError::Truncated {
            needed: HEADER_BITS as u64,
            available: stream.len() as u64,
        });
    }
    let mut bytes = [0u8; 8];
    for (i, b) in bytes.iter_mut().enumerate() {
        *b = stream.read_bits(i * 8, 8)? as u8;
    }
    PayloadHeader::from_bytes(&bytes)
}

/// Frames an arbitrary bit string under the given type code.
pub fn frame_bits(payload_type: PayloadType, body: &Bitstream) -> Result<Bitstream, StegoError> {
    let mut out = encode_header(payload_type, body.len() as u64)?;
    out.extend_from(body);
    Ok(out)
}

pub fn frame_payload(secret: &Payload) -> Result<Bitstream, StegoError> {
    match secret {
        Payload::Bytes(bytes) => frame_bits(PayloadType::Raw, &Bitstream::from_bytes(bytes)),
        Payload::Image(img) => {
            let (w, h, ch) = img.dims();
            if w > u16::MAX as usize || h > u16::MAX as usize {
                return Err(StegoError::DimensionsTooLarge {
                    width: w,
                    height: h,
                });
            }
            let ty = if ch == 1 {
                PayloadType::GrayImage
            } else {
                PayloadType::RgbImage
            };
            let mut body = Vec::with_capacity(4 + img.samples().len());
            body.extend_from_slice(&(w as u16).to_be_bytes());
            body.extend_from_slice(&(h as u16).to_be_bytes());
            body.extend_from_slice(&img.to_interleaved());
            frame_bits(ty, &Bitstream::from_bytes(&body))
        }
    }
}

pub fn parse_payload(bits: &Bitstream) -> Result<Payload, StegoError> {
    let header = decode_header(bits)?;
    let total = header.total_bits();
    if (bits.len() as u64) < total {
        return Err(StegoError::Truncated {
            needed: total,
            available: bits.len() as u64,
        });
    }
    let body = bits.slice(HEADER_BITS, header.payload_len_bits as usize)?;
    let len = header.payload_len_bits as u64;
    match header.payload_type {
        PayloadType::Raw => {
            if !len.is_multiple_of(8) {
                return Err(StegoError::MalformedPayload(format!(
                    "raw payload of {len} bits is not byte aligned"
                )));
            }
            Ok(Payload::Bytes(body.as_bytes().to_vec()))
        }
        PayloadType::GrayImage | PayloadType::RgbImage => {
            let channels = if header.payload_type == PayloadType::GrayImage {
                1
            } else {
                3
            };
            if len < INNER_HEADER_BITS {
                return Err(StegoError::MalformedPayload(format!(
                    "image payload of {len} bits is shorter than its inner header"
                )));
            }
            let width = body.read_bits(0, 16)? as usize;
            let height = body.read_bits(16, 16)? as usize;
            let expected = INNER_HEADER_BITS + (width * height * channels) as u64 * 8;
            if expected != len {
                return Err(StegoError::MalformedPayload(format!(
                    "{width}x{height}x{channels} image needs {expected} bits, header declares {len}"
                )));
            }
            let samples = &body.as_bytes()[4..];
            Ok(Payload::Image(ImageBuffer::from_interleaved(
                width, height, channels, samples,
            )?))
        }
    }
}
