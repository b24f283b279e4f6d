//! Lossless image I/O: binary PGM (P5), binary PPM (P6) and 8-bit PNG.
//!
//! Anything lossy is refused; re-encoding a stego image lossily would wipe
//! out the payload.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use thiserror::Error;

use crate::image::ImageBuffer;

#[derive(Debug, Error)]
pub enum ImageIoError {
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("malformed image file: {0}")]
    MalformedFile(String),

    #[error("unsupported sample layout: {0}")]
    UnsupportedDepth(String),

    #[error("{format:?} cannot hold a {channels}-channel image")]
    ChannelMismatch {
        format: ImageFormat,
        channels: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImageFormat {
    Pgm,
    Ppm,
    Png,
}

impl ImageFormat {
    /// Picks a format from a file extension (`pgm`, `ppm`, `pnm`, `png`).
    /// `pnm` resolves to PGM or PPM from the channel count.
    pub fn from_path(path: &Path, channels: usize) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "pgm" => Some(Self::Pgm),
            "ppm" => Some(Self::Ppm),
            "pnm" => Some(Self::pnm_for(channels)),
            "png" => Some(Self::Png),
            _ => None,
        }
    }

    pub fn pnm_for(channels: usize) -> Self {
        if channels == 1 {
            Self::Pgm
        } else {
            Self::Ppm
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Self::Pgm => "pgm",
            Self::Ppm => "ppm",
            Self::Png => "png",
        }
    }
}

const PNG_SIGNATURE: &[u8] = b"\x89PNG\r\n\x1a\n";

pub fn read_image(path: impl AsRef<Path>) -> Result<ImageBuffer, ImageIoError> {
    decode_image(&fs::read(path)?)
}

/// Decodes from memory; the format is sniffed from the leading bytes.
pub fn decode_image(data: &[u8]) -> Result<ImageBuffer, ImageIoError> {
    match data {
        [b'P', b'5', ..] => decode_pnm(data, 1),
        [b'P', b'6', ..] => decode_pnm(data, 3),
        [b'P', b'1'..=b'4' | b'7', ..] => Err(ImageIoError::UnsupportedFormat(format!(
            "PNM variant P{} (only binary P5/P6 are supported)",
            data[1] as char
        ))),
        d if d.starts_with(PNG_SIGNATURE) => decode_png(data),
        [0xFF, 0xD8, 0xFF, ..] => Err(ImageIoError::UnsupportedFormat("JPEG is lossy".into())),
        _ => Err(ImageIoError::UnsupportedFormat(
            "unrecognized magic bytes".into(),
        )),
    }
}

pub fn write_image(
    image: &ImageBuffer,
    path: impl AsRef<Path>,
    format: ImageFormat,
) -> Result<(), ImageIoError> {
    let bytes = encode_image(image, format)?;
    fs::write(path, bytes)?;
    Ok(())
}

pub fn encode_image(image: &ImageBuffer, format: ImageFormat) -> Result<Vec<u8>, ImageIoError> {
    let channels = image.channels();
    match format {
        ImageFormat::Pgm | ImageFormat::Ppm => {
            let (magic, want) = if format == ImageFormat::Pgm {
                ("P5", 1)
            } else {
                ("P6", 3)
            };
            if channels != want {
                return Err(ImageIoError::ChannelMismatch { format, channels });
            }
            let mut out =
                format!("{magic}\n{} {}\n255\n", image.width(), image.height()).into_bytes();
            out.extend_from_slice(&image.to_interleaved());
            Ok(out)
        }
        ImageFormat::Png => encode_png(image),
    }
}

/// Splits a PNM header into tokens, skipping whitespace and `#` comments.
struct PnmHeader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl PnmHeader<'_> {
    fn skip_space(&mut self) {
        while self.pos < self.data.len() {
            match self.data[self.pos] {
                b'#' => {
                    while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, ImageIoError> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.data.len() && self.data[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImageIoError::MalformedFile(format!("missing or invalid {what}")))
    }
}

fn decode_pnm(data: &[u8], channels: usize) -> Result<ImageBuffer, ImageIoError> {
    let mut h = PnmHeader { data, pos: 2 };
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maxval")?;
    if maxval != 255 {
        return Err(ImageIoError::UnsupportedDepth(format!(
            "maxval {maxval} (only 255 is supported)"
        )));
    }
    match data.get(h.pos) {
        Some(b) if b.is_ascii_whitespace() => h.pos += 1,
        _ => {
            return Err(ImageIoError::MalformedFile(
                "no whitespace after maxval".into(),
            ))
        }
    }
    let len = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| ImageIoError::MalformedFile("dimensions overflow".into()))?;
    let raster = data.get(h.pos..h.pos + len).ok_or_else(|| {
        ImageIoError::MalformedFile(format!(
            "expected {len} sample bytes, found {}",
            data.len() - h.pos
        ))
    })?;
    ImageBuffer::from_interleaved(width, height, channels, raster)
        .map_err(|e| ImageIoError::MalformedFile(e.to_string()))
}

fn decode_png(data: &[u8]) -> Result<ImageBuffer, ImageIoError> {
    let malformed = |e: png::DecodingError| ImageIoError::MalformedFile(e.to_string());
    let mut reader = png::Decoder::new(Cursor::new(data))
        .read_info()
        .map_err(malformed)?;
    let mut buf = vec![0; reader.output_buffer_size()];
    let info = reader.next_frame(&mut buf).map_err(malformed)?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(ImageIoError::UnsupportedDepth(format!(
            "{:?}-bit PNG",
            info.bit_depth
        )));
    }
    let channels = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::Rgb => 3,
        other => {
            return Err(ImageIoError::UnsupportedDepth(format!(
                "PNG color type {other:?}"
            )))
        }
    };
    let (w, h) = (info.width as usize, info.height as usize);
    let mut packed = Vec::with_capacity(w * h * channels);
    for row in buf.chunks(info.line_size).take(h) {
        packed.extend_from_slice(&row[..w * channels]);
    }
    ImageBuffer::from_interleaved(w, h, channels, &packed)
        .map_err(|e| ImageIoError::MalformedFile(e.to_string()))
}

fn encode_png(image: &ImageBuffer) -> Result<Vec<u8>, ImageIoError> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, image.width() as u32, image.height() as u32);
        enc.set_color(if image.channels() == 1 {
            png::ColorType::Grayscale
        } else {
            png::ColorType::Rgb
        });
        enc.set_depth(png::BitDepth::Eight);
        let to_io = |e: png::EncodingError| ImageIoError::Io(std::io::Error::other(e));
        let mut writer = enc.write_header().map_err(to_io)?;
        writer
            .write_image_data(&image.to_interleaved())
            .map_err(to_io)?;
    }
    Ok(out)
}

/// Nearest-neighbor resampling: output `(r, c)` takes source
/// `(r * H / new_h, c * W / new_w)`.
///
/// # Panics
/// If either target dimension is zero.
pub fn resize_nearest(image: &ImageBuffer, new_width: usize, new_height: usize) -> ImageBuffer {
    assert!(
        new_width >= 1 && new_height >= 1,
        "target dimensions must be positive"
    );
    let (w, h, ch) = image.dims();
    if (w, h) == (new_width, new_height) {
        return image.clone();
    }
    ImageBuffer::from_fn(new_width, new_height, ch, |c, r, col| {
        image.get(c, r * h / new_height, col * w / new_width)
    })
}
