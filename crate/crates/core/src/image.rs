use crate::error::StegoError;

/// An 8-bit raster with one (gray) or three (RGB) channels.
///
/// Samples are stored channel-planar: every sample of channel 0 in
/// row-major order, then channel 1, then channel 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: usize,
    samples: Vec<u8>,
}

impl ImageBuffer {
    /// Wraps channel-planar samples. Fails if the sample count does not
    /// match the dimensions or `channels` is not 1 or 3.
    pub fn new(
        width: usize,
        height: usize,
        channels: usize,
        samples: Vec<u8>,
    ) -> Result<Self, StegoError> {
        if channels != 1 && channels != 3 {
            return Err(StegoError::MalformedPayload(format!(
                "unsupported channel count {channels}"
            )));
        }
        if samples.len() != width * height * channels {
            return Err(StegoError::MalformedPayload(format!(
                "{} samples for a {width}x{height}x{channels} image",
                samples.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            samples,
        })
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: u8) -> Self {
        assert!(channels == 1 || channels == 3, "channels must be 1 or 3");
        Self {
            width,
            height,
            channels,
            samples: vec![value; width * height * channels],
        }
    }

    /// Builds an image from `f(channel, row, col)`.
    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> u8,
    ) -> Self {
        assert!(channels == 1 || channels == 3, "channels must be 1 or 3");
        let mut samples = Vec::with_capacity(width * height * channels);
        for ch in 0..channels {
            for r in 0..height {
                for c in 0..width {
                    samples.push(f(ch, r, c));
                }
            }
        }
        Self {
            width,
            height,
            channels,
            samples,
        }
    }

    /// Converts from row-major interleaved samples (R,G,B per pixel for
    /// color), the layout used by raster file formats.
    pub fn from_interleaved(
        width: usize,
        height: usize,
        channels: usize,
        data: &[u8],
    ) -> Result<Self, StegoError> {
        if data.len() != width * height * channels {
            return Err(StegoError::MalformedPayload(format!(
                "{} interleaved samples for a {width}x{height}x{channels} image",
                data.len()
            )));
        }
        if channels == 1 {
            return Self::new(width, height, 1, data.to_vec());
        }
        let plane = width * height;
        let mut samples = vec![0u8; data.len()];
        for (i, px) in data.chunks_exact(channels).enumerate() {
            for (ch, &v) in px.iter().enumerate() {
                samples[ch * plane + i] = v;
            }
        }
        Self::new(width, height, channels, samples)
    }

    /// Row-major interleaved copy of the samples.
    pub fn to_interleaved(&self) -> Vec<u8> {
        if self.channels == 1 {
            return self.samples.clone();
        }
        let plane = self.width * self.height;
        let mut out = Vec::with_capacity(self.samples.len());
        for i in 0..plane {
            for ch in 0..self.channels {
                out.push(self.samples[ch * plane + i]);
            }
        }
        out
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// `(width, height, channels)`
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.channels)
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [u8] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    /// Samples of a single channel plane.
    pub fn plane(&self, channel: usize) -> &[u8] {
        let n = self.width * self.height;
        &self.samples[channel * n..(channel + 1) * n]
    }

    #[inline]
    pub fn index(&self, channel: usize, row: usize, col: usize) -> usize {
        (channel * self.height + row) * self.width + col
    }

    #[inline]
    pub fn get(&self, channel: usize, row: usize, col: usize) -> u8 {
        self.samples[self.index(channel, row, col)]
    }

    #[inline]
    pub fn set(&mut self, channel: usize, row: usize, col: usize, value: u8) {
        let i = self.index(channel, row, col);
        self.samples[i] = value;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_layout() {
        let img = ImageBuffer::from_fn(2, 2, 3, |ch, r, c| (ch * 100 + r * 10 + c) as u8);
        assert_eq!(img.samples().len(), 12);
        assert_eq!(img.plane(1), &[100, 101, 110, 111]);
        assert_eq!(img.get(2, 1, 0), 210);
    }

    #[test]
    fn interleave_round_trip() {
        let img = ImageBuffer::from_fn(3, 2, 3, |ch, r, c| (ch * 50 + r * 7 + c) as u8);
        let inter = img.to_interleaved();
        assert_eq!(&inter[..3], &[0, 50, 100]);
        assert_eq!(ImageBuffer::from_interleaved(3, 2, 3, &inter).unwrap(), img);
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(ImageBuffer::new(2, 2, 1, vec![0; 3]).is_err());
        assert!(ImageBuffer::new(2, 2, 2, vec![0; 8]).is_err());
        assert!(ImageBuffer::new(0, 0, 1, vec![]).is_ok());
    }
}
