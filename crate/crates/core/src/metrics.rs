//! Quality metrics between two equally sized images.
//!
//! SSIM and UIQ use one set of global statistics per channel (no sliding
//! window) with population (1/N) moments; color results are the plain mean
//! of the channel values. MSE and PSNR pool every sample. All moments are
//! accumulated as exact integer sums and divided once.

use serde::{Serialize, Serializer};

use crate::bits::Bitstream;
use crate::error::StegoError;
use crate::image::ImageBuffer;
use crate::par::{map_reduce_chunks, Exec};

pub const MAX_VALUE: f64 = 255.0;
/// `(0.01 * 255)^2`
pub const C1: f64 = 6.5025;
/// `(0.03 * 255)^2`
pub const C2: f64 = 58.5225;

const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QualityReport {
    pub mse: f64,
    #[serde(serialize_with = "serialize_db")]
    pub psnr: f64,
    pub ssim: f64,
    pub uiq: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ber: Option<f64>,
}

fn serialize_db<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

/// Formats a PSNR value, rendering the identical-image sentinel as `inf`.
pub fn format_db(v: f64, decimals: usize) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v:.decimals$}")
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    sx: u64,
    sy: u64,
    sxx: u64,
    syy: u64,
    sxy: u64,
    sdd: u64,
}

impl Moments {
    fn over(x: &[u8], y: &[u8]) -> Self {
        let mut m = Moments {
            n: x.len() as u64,
            ..Default::default()
        };
        for (&a, &b) in x.iter().zip(y) {
            let (a, b) = (a as u64, b as u64);
            m.sx += a;
            m.sy += b;
            m.sxx += a * a;
            m.syy += b * b;
            m.sxy += a * b;
            m.sdd += a.abs_diff(b).pow(2);
        }
        m
    }

    fn merge(self, o: Self) -> Self {
        Moments {
            n: self.n + o.n,
            sx: self.sx + o.sx,
            sy: self.sy + o.sy,
            sxx: self.sxx + o.sxx,
            syy: self.syy + o.syy,
            sxy: self.sxy + o.sxy,
            sdd: self.sdd + o.sdd,
        }
    }

    fn collect(x: &[u8], y: &[u8], exec: Exec) -> Self {
        map_reduce_chunks(
            exec,
            x.len(),
            CHUNK,
            Moments::default(),
            |r| Moments::over(&x[r.clone()], &y[r]),
            Moments::merge,
        )
    }

    /// `N^2` times the population (co)variance, exactly.
    fn scaled_cov(&self, sab: u64, sa: u64, sb: u64) -> i128 {
        self.n as i128 * sab as i128 - sa as i128 * sb as i128
    }

    fn stats(&self) -> Stats {
        let n = self.n as f64;
        let n2 = n * n;
        let vx = self.scaled_cov(self.sxx, self.sx, self.sx);
        let vy = self.scaled_cov(self.syy, self.sy, self.sy);
        Stats {
            mu_xy: (self.sx as u128 * self.sy as u128) as f64 / n2,
            mu_xx: (self.sx as u128 * self.sx as u128) as f64 / n2,
            mu_yy: (self.sy as u128 * self.sy as u128) as f64 / n2,
            var_x: vx as f64 / n2,
            var_y: vy as f64 / n2,
            cov: self.scaled_cov(self.sxy, self.sx, self.sy) as f64 / n2,
            flat: vx == 0 && vy == 0,
            zero_mean: self.sx == 0 && self.sy == 0,
            identical: self.sdd == 0,
        }
    }
}

struct Stats {
    mu_xy: f64,
    mu_xx: f64,
    mu_yy: f64,
    var_x: f64,
    var_y: f64,
    cov: f64,
    flat: bool,
    zero_mean: bool,
    identical: bool,
}

impl Stats {
    fn ssim(&self) -> f64 {
        (2.0 * self.mu_xy + C1) * (2.0 * self.cov + C2)
            / ((self.mu_xx + self.mu_yy + C1) * (self.var_x + self.var_y + C2))
    }

    fn uiq(&self) -> f64 {
        if self.flat || self.zero_mean {
            return if self.identical { 1.0 } else { 0.0 };
        }
        4.0 * self.cov * self.mu_xy / ((self.var_x + self.var_y) * (self.mu_xx + self.mu_yy))
    }
}

fn check_dims(x: &ImageBuffer, y: &ImageBuffer) -> Result<(), StegoError> {
    if x.dims() != y.dims() {
        return Err(StegoError::DimensionMismatch(x.dims(), y.dims()));
    }
    Ok(())
}

fn per_channel(x: &ImageBuffer, y: &ImageBuffer, exec: Exec) -> Result<Vec<Moments>, StegoError> {
    check_dims(x, y)?;
    Ok((0..x.channels())
        .map(|ch| Moments::collect(x.plane(ch), y.plane(ch), exec))
        .collect())
}

fn channel_mean(moments: &[Moments], f: impl Fn(&Stats) -> f64) -> f64 {
    moments.iter().map(|m| f(&m.stats())).sum::<f64>() / moments.len() as f64
}

fn mse_of(moments: &[Moments]) -> f64 {
    let total = moments
        .iter()
        .copied()
        .fold(Moments::default(), Moments::merge);
    if total.n == 0 {
        return 0.0;
    }
    total.sdd as f64 / total.n as f64
}

pub fn mse(x: &ImageBuffer, y: &ImageBuffer) -> Result<f64, StegoError> {
    check_dims(x, y)?;
    let sdd: u64 = x
        .samples()
        .iter()
        .zip(y.samples())
        .map(|(&a, &b)| a.abs_diff(b) as u64 * a.abs_diff(b) as u64)
        .sum();
    let n = x.samples().len();
    Ok(if n == 0 { 0.0 } else { sdd as f64 / n as f64 })
}

/// `10 log10(255^2 / mse)`, `+inf` for a zero error.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (MAX_VALUE * MAX_VALUE / mse).log10()
    }
}

pub fn psnr(x: &ImageBuffer, y: &ImageBuffer) -> Result<f64, StegoError> {
    mse(x, y).map(psnr_from_mse)
}

pub fn ssim_global(x: &ImageBuffer, y: &ImageBuffer) -> Result<f64, StegoError> {
    Ok(channel_mean(
        &per_channel(x, y, Exec::default())?,
        Stats::ssim,
    ))
}

/// Universal image quality index. Where the denominator vanishes
/// (constant channels, or both means zero) the channel scores 1 if the two
/// channels are identical and 0 otherwise.
pub fn uiq(x: &ImageBuffer, y: &ImageBuffer) -> Result<f64, StegoError> {
    Ok(channel_mean(
        &per_channel(x, y, Exec::default())?,
        Stats::uiq,
    ))
}

/// MSE, PSNR, SSIM and UIQ from a single pass over the samples.
pub fn quality_report(x: &ImageBuffer, y: &ImageBuffer) -> Result<QualityReport, StegoError> {
    quality_report_with(x, y, Exec::default())
}

pub fn quality_report_with(
    x: &ImageBuffer,
    y: &ImageBuffer,
    exec: Exec,
) -> Result<QualityReport, StegoError> {
    let moments = per_channel(x, y, exec)?;
    let mse = mse_of(&moments);
    Ok(QualityReport {
        mse,
        psnr: psnr_from_mse(mse),
        ssim: channel_mean(&moments, Stats::ssim),
        uiq: channel_mean(&moments, Stats::uiq),
        ber: None,
    })
}

/// Fraction of differing bits; 0 for two empty streams.
pub fn ber(a: &Bitstream, b: &Bitstream) -> Result<f64, StegoError> {
    if a.len() != b.len() {
        return Err(StegoError::DimensionMismatch(
            (a.len(), 1, 1),
            (b.len(), 1, 1),
        ));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let full = a.len() / 8;
    let mut diff: u64 = a.as_bytes()[..full]
        .iter()
        .zip(&b.as_bytes()[..full])
        .map(|(x, y)| (x ^ y).count_ones() as u64)
        .sum();
    diff += (full * 8..a.len())
        .filter(|&i| a.bit(i) != b.bit(i))
        .count() as u64;
    Ok(diff as f64 / a.len() as f64)
}
