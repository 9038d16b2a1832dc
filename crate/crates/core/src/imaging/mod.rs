//! Grayscale images as streams of analog source symbols.
//!
//! Pixels map to `[-1, 1)` by `(p - 128) / 128` and are grouped row-major into
//! blocks of `k` symbols. The last block is padded with `0.0` (mid-gray); the
//! pad count travels with the stream so reassembly drops it exactly.

mod metrics;
mod pgm;

pub use metrics::{mse, psnr, PEAK};
pub use pgm::{decode_pgm, encode_pgm, load_pgm, save_pgm};

use crate::chaos::AnalogValue;
use crate::codec::SourceBlock;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::argument(format!("image dimensions must be positive, got {width}x{height}")));
        }
        if pixels.len() != width * height {
            return Err(Error::argument(format!(
                "{} pixels supplied for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(GrayImage { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Row-major pixel data.
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixel_count(&self) -> usize {
        self.pixels.len()
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }
}

/// A deterministic synthetic test picture: smooth shading, a bright disc, a
/// few hard edges and mild texture, roughly the statistics of a portrait.
pub fn test_pattern(width: usize, height: usize) -> Result<GrayImage> {
    let mut pixels = Vec::with_capacity(width * height);
    let (w, h) = (width as f64, height as f64);
    for y in 0..height {
        for x in 0..width {
            let (fx, fy) = (x as f64 / w, y as f64 / h);
            let mut v = 110.0 + 50.0 * (std::f64::consts::PI * 1.5 * fx).sin() * (std::f64::consts::PI * fy).cos();
            let (dx, dy) = (fx - 0.62, fy - 0.4);
            if dx * dx + dy * dy < 0.05 {
                v += 70.0;
            }
            if fx < 0.2 && fy > 0.55 {
                v -= 60.0;
            }
            // Cheap integer hash for texture.
            let mut t = (x as u32).wrapping_mul(0x9e37_79b1) ^ (y as u32).wrapping_mul(0x85eb_ca77);
            t ^= t >> 15;
            t = t.wrapping_mul(0x2c1b_3c6d);
            t ^= t >> 12;
            v += (t % 17) as f64 - 8.0;
            pixels.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    GrayImage::new(width, height, pixels)
}

/// `(pixel - 128) / 128`; integers outside `0..=255` are rejected.
pub fn scale_to_analog(pixel: i32) -> Result<AnalogValue> {
    if !(0..=255).contains(&pixel) {
        return Err(Error::Domain {
            what: "pixel",
            value: pixel as f64,
            lo: 0.0,
            hi: 255.0,
        });
    }
    AnalogValue::new((pixel - 128) as f64 / 128.0)
}

#[inline]
fn scale_u8(pixel: u8) -> AnalogValue {
    // Always in [-1, 0.9921875].
    AnalogValue::new((pixel as f64 - 128.0) / 128.0).expect("u8 pixels scale into [-1, 1]")
}

/// `clamp(round(v * 128 + 128), 0, 255)`, rounding half away from zero.
pub fn unscale(v: f64) -> u8 {
    (v * 128.0 + 128.0).round().clamp(0.0, 255.0) as u8
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockStream {
    pub blocks: Vec<SourceBlock>,
    pub pad_count: usize,
}

impl BlockStream {
    pub fn block_size(&self) -> usize {
        self.blocks.first().map_or(0, SourceBlock::len)
    }

    /// Source symbols including padding.
    pub fn symbol_count(&self) -> usize {
        self.blocks.iter().map(SourceBlock::len).sum()
    }
}

pub fn partition_blocks(img: &GrayImage, k: usize) -> Result<BlockStream> {
    if k < 2 {
        return Err(Error::argument(format!("block size must be at least 2, got {k}")));
    }
    let pad_count = (k - img.pixel_count() % k) % k;
    let zero = AnalogValue::new(0.0)?;
    let symbols: Vec<AnalogValue> = img
        .pixels
        .iter()
        .map(|&p| scale_u8(p))
        .chain(std::iter::repeat_n(zero, pad_count))
        .collect();
    let blocks = symbols.chunks_exact(k).map(|c| SourceBlock::new(c.to_vec())).collect();
    Ok(BlockStream { blocks, pad_count })
}

pub fn reassemble(stream: &BlockStream, width: usize, height: usize) -> Result<GrayImage> {
    let total = stream.symbol_count();
    if total < stream.pad_count || total - stream.pad_count != width * height {
        return Err(Error::argument(format!(
            "stream carries {} pixels ({} symbols, {} padding), image is {width}x{height}",
            total.saturating_sub(stream.pad_count),
            total,
            stream.pad_count
        )));
    }
    let pixels = stream
        .blocks
        .iter()
        .flat_map(|b| b.values().iter().map(|v| unscale(v.get())))
        .take(width * height)
        .collect();
    GrayImage::new(width, height, pixels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_examples() {
        assert_eq!(scale_to_analog(128).unwrap().get(), 0.0);
        assert_eq!(scale_to_analog(0).unwrap().get(), -1.0);
        assert_eq!(scale_to_analog(255).unwrap().get(), 0.9921875);
        assert!(matches!(scale_to_analog(256), Err(Error::Domain { .. })));
        assert!(scale_to_analog(-1).is_err());
    }

    #[test]
    fn unscale_examples() {
        assert_eq!(unscale(0.0), 128);
        assert_eq!(unscale(-1.0), 0);
        assert_eq!(unscale(1.0), 255);
        assert_eq!(unscale(-7.0), 0);
        assert_eq!(unscale(0.5 / 128.0), 129);
        assert_eq!(unscale(-0.5 / 128.0), 128);
    }

    #[test]
    fn scale_unscale_identity() {
        for p in 0..=255 {
            assert_eq!(unscale(scale_to_analog(p).unwrap().get()) as i32, p);
        }
    }

    #[test]
    fn partition_sizes() {
        let img = GrayImage::new(256, 256, vec![7; 65536]).unwrap();
        let s = partition_blocks(&img, 3).unwrap();
        assert_eq!(s.blocks.len(), 21846);
        assert_eq!(s.pad_count, 2);
        assert_eq!(s.blocks.last().unwrap().to_f64()[1..], [0.0, 0.0]);
        let img = GrayImage::new(3, 1, vec![0, 128, 255]).unwrap();
        let s = partition_blocks(&img, 3).unwrap();
        assert_eq!(s.blocks.len(), 1);
        assert_eq!(s.pad_count, 0);
        assert_eq!(s.blocks[0].to_f64(), vec![-1.0, 0.0, 0.9921875]);
        assert!(partition_blocks(&img, 1).is_err());
    }

    #[test]
    fn partition_round_trip() {
        let img = test_pattern(37, 11).unwrap();
        for k in [2, 3, 4, 5] {
            let s = partition_blocks(&img, k).unwrap();
            assert_eq!(s.symbol_count() - s.pad_count, img.pixel_count());
            assert_eq!(reassemble(&s, 37, 11).unwrap(), img);
        }
        let s = partition_blocks(&img, 3).unwrap();
        assert!(reassemble(&s, 36, 11).is_err());
    }

    #[test]
    fn image_validation() {
        assert!(GrayImage::new(0, 3, vec![]).is_err());
        assert!(GrayImage::new(2, 2, vec![0; 3]).is_err());
    }

    #[test]
    fn test_pattern_is_deterministic_and_varied() {
        let a = test_pattern(64, 64).unwrap();
        assert_eq!(a, test_pattern(64, 64).unwrap());
        let min = *a.pixels().iter().min().unwrap();
        let max = *a.pixels().iter().max().unwrap();
        assert!(max - min > 150);
    }
}
