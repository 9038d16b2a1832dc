//! Image fidelity measured on 0-255 pixel values.

use super::GrayImage;
use crate::{Error, Result};

/// Peak pixel value of 8-bit images.
pub const PEAK: f64 = 255.0;

fn same_shape(a: &GrayImage, b: &GrayImage) -> Result<()> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::argument(format!(
            "image sizes differ: {}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    Ok(())
}

pub fn mse(reference: &GrayImage, other: &GrayImage) -> Result<f64> {
    same_shape(reference, other)?;
    let sum: u64 = reference
        .pixels()
        .iter()
        .zip(other.pixels())
        .map(|(&a, &b)| {
            let d = a.abs_diff(b) as u64;
            d * d
        })
        .sum();
    Ok(sum as f64 / reference.pixel_count() as f64)
}

/// `20 log10(255 / sqrt(MSE))`; identical images give `+inf`.
pub fn psnr(reference: &GrayImage, other: &GrayImage) -> Result<f64> {
    Ok(psnr_from_mse(mse(reference, other)?))
}

pub(crate) fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        20.0 * (PEAK / mse.sqrt()).log10()
    }
}
