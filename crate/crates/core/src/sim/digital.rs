//! Uncoded digital reference: each pixel's two 4-bit nibbles are sent as
//! 16-ary ASK amplitudes (high nibble on I, low nibble on Q) and hard-decided
//! at the receiver. Natural binary labelling, no channel code, 2 real symbols
//! per pixel.

use super::TrialOutcome;
use crate::channel::{awgn_stream, calibrate_n0_totals, ChannelConfig, EpMode, ModulatedFrame};
use crate::imaging::{mse, psnr, GrayImage};
use crate::Result;

const LEVELS: f64 = 16.0;

/// Amplitude of nibble `m` in `0..16`: `delta * (2m - 15) / 15`.
pub fn nibble_amplitude(m: u8, delta: f64) -> f64 {
    delta * (2.0 * m as f64 - (LEVELS - 1.0)) / (LEVELS - 1.0)
}

/// Nearest 16-ASK level to a received amplitude.
pub fn nibble_decision(a: f64, delta: f64) -> u8 {
    let m = ((a / delta) * (LEVELS - 1.0) + (LEVELS - 1.0)) / 2.0;
    m.round().clamp(0.0, LEVELS - 1.0) as u8
}

#[derive(Debug)]
pub struct DigitalLink {
    image: GrayImage,
    delta: f64,
    frame: ModulatedFrame,
}

impl DigitalLink {
    pub fn new(image: &GrayImage, delta: f64) -> Result<Self> {
        let (hi, lo): (Vec<f64>, Vec<f64>) = image
            .pixels()
            .iter()
            .map(|&p| (nibble_amplitude(p >> 4, delta), nibble_amplitude(p & 0x0f, delta)))
            .unzip();
        Ok(DigitalLink {
            image: image.clone(),
            delta,
            frame: ModulatedFrame::new(hi, lo)?,
        })
    }

    pub fn transmit(&self, snr_db: f64, ep_mode: EpMode, seed: u64) -> Result<TrialOutcome> {
        let cfg = ChannelConfig::new(self.delta, snr_db, ep_mode, seed, 2.0)?;
        let noise = calibrate_n0_totals(&cfg, self.frame.energy(), self.frame.symbol_count())?;
        let rx = awgn_stream(&self.frame, &noise, seed, 0);
        let pixels = rx
            .i_stream
            .iter()
            .zip(&rx.q_stream)
            .map(|(&hi, &lo)| (nibble_decision(hi, self.delta) << 4) | nibble_decision(lo, self.delta))
            .collect();
        let recon = GrayImage::new(self.image.width(), self.image.height(), pixels)?;
        Ok(TrialOutcome {
            mse: mse(&self.image, &recon)?,
            psnr_db: psnr(&self.image, &recon)?,
            recon,
            transmitted_symbols: self.frame.symbol_count(),
        })
    }
}
