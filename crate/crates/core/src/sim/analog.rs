use rayon::prelude::*;

use super::TrialOutcome;
use crate::channel::{awgn_stream, calibrate_n0_totals, cqam_pack, demodulate, ChannelConfig, EpMode, ModulatedFrame};
use crate::codec::{encode, CodeParams, MlDecoder, SourceBlock};
use crate::imaging::{mse, partition_blocks, psnr, reassemble, GrayImage};
use crate::Result;

/// The analog system for one image: encoded and modulated once, then
/// transmitted as many times as needed.
#[derive(Debug)]
pub struct AnalogLink {
    image: GrayImage,
    params: CodeParams,
    delta: f64,
    decoder: MlDecoder,
    pad_count: usize,
    frames: Vec<ModulatedFrame>,
    energy: f64,
}

impl AnalogLink {
    pub fn new(image: &GrayImage, params: CodeParams, delta: f64) -> Result<Self> {
        let stream = partition_blocks(image, params.k())?;
        let frames = stream
            .blocks
            .par_iter()
            .map(|b| encode(b, &params).map(|cw| cqam_pack(&cw, delta)))
            .collect::<Result<Vec<_>>>()?;
        let energy = frames.iter().map(ModulatedFrame::energy).sum();
        Ok(AnalogLink {
            image: image.clone(),
            params,
            delta,
            decoder: MlDecoder::new(params)?,
            pad_count: stream.pad_count,
            frames,
            energy,
        })
    }

    /// Real channel symbols per transmission (`2n` per padded pixel).
    pub fn symbol_count(&self) -> usize {
        self.frames.iter().map(ModulatedFrame::symbol_count).sum()
    }

    /// Total transmitted energy of one transmission.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn transmit(&self, snr_db: f64, ep_mode: EpMode, seed: u64) -> Result<TrialOutcome> {
        let spp = self.params.symbols_per_source() as f64;
        let cfg = ChannelConfig::new(self.delta, snr_db, ep_mode, seed, spp)?;
        let noise = calibrate_n0_totals(&cfg, self.energy, self.symbol_count())?;
        let blocks = self
            .frames
            .par_iter()
            .enumerate()
            .map(|(i, frame)| {
                let rx = awgn_stream(frame, &noise, seed, i as u64);
                let r = demodulate(&rx, self.delta, &self.params)?;
                Ok(SourceBlock::new(self.decoder.decode(&r)?.estimates))
            })
            .collect::<Result<Vec<_>>>()?;
        let stream = crate::imaging::BlockStream {
            blocks,
            pad_count: self.pad_count,
        };
        let recon = reassemble(&stream, self.image.width(), self.image.height())?;
        Ok(TrialOutcome {
            mse: mse(&self.image, &recon)?,
            psnr_db: psnr(&self.image, &recon)?,
            recon,
            transmitted_symbols: self.symbol_count(),
        })
    }
}
