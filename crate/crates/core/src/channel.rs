//! Continuous-amplitude QAM over an AWGN channel.
//!
//! x-states ride the I carrier and y-states the Q carrier, scaled by the peak
//! amplitude `delta`. Each real dimension receives independent `N(0, N0/2)`
//! noise, with `N0` set from the requested `Ep/N0`.
//!
//! Noise comes from ChaCha20 seeded with a 64-bit seed; independent substreams
//! (one per code block) are selected with the ChaCha stream id, so blocks can
//! be corrupted in any order or in parallel with identical results.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::codec::{CodeParams, Codeword, ReceivedCodeword};
use crate::{Error, Result};

/// How the per-pixel energy `Ep` is obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpMode {
    /// Transmitted energy of the frame divided by the source pixels it carries.
    #[default]
    Measured,
    /// `symbols_per_pixel * delta^2 / 3`, the mean-square of a uniform source.
    Nominal,
}

impl FromStr for EpMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "measured" => Ok(EpMode::Measured),
            "nominal" => Ok(EpMode::Nominal),
            other => Err(Error::argument(format!(
                "unknown ep mode {other:?} (expected measured or nominal)"
            ))),
        }
    }
}

impl fmt::Display for EpMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EpMode::Measured => "measured",
            EpMode::Nominal => "nominal",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub delta: f64,
    /// `Ep/N0` in dB; `+inf` means a noiseless channel.
    pub snr_db: f64,
    pub ep_mode: EpMode,
    pub seed: u64,
    pub symbols_per_pixel: f64,
}

impl ChannelConfig {
    pub fn new(delta: f64, snr_db: f64, ep_mode: EpMode, seed: u64, symbols_per_pixel: f64) -> Result<Self> {
        let cfg = ChannelConfig {
            delta,
            snr_db,
            ep_mode,
            seed,
            symbols_per_pixel,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::argument(format!("delta must be positive, got {}", self.delta)));
        }
        if !(self.symbols_per_pixel > 0.0 && self.symbols_per_pixel.is_finite()) {
            return Err(Error::argument(format!(
                "symbols per pixel must be positive, got {}",
                self.symbols_per_pixel
            )));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(Error::argument(format!("invalid SNR {} dB", self.snr_db)));
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.snr_db == f64::INFINITY
    }
}

/// I and Q amplitude streams, branch-major then time-major.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModulatedFrame {
    pub i_stream: Vec<f64>,
    pub q_stream: Vec<f64>,
}

impl ModulatedFrame {
    pub fn new(i_stream: Vec<f64>, q_stream: Vec<f64>) -> Result<Self> {
        if i_stream.len() != q_stream.len() {
            return Err(Error::argument(format!(
                "I and Q streams differ in length ({} vs {})",
                i_stream.len(),
                q_stream.len()
            )));
        }
        Ok(ModulatedFrame { i_stream, q_stream })
    }

    /// Number of real dimensions (I plus Q).
    pub fn symbol_count(&self) -> usize {
        self.i_stream.len() + self.q_stream.len()
    }

    pub fn is_empty(&self) -> bool {
        self.i_stream.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.i_stream.iter().chain(&self.q_stream).map(|a| a * a).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    n0: f64,
}

impl NoiseModel {
    /// `n0 = 0` is accepted and produces a noiseless channel.
    pub fn new(n0: f64) -> Result<Self> {
        if !(n0 >= 0.0 && n0.is_finite()) {
            return Err(Error::argument(format!("N0 must be finite and non-negative, got {n0}")));
        }
        Ok(NoiseModel { n0 })
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    /// Per-dimension noise variance, `N0 / 2`.
    pub fn variance(&self) -> f64 {
        self.n0 / 2.0
    }

    pub fn sigma(&self) -> f64 {
        self.variance().sqrt()
    }
}

pub fn cqam_pack(codeword: &Codeword, delta: f64) -> ModulatedFrame {
    let len = codeword.k() * codeword.n();
    let mut frame = ModulatedFrame {
        i_stream: Vec::with_capacity(len),
        q_stream: Vec::with_capacity(len),
    };
    for b in codeword.branches() {
        frame.i_stream.extend(b.xs().map(|x| x * delta));
        frame.q_stream.extend(b.ys().map(|y| y * delta));
    }
    frame
}

/// `N0` for a known total energy spread over `symbols` real dimensions.
pub fn calibrate_n0_totals(cfg: &ChannelConfig, energy: f64, symbols: usize) -> Result<NoiseModel> {
    cfg.validate()?;
    let ep = match cfg.ep_mode {
        EpMode::Measured => {
            if symbols == 0 {
                return Err(Error::argument("cannot measure energy of an empty frame"));
            }
            let pixels = symbols as f64 / cfg.symbols_per_pixel;
            energy / pixels
        }
        EpMode::Nominal => cfg.symbols_per_pixel * cfg.delta * cfg.delta / 3.0,
    };
    NoiseModel::new(ep / 10f64.powf(cfg.snr_db / 10.0))
}

pub fn calibrate_n0(cfg: &ChannelConfig, frame: &ModulatedFrame) -> Result<NoiseModel> {
    calibrate_n0_totals(cfg, frame.energy(), frame.symbol_count())
}

/// Adds white Gaussian noise using substream `stream` of `seed`.
///
/// Samples are drawn I then Q for each time slot.
pub fn awgn_stream(frame: &ModulatedFrame, noise: &NoiseModel, seed: u64, stream: u64) -> ModulatedFrame {
    let sigma = noise.sigma();
    if sigma == 0.0 {
        return frame.clone();
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut out = frame.clone();
    for (i, q) in out.i_stream.iter_mut().zip(out.q_stream.iter_mut()) {
        let ni: f64 = StandardNormal.sample(&mut rng);
        let nq: f64 = StandardNormal.sample(&mut rng);
        *i += sigma * ni;
        *q += sigma * nq;
    }
    out
}

pub fn awgn(frame: &ModulatedFrame, noise: &NoiseModel, seed: u64) -> ModulatedFrame {
    awgn_stream(frame, noise, seed, 0)
}

/// Inverse of [`cqam_pack`]. Noisy values are passed through unclipped.
pub fn demodulate(frame: &ModulatedFrame, delta: f64, params: &CodeParams) -> Result<ReceivedCodeword> {
    let (k, n) = (params.k(), params.n());
    if frame.i_stream.len() != k * n || frame.q_stream.len() != k * n {
        return Err(Error::argument(format!(
            "frame streams have {} / {} amplitudes, code expects {}",
            frame.i_stream.len(),
            frame.q_stream.len(),
            k * n
        )));
    }
    if !(delta > 0.0) {
        return Err(Error::argument(format!("delta must be positive, got {delta}")));
    }
    let split = |s: &[f64]| -> Vec<Vec<f64>> {
        s.chunks_exact(n)
            .map(|c| c.iter().map(|a| a / delta).collect())
            .collect()
    };
    ReceivedCodeword::new(split(&frame.i_stream), split(&frame.q_stream))
}

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a sub-seed from a master seed and a path of indices by folding
/// each index through SplitMix64: `h = mix(h ^ mix(index))`.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(master), |h, &i| mix64(h ^ mix64(i)))
}
