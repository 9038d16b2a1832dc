//! End-to-end image transmission experiments.
//!
//! Every noise draw is keyed by `derive_seed(master, [snr_db bits, trial])`
//! and, within a trial, by the block index as ChaCha stream id. Blocks are
//! processed in parallel and collected in order, so a run is bit-identical to
//! a serial one and independent of the thread count.

mod analog;
mod digital;
mod report;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use analog::AnalogLink;
pub use digital::{nibble_amplitude, nibble_decision, DigitalLink};
pub use report::{csv_string, parse_snr_list, recon_file_name, write_outputs, CSV_HEADER};

use crate::channel::{derive_seed, EpMode};
use crate::codec::CodeParams;
use crate::imaging::{load_pgm, GrayImage};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum System {
    #[default]
    #[serde(rename = "analog")]
    Analog,
    #[serde(rename = "digital-uncoded")]
    DigitalUncoded,
}

impl FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analog" => Ok(System::Analog),
            "digital-uncoded" => Ok(System::DigitalUncoded),
            other => Err(Error::argument(format!(
                "unknown system {other:?} (expected analog or digital-uncoded)"
            ))),
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            System::Analog => "analog",
            System::DigitalUncoded => "digital-uncoded",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub input: PathBuf,
    pub k: usize,
    pub n: usize,
    pub delta: f64,
    /// `Ep/N0` points in dB; `f64::INFINITY` is the noiseless channel.
    pub snr_db: Vec<f64>,
    pub ep_mode: EpMode,
    pub seed: u64,
    pub trials: usize,
    pub out_dir: PathBuf,
    pub system: System,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            input: PathBuf::new(),
            k: 3,
            n: 2,
            delta: 1.0,
            snr_db: vec![10.0, 14.0, 18.0, 22.0, 24.0],
            ep_mode: EpMode::Measured,
            seed: 1,
            trials: 20,
            out_dir: PathBuf::from("out"),
            system: System::Analog,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            return Err(Error::argument("SNR list is empty"));
        }
        if let Some(s) = self.snr_db.iter().find(|s| s.is_nan() || **s == f64::NEG_INFINITY) {
            return Err(Error::argument(format!("invalid SNR point {s}")));
        }
        if self.trials == 0 {
            return Err(Error::argument("trials must be at least 1"));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::argument(format!("delta must be positive, got {}", self.delta)));
        }
        if self.system == System::Analog {
            CodeParams::new(self.k, self.n)?;
        }
        Ok(())
    }

    pub fn code_params(&self) -> Result<CodeParams> {
        CodeParams::new(self.k, self.n)
    }
}

/// Result of one transmission of the whole image.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub recon: GrayImage,
    pub mse: f64,
    pub psnr_db: f64,
    /// Real channel symbols sent, padding included.
    pub transmitted_symbols: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    #[serde(serialize_with = "report::ser_f64")]
    pub snr_db: f64,
    #[serde(serialize_with = "report::ser_f64")]
    pub mse_mean: f64,
    #[serde(serialize_with = "report::ser_f64")]
    pub psnr_mean_db: f64,
    #[serde(serialize_with = "report::ser_f64")]
    pub psnr_std_db: f64,
    pub trials: usize,
    pub transmitted_symbols: usize,
    /// Not serialised, so that output files depend only on the configuration.
    #[serde(skip)]
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub system: System,
    pub records: Vec<SweepRecord>,
    /// Trial-0 reconstruction for each SNR point, in record order.
    pub reconstructions: Vec<GrayImage>,
}

/// Noise seed for one `(snr, trial)` pair.
pub fn trial_seed(master: u64, snr_db: f64, trial: usize) -> u64 {
    derive_seed(master, &[snr_db.to_bits(), trial as u64])
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.iter().all(|v| *v == f64::INFINITY) {
        return (f64::INFINITY, 0.0);
    }
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

enum Link {
    Analog(AnalogLink),
    Digital(DigitalLink),
}

impl Link {
    fn new(img: &GrayImage, cfg: &ExperimentConfig) -> Result<Self> {
        Ok(match cfg.system {
            System::Analog => Link::Analog(AnalogLink::new(img, cfg.code_params()?, cfg.delta)?),
            System::DigitalUncoded => Link::Digital(DigitalLink::new(img, cfg.delta)?),
        })
    }

    fn trial(&self, cfg: &ExperimentConfig, snr_db: f64, seed: u64) -> Result<TrialOutcome> {
        match self {
            Link::Analog(l) => l.transmit(snr_db, cfg.ep_mode, seed),
            Link::Digital(l) => l.transmit(snr_db, cfg.ep_mode, seed),
        }
    }
}

/// Runs every `(snr, trial)` of `cfg` on an in-memory image.
pub fn sweep(img: &GrayImage, cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let link = Link::new(img, cfg)?;
    let mut records = Vec::with_capacity(cfg.snr_db.len());
    let mut reconstructions = Vec::with_capacity(cfg.snr_db.len());
    for &snr in &cfg.snr_db {
        let started = Instant::now();
        let mut mses = Vec::with_capacity(cfg.trials);
        let mut psnrs = Vec::with_capacity(cfg.trials);
        let mut symbols = 0;
        for t in 0..cfg.trials {
            let out = link.trial(cfg, snr, trial_seed(cfg.seed, snr, t))?;
            mses.push(out.mse);
            psnrs.push(out.psnr_db);
            symbols = out.transmitted_symbols;
            if t == 0 {
                reconstructions.push(out.recon);
            }
        }
        let (psnr_mean_db, psnr_std_db) = mean_std(&psnrs);
        records.push(SweepRecord {
            snr_db: snr,
            mse_mean: mses.iter().sum::<f64>() / mses.len() as f64,
            psnr_mean_db,
            psnr_std_db,
            trials: cfg.trials,
            transmitted_symbols: symbols,
            wall_time_s: started.elapsed().as_secs_f64(),
        });
    }
    Ok(SweepResult {
        system: cfg.system,
        records,
        reconstructions,
    })
}

/// Loads the input, sweeps, and writes `sweep.csv`, `sweep.json` and one
/// `recon_<snr>.pgm` per SNR point into `cfg.out_dir`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let img = load_pgm(&cfg.input)?;
    let result = sweep(&img, cfg)?;
    write_outputs(&result, &img, cfg)?;
    Ok(result)
}

/// One transmission per SNR point.
pub fn run_single(cfg: &ExperimentConfig) -> Result<SweepResult> {
    run_sweep(&ExperimentConfig {
        trials: 1,
        ..cfg.clone()
    })
}

/// [`run_sweep`] with the uncoded 16-ASK system.
pub fn run_digital_baseline(cfg: &ExperimentConfig) -> Result<SweepResult> {
    run_sweep(&ExperimentConfig {
        system: System::DigitalUncoded,
        ..cfg.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::test_pattern;

    fn cfg(snr: Vec<f64>, trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            snr_db: snr,
            trials,
            ..Default::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(cfg(vec![], 1).validate().is_err());
        assert!(cfg(vec![10.0], 0).validate().is_err());
        assert!(cfg(vec![f64::NAN], 1).validate().is_err());
        assert!(ExperimentConfig { n: 1, ..cfg(vec![10.0], 1) }.validate().is_err());
        assert!(ExperimentConfig { delta: 0.0, ..cfg(vec![10.0], 1) }.validate().is_err());
        assert!(cfg(vec![f64::INFINITY, 3.0], 2).validate().is_ok());
        assert_eq!("digital-uncoded".parse::<System>().unwrap(), System::DigitalUncoded);
        assert!("turbo".parse::<System>().is_err());
    }

    #[test]
    fn mean_std_cases() {
        assert_eq!(mean_std(&[3.0]), (3.0, 0.0));
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(mean_std(&[f64::INFINITY; 3]), (f64::INFINITY, 0.0));
    }

    #[test]
    fn noiseless_sweep_is_lossless() {
        let img = test_pattern(20, 9).unwrap();
        for system in [System::Analog, System::DigitalUncoded] {
            let res = sweep(&img, &ExperimentConfig { system, ..cfg(vec![f64::INFINITY], 2) }).unwrap();
            assert_eq!(res.records[0].mse_mean, 0.0);
            assert_eq!(res.records[0].psnr_mean_db, f64::INFINITY);
            assert_eq!(res.reconstructions[0], img);
        }
    }

    #[test]
    fn single_trial_matches_first_sweep_trial() {
        let img = test_pattern(16, 16).unwrap();
        let one = sweep(&img, &cfg(vec![12.0], 1)).unwrap();
        let many = sweep(&img, &cfg(vec![12.0], 4)).unwrap();
        assert_eq!(one.reconstructions, many.reconstructions);
        assert_eq!(one.records[0].trials, 1);
    }

    #[test]
    fn symbol_accounting() {
        let img = test_pattern(10, 10).unwrap();
        for n in [2, 3] {
            let res = sweep(&img, &ExperimentConfig { n, ..cfg(vec![20.0], 1) }).unwrap();
            // 100 pixels padded to 102, 2n symbols each.
            assert_eq!(res.records[0].transmitted_symbols, 102 * 2 * n);
        }
        let res = sweep(
            &img,
            &ExperimentConfig {
                system: System::DigitalUncoded,
                ..cfg(vec![20.0], 1)
            },
        )
        .unwrap();
        assert_eq!(res.records[0].transmitted_symbols, 200);
    }
}
