use std::fmt::Write as _;
use std::fs;

use serde::{Serialize, Serializer};

use super::{ExperimentConfig, SweepRecord, SweepResult, System};
use crate::channel::EpMode;
use crate::imaging::{save_pgm, GrayImage};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "snr_db,mse_mean,psnr_mean_db,psnr_std_db,trials";

const DIGITAL_NOTE: &str = "uncoded 16-ASK reference (natural labelling, hard decisions, \
                            2 channel symbols per pixel); not a channel-coded system";

/// Finite values as numbers, others as the strings "inf", "-inf", "nan".
pub(crate) fn ser_f64<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.12e}")
    } else {
        format!("{v}")
    }
}

fn snr_label(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_owned()
    } else {
        format!("{v}")
    }
}

/// CSV body: fixed header, then one row per SNR point. Measured quantities
/// carry 13 significant digits.
pub fn csv_string(records: &[SweepRecord]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            snr_label(r.snr_db),
            num(r.mse_mean),
            num(r.psnr_mean_db),
            num(r.psnr_std_db),
            r.trials
        );
    }
    out
}

/// `recon_14.pgm`, `recon_-2.5.pgm`, `recon_noiseless.pgm`.
pub fn recon_file_name(snr_db: f64) -> String {
    if snr_db == f64::INFINITY {
        "recon_noiseless.pgm".to_owned()
    } else {
        format!("recon_{snr_db}.pgm")
    }
}

/// Comma-separated dB values; `inf` / `noiseless` select the noiseless channel.
pub fn parse_snr_list(s: &str) -> Result<Vec<f64>> {
    let list = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t {
            "inf" | "+inf" | "noiseless" => Ok(f64::INFINITY),
            t => t
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::argument(format!("bad SNR value {t:?}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    if list.is_empty() {
        return Err(Error::argument("SNR list is empty"));
    }
    Ok(list)
}

#[derive(Serialize)]
struct CodeInfo {
    k: usize,
    n: usize,
    rate: f64,
}

#[derive(Serialize)]
struct ImageInfo {
    width: usize,
    height: usize,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    system: System,
    #[serde(skip_serializing_if = "Option::is_none")]
    code: Option<CodeInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
    delta: f64,
    ep_mode: EpMode,
    seed: u64,
    trials: usize,
    image: ImageInfo,
    records: &'a [SweepRecord],
}

pub fn json_string(result: &SweepResult, img: &GrayImage, cfg: &ExperimentConfig) -> Result<String> {
    let code = match result.system {
        System::Analog => {
            let p = cfg.code_params()?;
            Some(CodeInfo {
                k: p.k(),
                n: p.n(),
                rate: p.rate(),
            })
        }
        System::DigitalUncoded => None,
    };
    let report = JsonReport {
        system: result.system,
        code,
        note: (result.system == System::DigitalUncoded).then_some(DIGITAL_NOTE),
        delta: cfg.delta,
        ep_mode: cfg.ep_mode,
        seed: cfg.seed,
        trials: cfg.trials,
        image: ImageInfo {
            width: img.width(),
            height: img.height(),
        },
        records: &result.records,
    };
    let mut s = serde_json::to_string_pretty(&report)?;
    s.push('\n');
    Ok(s)
}

pub fn write_outputs(result: &SweepResult, img: &GrayImage, cfg: &ExperimentConfig) -> Result<()> {
    let dir = &cfg.out_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv = dir.join("sweep.csv");
    fs::write(&csv, csv_string(&result.records)).map_err(|e| Error::io(&csv, e))?;
    let json = dir.join("sweep.json");
    fs::write(&json, json_string(result, img, cfg)?).map_err(|e| Error::io(&json, e))?;
    for (rec, recon) in result.records.iter().zip(&result.reconstructions) {
        save_pgm(recon, dir.join(recon_file_name(rec.snr_db)))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(snr: f64, mse: f64, psnr: f64) -> SweepRecord {
        SweepRecord {
            snr_db: snr,
            mse_mean: mse,
            psnr_mean_db: psnr,
            psnr_std_db: 0.25,
            trials: 3,
            transmitted_symbols: 12,
            wall_time_s: 1.0,
        }
    }

    #[test]
    fn snr_list_parsing() {
        assert_eq!(parse_snr_list("10,14, 18").unwrap(), vec![10.0, 14.0, 18.0]);
        assert_eq!(parse_snr_list("noiseless").unwrap(), vec![f64::INFINITY]);
        assert_eq!(parse_snr_list("-3.5,inf").unwrap(), vec![-3.5, f64::INFINITY]);
        assert!(parse_snr_list("").is_err());
        assert!(parse_snr_list("ten").is_err());
        assert!(parse_snr_list("nan").is_err());
    }

    #[test]
    fn file_names() {
        assert_eq!(recon_file_name(14.0), "recon_14.pgm");
        assert_eq!(recon_file_name(14.5), "recon_14.5.pgm");
        assert_eq!(recon_file_name(f64::INFINITY), "recon_noiseless.pgm");
    }

    #[test]
    fn csv_layout() {
        let csv = csv_string(&[rec(14.0, 70.123456789, 29.6752), rec(f64::INFINITY, 0.0, f64::INFINITY)]);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "14,7.012345678900e1,2.967520000000e1,2.500000000000e-1,3");
        assert_eq!(lines[2], "inf,0.000000000000e0,inf,2.500000000000e-1,3");
        for line in &lines[1..] {
            for field in line.split(',').skip(1).take(3) {
                let v: f64 = field.parse().unwrap();
                assert!(v.is_finite() || v.is_infinite());
            }
        }
    }

    #[test]
    fn json_non_finite_as_strings() {
        let s = serde_json::to_string(&rec(f64::INFINITY, 0.0, f64::INFINITY)).unwrap();
        assert!(s.contains("\"snr_db\":\"inf\""), "{s}");
        assert!(s.contains("\"psnr_mean_db\":\"inf\""), "{s}");
        assert!(!s.contains("wall_time"), "{s}");
    }
}
