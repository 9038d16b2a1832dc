//! Binary PGM (`P5`) with 8-bit samples.
//!
//! Accepted header grammar:
//!
//! ```text
//! header  := "P5" sep width sep height sep maxval ws1
//! sep     := (whitespace | comment)+
//! comment := "#" any bytes up to and including "\n"
//! ws1     := exactly one whitespace byte
//! ```
//!
//! `width` and `height` are positive decimal integers and `maxval` must be
//! `255`. The header is followed by `width * height` bytes, row-major, top row
//! first. Bytes after the raster are ignored. The writer emits
//! `P5\n<width> <height>\n255\n` and the raster.

use std::fs;
use std::path::Path;

use super::GrayImage;
use crate::{Error, Result};

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.into(),
        }
    }

    /// Skips whitespace and comments; at least one separator byte is required.
    fn separator(&mut self) -> Result<()> {
        let start = self.pos;
        while let Some(&b) = self.data.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.err("expected whitespace"));
        }
        Ok(())
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err(format!("expected {what}")));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                offset: start,
                message: format!("{what} out of range"),
            })
    }
}

pub fn decode_pgm(data: &[u8]) -> Result<GrayImage> {
    let mut cur = Cursor { data, pos: 0 };
    match data.get(..2) {
        Some(b"P5") => cur.pos = 2,
        Some([b'P', d]) if d.is_ascii_digit() => {
            return Err(cur.err(format!("unsupported netpbm format P{}, only P5 is accepted", *d as char)))
        }
        _ => return Err(cur.err("missing P5 magic number")),
    }
    cur.separator()?;
    let width = cur.number("width")?;
    cur.separator()?;
    let height = cur.number("height")?;
    cur.separator()?;
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if maxval != 255 {
        return Err(Error::Parse {
            offset: maxval_at,
            message: format!("unsupported maxval {maxval}, only 255 is accepted"),
        });
    }
    match data.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(cur.err("expected a single whitespace byte after maxval")),
    }
    if width == 0 || height == 0 {
        return Err(cur.err(format!("zero image dimension {width}x{height}")));
    }
    let len = width
        .checked_mul(height)
        .ok_or_else(|| cur.err("image dimensions overflow"))?;
    let raster = data
        .get(cur.pos..)
        .filter(|r| r.len() >= len)
        .ok_or_else(|| {
            cur.err(format!(
                "truncated raster: need {len} bytes, found {}",
                data.len() - cur.pos
            ))
        })?;
    GrayImage::new(width, height, raster[..len].to_vec())
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pgm(&data)
}

pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_pgm(img)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse_err(data: &[u8]) -> (usize, String) {
        match decode_pgm(data) {
            Err(Error::Parse { offset, message }) => (offset, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn header_with_comment() {
        let img = decode_pgm(b"P5\n# made by hand\n2 1\n255\n\x00\xff").unwrap();
        assert_eq!((img.width(), img.height()), (2, 1));
        assert_eq!(img.pixels(), &[0, 255]);
    }

    #[test]
    fn raster_may_start_with_whitespace_byte() {
        let img = decode_pgm(b"P5 1 2 255\n\n\x20").unwrap();
        assert_eq!(img.pixels(), b"\n ");
    }

    #[test]
    fn rejects_wide_maxval() {
        let (off, msg) = parse_err(b"P5\n1 1\n65535\n\x00\x00");
        assert_eq!(off, 7);
        assert!(msg.contains("unsupported maxval"), "{msg}");
    }

    #[test]
    fn rejects_ascii_pgm() {
        let (off, msg) = parse_err(b"P2\n1 1\n255\n0\n");
        assert_eq!(off, 0);
        assert!(msg.contains("P2"), "{msg}");
        parse_err(b"GIF89a");
        parse_err(b"");
    }

    #[test]
    fn rejects_truncated_raster() {
        let (off, msg) = parse_err(b"P5\n2 2\n255\n\x01\x02\x03");
        assert_eq!(off, 11);
        assert!(msg.contains("truncated"), "{msg}");
    }

    #[test]
    fn rejects_bad_numbers() {
        assert_eq!(parse_err(b"P5\nx 2\n255\n").0, 3);
        assert!(parse_err(b"P5\n0 2\n255\n").1.contains("zero"));
        parse_err(b"P5\n2 2\n255");
        parse_err(b"P52 2 255\n");
        parse_err(b"P5\n99999999999999999999999 1\n255\n");
    }

    #[test]
    fn writer_format() {
        let img = GrayImage::new(3, 1, vec![1, 2, 3]).unwrap();
        assert_eq!(encode_pgm(&img), b"P5\n3 1\n255\n\x01\x02\x03");
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.pgm");
        let pixels: Vec<u8> = (0..64 * 64).map(|i| (i * 37 % 256) as u8).collect();
        let img = GrayImage::new(64, 64, pixels).unwrap();
        save_pgm(&img, &path).unwrap();
        assert_eq!(load_pgm(&path).unwrap(), img);
        assert!(matches!(load_pgm(dir.path().join("missing.pgm")), Err(Error::Io { .. })));
    }

    proptest! {
        #[test]
        fn encode_decode_identity(w in 1usize..40, h in 1usize..40, seed in any::<u64>()) {
            let pixels: Vec<u8> = (0..w * h)
                .map(|i| (seed.wrapping_mul(i as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 56) as u8)
                .collect();
            let img = GrayImage::new(w, h, pixels).unwrap();
            prop_assert_eq!(decode_pgm(&encode_pgm(&img)).unwrap(), img);
        }
    }
}
