//! Netpbm grayscale (PGM) reading and writing.
//!
//! Both the plain (`P2`) and raw (`P5`) variants are read. Output is always
//! raw. Raw 16-bit samples are big-endian.

use std::fs;
use std::path::Path;

use crate::resample::{BitDepth, ImageBuffer};
use crate::{Error, Result};

pub fn read_image(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    parse_pgm(&fs::read(path)?)
}

pub fn write_image(img: &ImageBuffer, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_pgm(img))?;
    Ok(())
}

pub fn encode_pgm(img: &ImageBuffer) -> Vec<u8> {
    let maxval = img.depth().max_value();
    let mut out = format!("P5\n{} {}\n{}\n", img.width(), img.height(), maxval).into_bytes();
    match img.depth() {
        BitDepth::Eight => out.extend(img.samples().iter().map(|&s| s as u8)),
        BitDepth::Sixteen => {
            for &s in img.samples() {
                out.extend_from_slice(&s.to_be_bytes());
            }
        }
    }
    out
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.pos < self.bytes.len() && !matches!(self.bytes[self.pos], b'\n' | b'\r') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(if self.pos >= self.bytes.len() {
                Error::Format(format!("truncated file while reading {what}"))
            } else {
                Error::Format(format!("expected a number for {what}"))
            });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format(format!("{what} is out of range")))
    }
}

pub fn parse_pgm(bytes: &[u8]) -> Result<ImageBuffer> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(Error::UnsupportedFormat("missing netpbm magic number".into()));
    }
    let raw = match bytes[1] {
        b'2' => false,
        b'5' => true,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "P{} is not a grayscale PGM",
                char::from(other)
            )))
        }
    };
    let mut hdr = Header { bytes, pos: 2 };
    if !hdr.bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(Error::Format("malformed magic number".into()));
    }
    let width = hdr.number("width")? as usize;
    let height = hdr.number("height")? as usize;
    let maxval = hdr.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Format(format!("maxval {maxval} outside 1..=65535")));
    }
    if width == 0 || height == 0 {
        return Err(Error::Format(format!("empty image {width}x{height}")));
    }
    let depth = if maxval <= 255 {
        BitDepth::Eight
    } else {
        BitDepth::Sixteen
    };
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::Format("image dimensions overflow".into()))?;

    let samples = if raw {
        // Exactly one whitespace byte separates the header from the raster.
        if !hdr.bytes.get(hdr.pos).is_some_and(u8::is_ascii_whitespace) {
            return Err(Error::Format("missing separator before raster".into()));
        }
        let data = &bytes[hdr.pos + 1..];
        let per = if maxval <= 255 { 1 } else { 2 };
        let need = count
            .checked_mul(per)
            .ok_or_else(|| Error::Format("image dimensions overflow".into()))?;
        if data.len() < need {
            return Err(Error::Format(format!(
                "truncated raster: {} of {need} bytes",
                data.len()
            )));
        }
        if per == 1 {
            data[..need].iter().map(|&b| u16::from(b)).collect()
        } else {
            data[..need]
                .chunks_exact(2)
                .map(|c| u16::from_be_bytes([c[0], c[1]]))
                .collect()
        }
    } else {
        let mut v = Vec::with_capacity(count.min(1 << 24));
        for i in 0..count {
            let s = hdr.number(&format!("sample {i}"))?;
            if s > maxval {
                return Err(Error::Format(format!("sample {s} exceeds maxval {maxval}")));
            }
            v.push(s as u16);
        }
        v
    };
    if let Some(&s) = samples.iter().find(|&&s| u32::from(s) > maxval) {
        return Err(Error::Format(format!("sample {s} exceeds maxval {maxval}")));
    }
    ImageBuffer::new(width, height, depth, samples)
}
