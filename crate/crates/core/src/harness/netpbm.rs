//! Netpbm bilevel and grayscale images: plain (P1, P2) and raw (P4, P5).

use std::fmt::Write as _;

use super::CodecError;
use crate::features::Glyph;
use crate::imagecore::{BinaryImage, GrayImage};

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(data: &'a [u8]) -> Self {
        Cursor { data, pos: 0 }
    }

    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32, CodecError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(CodecError::new(format!("expected {what} at byte {start}")));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CodecError::new(format!("{what} out of range at byte {start}")))
    }

    /// Exactly one whitespace byte separates a raw header from its raster.
    fn single_whitespace(&mut self) -> Result<(), CodecError> {
        match self.data.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(CodecError::new("missing whitespace before raster")),
        }
    }

    fn expect_end(&mut self) -> Result<(), CodecError> {
        self.skip_space_and_comments();
        if self.pos != self.data.len() {
            return Err(CodecError::new(format!(
                "unexpected data at byte {}",
                self.pos
            )));
        }
        Ok(())
    }
}

fn dims(cur: &mut Cursor<'_>) -> Result<(usize, usize), CodecError> {
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    if width == 0 || height == 0 {
        return Err(CodecError::new(format!("empty raster {width}x{height}")));
    }
    Ok((width, height))
}

fn maxval(cur: &mut Cursor<'_>) -> Result<u32, CodecError> {
    let max = cur.number("maxval")?;
    if !(1..=255).contains(&max) {
        return Err(CodecError::new(format!(
            "unsupported maxval {max} (1..=255)"
        )));
    }
    Ok(max)
}

fn scale(value: u32, max: u32) -> Result<u8, CodecError> {
    if value > max {
        return Err(CodecError::new(format!(
            "sample {value} exceeds maxval {max}"
        )));
    }
    Ok(((value * 255 + max / 2) / max) as u8)
}

pub fn is_netpbm(data: &[u8]) -> bool {
    data.len() >= 2 && data[0] == b'P' && (b'1'..=b'6').contains(&data[1])
}

/// Decodes P1/P2/P4/P5. PBM `1` is ink. PGM samples are rescaled to 0..=255.
pub fn decode(data: &[u8]) -> Result<Glyph, CodecError> {
    if !is_netpbm(data) {
        return Err(CodecError::new("not a netpbm file"));
    }
    let kind = data[1];
    let mut cur = Cursor::new(data);
    cur.pos = 2;
    match kind {
        b'1' => {
            let (w, h) = dims(&mut cur)?;
            let mut bits = Vec::with_capacity(w * h);
            while bits.len() < w * h {
                cur.skip_space_and_comments();
                match cur.data.get(cur.pos) {
                    Some(b'0') => bits.push(false),
                    Some(b'1') => bits.push(true),
                    Some(&b) => {
                        return Err(CodecError::new(format!(
                            "invalid P1 sample {:?} at byte {}",
                            b as char, cur.pos
                        )))
                    }
                    None => return Err(CodecError::new("truncated P1 raster")),
                }
                cur.pos += 1;
            }
            cur.expect_end()?;
            Ok(Glyph::Binary(
                BinaryImage::new(w, h, bits).map_err(CodecError::from_image)?,
            ))
        }
        b'2' => {
            let (w, h) = dims(&mut cur)?;
            let max = maxval(&mut cur)?;
            let mut px = Vec::with_capacity(w * h);
            while px.len() < w * h {
                cur.skip_space_and_comments();
                if cur.pos >= cur.data.len() {
                    return Err(CodecError::new("truncated P2 raster"));
                }
                px.push(scale(cur.number("sample")?, max)?);
            }
            cur.expect_end()?;
            Ok(Glyph::Gray(
                GrayImage::new(w, h, px).map_err(CodecError::from_image)?,
            ))
        }
        b'4' => {
            let (w, h) = dims(&mut cur)?;
            cur.single_whitespace()?;
            let stride = w.div_ceil(8);
            let raster = cur
                .data
                .get(cur.pos..cur.pos + stride * h)
                .ok_or_else(|| CodecError::new("truncated P4 raster"))?;
            let bits = raster
                .chunks(stride)
                .flat_map(|row| (0..w).map(move |x| row[x / 8] & (0x80 >> (x % 8)) != 0))
                .collect();
            Ok(Glyph::Binary(
                BinaryImage::new(w, h, bits).map_err(CodecError::from_image)?,
            ))
        }
        b'5' => {
            let (w, h) = dims(&mut cur)?;
            let max = maxval(&mut cur)?;
            cur.single_whitespace()?;
            let raster = cur
                .data
                .get(cur.pos..cur.pos + w * h)
                .ok_or_else(|| CodecError::new("truncated P5 raster"))?;
            let px = raster
                .iter()
                .map(|&v| scale(u32::from(v), max))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Glyph::Gray(
                GrayImage::new(w, h, px).map_err(CodecError::from_image)?,
            ))
        }
        other => Err(CodecError::new(format!(
            "unsupported netpbm type P{}",
            other as char
        ))),
    }
}

/// Plain lines are wrapped so no line exceeds 70 characters.
fn push_wrapped<I: Iterator<Item = String>>(out: &mut String, tokens: I, sep: &str) {
    let mut line_len = 0;
    for tok in tokens {
        if line_len > 0 && line_len + sep.len() + tok.len() > 70 {
            out.push('\n');
            line_len = 0;
        }
        if line_len > 0 {
            out.push_str(sep);
            line_len += sep.len();
        }
        out.push_str(&tok);
        line_len += tok.len();
    }
    out.push('\n');
}

pub fn encode_pbm_plain(img: &BinaryImage) -> Vec<u8> {
    let mut out = String::new();
    let _ = writeln!(out, "P1\n{} {}", img.width(), img.height());
    for row in img.bits().chunks(img.width()) {
        push_wrapped(
            &mut out,
            row.iter().map(|&b| if b { "1" } else { "0" }.to_string()),
            "",
        );
    }
    out.into_bytes()
}

pub fn encode_pbm_raw(img: &BinaryImage) -> Vec<u8> {
    let mut out = format!("P4\n{} {}\n", img.width(), img.height()).into_bytes();
    for row in img.bits().chunks(img.width()) {
        for byte_bits in row.chunks(8) {
            let byte = byte_bits
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | if b { 0x80 >> i } else { 0 });
            out.push(byte);
        }
    }
    out
}

pub fn encode_pgm_plain(img: &GrayImage) -> Vec<u8> {
    let mut out = String::new();
    let _ = writeln!(out, "P2\n{} {}\n255", img.width(), img.height());
    for row in img.pixels().chunks(img.width()) {
        push_wrapped(&mut out, row.iter().map(u8::to_string), " ");
    }
    out.into_bytes()
}

pub fn encode_pgm_raw(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}
