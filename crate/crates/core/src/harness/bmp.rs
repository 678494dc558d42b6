//! Uncompressed Windows bitmaps with a 1-bit or 8-bit grayscale palette.
//!
//! All multi-byte fields are little-endian. Rows are padded to 4 bytes and
//! stored bottom-up unless the header height is negative.

use super::CodecError;
use crate::features::Glyph;
use crate::imagecore::{BinaryImage, GrayImage};

const FILE_HEADER_LEN: usize = 14;
const INFO_HEADER_LEN: usize = 40;
const CORE_HEADER_LEN: usize = 12;
const BI_RGB: u32 = 0;

fn u16_at(data: &[u8], off: usize) -> Result<u16, CodecError> {
    data.get(off..off + 2)
        .map(|b| u16::from_le_bytes([b[0], b[1]]))
        .ok_or_else(|| CodecError::new("truncated BMP header"))
}

fn u32_at(data: &[u8], off: usize) -> Result<u32, CodecError> {
    data.get(off..off + 4)
        .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| CodecError::new("truncated BMP header"))
}

fn i32_at(data: &[u8], off: usize) -> Result<i32, CodecError> {
    u32_at(data, off).map(|v| v as i32)
}

pub fn is_bmp(data: &[u8]) -> bool {
    data.starts_with(b"BM")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Rgb {
    r: u8,
    g: u8,
    b: u8,
}

impl Rgb {
    fn luma(self) -> u32 {
        (299 * u32::from(self.r) + 587 * u32::from(self.g) + 114 * u32::from(self.b)) / 1000
    }
}

/// Decodes a 1-bit image to a bilevel glyph (the darker palette entry is
/// ink) and an 8-bit image with a gray palette to a grayscale glyph.
pub fn decode(data: &[u8]) -> Result<Glyph, CodecError> {
    if !is_bmp(data) {
        return Err(CodecError::new("missing BM signature"));
    }
    let pixel_offset = u32_at(data, 10)? as usize;
    let dib_len = u32_at(data, FILE_HEADER_LEN)? as usize;

    let (width, height, bpp, colors_used, entry_len) = match dib_len {
        CORE_HEADER_LEN => {
            let w = i32::from(u16_at(data, 18)?);
            let h = i32::from(u16_at(data, 20)? as i16);
            (w, h, u16_at(data, 24)?, 0, 3)
        }
        40 | 52 | 56 | 108 | 124 => {
            let compression = u32_at(data, 30)?;
            if compression != BI_RGB {
                return Err(CodecError::new(format!(
                    "unsupported BMP compression {compression}"
                )));
            }
            (
                i32_at(data, 18)?,
                i32_at(data, 22)?,
                u16_at(data, 28)?,
                u32_at(data, 46)?,
                4,
            )
        }
        other => {
            return Err(CodecError::new(format!(
                "unsupported BMP header size {other}"
            )))
        }
    };
    let planes_offset = if dib_len == CORE_HEADER_LEN { 22 } else { 26 };
    if u16_at(data, planes_offset)? != 1 {
        return Err(CodecError::new("BMP planes must be 1"));
    }
    if bpp != 1 && bpp != 8 {
        return Err(CodecError::new(format!("unsupported BMP bit depth {bpp}")));
    }
    if width <= 0 || height == 0 || height == i32::MIN {
        return Err(CodecError::new(format!(
            "invalid BMP dimensions {width}x{height}"
        )));
    }
    let top_down = height < 0;
    let (w, h) = (width as usize, height.unsigned_abs() as usize);

    let max_colors = 1usize << bpp;
    let palette_len = match colors_used as usize {
        0 => max_colors,
        n if n <= max_colors => n,
        n => {
            return Err(CodecError::new(format!(
                "palette of {n} entries for {bpp}-bit image"
            )))
        }
    };
    let palette_start = FILE_HEADER_LEN + dib_len;
    let palette: Vec<Rgb> = (0..palette_len)
        .map(|i| {
            let off = palette_start + i * entry_len;
            data.get(off..off + 3)
                .map(|b| Rgb {
                    b: b[0],
                    g: b[1],
                    r: b[2],
                })
                .ok_or_else(|| CodecError::new("truncated BMP palette"))
        })
        .collect::<Result<_, _>>()?;
    if pixel_offset < palette_start + palette_len * entry_len {
        return Err(CodecError::new("pixel data overlaps BMP palette"));
    }

    let stride = (w * bpp as usize).div_ceil(32) * 4;
    let raster = data
        .get(pixel_offset..pixel_offset + stride * h)
        .ok_or_else(|| CodecError::new("truncated BMP pixel data"))?;
    let row = |y: usize| {
        let stored = if top_down { y } else { h - 1 - y };
        &raster[stored * stride..(stored + 1) * stride]
    };

    let index = |i: usize| -> Result<Rgb, CodecError> {
        palette
            .get(i)
            .copied()
            .ok_or_else(|| CodecError::new(format!("palette index {i} out of range")))
    };

    if bpp == 1 {
        if palette.len() < 2 {
            return Err(CodecError::new("1-bit BMP needs two palette entries"));
        }
        let (l0, l1) = (palette[0].luma(), palette[1].luma());
        if l0 == l1 {
            return Err(CodecError::new("1-bit BMP palette has no contrast"));
        }
        let ink_index = u8::from(l1 < l0);
        let mut bits = Vec::with_capacity(w * h);
        for y in 0..h {
            let r = row(y);
            bits.extend((0..w).map(|x| (r[x / 8] >> (7 - x % 8)) & 1 == ink_index));
        }
        Ok(Glyph::Binary(
            BinaryImage::new(w, h, bits).map_err(CodecError::from_image)?,
        ))
    } else {
        if let Some(c) = palette.iter().find(|c| c.r != c.g || c.g != c.b) {
            return Err(CodecError::new(format!(
                "8-bit BMP palette is not grayscale: {c:?}"
            )));
        }
        let mut px = Vec::with_capacity(w * h);
        for y in 0..h {
            for &i in &row(y)[..w] {
                px.push(index(i as usize)?.r);
            }
        }
        Ok(Glyph::Gray(
            GrayImage::new(w, h, px).map_err(CodecError::from_image)?,
        ))
    }
}

fn write_headers(out: &mut Vec<u8>, w: usize, h: usize, bpp: u16, palette: &[[u8; 3]]) {
    let stride = (w * bpp as usize).div_ceil(32) * 4;
    let pixel_offset = FILE_HEADER_LEN + INFO_HEADER_LEN + palette.len() * 4;
    let file_len = pixel_offset + stride * h;
    out.extend_from_slice(b"BM");
    out.extend_from_slice(&(file_len as u32).to_le_bytes());
    out.extend_from_slice(&[0; 4]);
    out.extend_from_slice(&(pixel_offset as u32).to_le_bytes());
    out.extend_from_slice(&(INFO_HEADER_LEN as u32).to_le_bytes());
    out.extend_from_slice(&(w as i32).to_le_bytes());
    out.extend_from_slice(&(h as i32).to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&bpp.to_le_bytes());
    out.extend_from_slice(&BI_RGB.to_le_bytes());
    out.extend_from_slice(&((stride * h) as u32).to_le_bytes());
    // 300 DPI in pixels per metre
    out.extend_from_slice(&11811u32.to_le_bytes());
    out.extend_from_slice(&11811u32.to_le_bytes());
    out.extend_from_slice(&(palette.len() as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    for &[r, g, b] in palette {
        out.extend_from_slice(&[b, g, r, 0]);
    }
}

/// 1-bit bottom-up bitmap; palette index 0 is black ink, 1 is white paper.
pub fn encode_1bit(img: &BinaryImage) -> Vec<u8> {
    let (w, h) = (img.width(), img.height());
    let mut out = Vec::new();
    write_headers(&mut out, w, h, 1, &[[0, 0, 0], [255, 255, 255]]);
    let stride = w.div_ceil(32) * 4;
    for y in (0..h).rev() {
        let mut row = vec![0u8; stride];
        for x in 0..w {
            if !img.get(x, y) {
                row[x / 8] |= 0x80 >> (x % 8);
            }
        }
        out.extend_from_slice(&row);
    }
    out
}

/// 8-bit bottom-up bitmap with the identity gray palette.
pub fn encode_8bit(img: &GrayImage) -> Vec<u8> {
    let (w, h) = (img.width(), img.height());
    let palette: Vec<[u8; 3]> = (0..=255u8).map(|v| [v, v, v]).collect();
    let mut out = Vec::new();
    write_headers(&mut out, w, h, 8, &palette);
    let stride = w.div_ceil(4) * 4;
    for y in (0..h).rev() {
        let start = out.len();
        out.extend_from_slice(&img.pixels()[y * w..(y + 1) * w]);
        out.resize(start + stride, 0);
    }
    out
}
