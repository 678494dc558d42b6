//! Raster value types and the binary preprocessing steps applied to a
//! scanned glyph before feature extraction: global thresholding, polarity
//! inversion, artifact removal by opening, tight cropping and zoning.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImageError {
    #[error("invalid dimensions {width}x{height} for {len} pixels")]
    InvalidDimensions {
        width: usize,
        height: usize,
        len: usize,
    },
    #[error("glyph has no foreground pixels")]
    EmptyGlyph,
    #[error("box {left},{top} {width}x{height} exceeds {image_width}x{image_height} image")]
    OutOfBounds {
        left: usize,
        top: usize,
        width: usize,
        height: usize,
        image_width: usize,
        image_height: usize,
    },
    #[error("zone too thin: {axis} extent {extent} < 2")]
    ZoneTooThin { axis: &'static str, extent: usize },
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<(), ImageError> {
    if width == 0 || height == 0 || width.checked_mul(height) != Some(len) {
        return Err(ImageError::InvalidDimensions { width, height, len });
    }
    Ok(())
}

/// 8-bit intensity raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, ImageError> {
        check_dims(width, height, pixels.len())?;
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }
}

/// 1-bit raster, row-major; `true` is foreground (ink).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, ImageError> {
        check_dims(width, height, bits.len())?;
        Ok(BinaryImage {
            width,
            height,
            bits,
        })
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds an image from rows of text where `#`, `1`, `X` or `*` mark
    /// foreground and any other character is background. Rows are split on
    /// newlines after trimming surrounding blank lines and indentation.
    pub fn from_pattern(pattern: &str) -> Result<Self, ImageError> {
        let rows: Vec<&str> = pattern
            .lines()
            .map(str::trim)
            .filter(|row| !row.is_empty())
            .collect();
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.chars().count());
        let mut bits = Vec::with_capacity(width * height);
        for row in &rows {
            if row.chars().count() != width {
                return Err(ImageError::InvalidDimensions {
                    width,
                    height,
                    len: bits.len() + row.chars().count(),
                });
            }
            bits.extend(row.chars().map(|c| matches!(c, '#' | '1' | 'X' | '*')));
        }
        Self::new(width, height, bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Pixel lookup on the infinite background plane around the image.
    #[inline]
    pub fn get_or_background(&self, x: isize, y: isize) -> bool {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            false
        } else {
            self.get(x as usize, y as usize)
        }
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn foreground_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn has_foreground(&self) -> bool {
        self.bits.iter().any(|&b| b)
    }

    /// Surrounds the image with `margin` rows and columns of background.
    pub fn pad(&self, margin: usize) -> BinaryImage {
        let width = self.width + 2 * margin;
        let height = self.height + 2 * margin;
        let mut bits = vec![false; width * height];
        for y in 0..self.height {
            let src = &self.bits[y * self.width..(y + 1) * self.width];
            let start = (y + margin) * width + margin;
            bits[start..start + self.width].copy_from_slice(src);
        }
        BinaryImage {
            width,
            height,
            bits,
        }
    }
}

impl fmt::Debug for BinaryImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryImage {}x{}", self.width, self.height)?;
        for row in self.bits.chunks(self.width) {
            let line: String = row.iter().map(|&b| if b { '#' } else { '.' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// Axis-aligned box in pixel coordinates; `left`/`top` are inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundingBox {
    pub left: usize,
    pub top: usize,
    pub width: usize,
    pub height: usize,
}

/// Otsu threshold over the 256-bin histogram: the smallest intensity `t`
/// maximizing the between-class variance of `{<= t}` vs `{> t}`. Returns
/// `None` when no split separates two non-empty classes (constant image).
pub fn otsu_threshold(img: &GrayImage) -> Option<u8> {
    let mut hist = [0u64; 256];
    for &p in img.pixels() {
        hist[p as usize] += 1;
    }
    let total = img.pixels().len() as u128;
    let sum_all: u128 = hist
        .iter()
        .enumerate()
        .map(|(i, &c)| i as u128 * c as u128)
        .sum();

    // Between-class variance is proportional to (N*S0 - w0*S)^2 / (w0*w1);
    // candidates are compared as exact fractions.
    let mut best: Option<(u8, u128, u128)> = None;
    let mut weight_low = 0u128;
    let mut sum_low = 0u128;
    for (t, &count) in hist.iter().enumerate() {
        weight_low += count as u128;
        sum_low += t as u128 * count as u128;
        let weight_high = total - weight_low;
        if weight_low == 0 || weight_high == 0 {
            continue;
        }
        let spread = (total * sum_low).abs_diff(weight_low * sum_all);
        let num = spread.saturating_mul(spread);
        let den = weight_low * weight_high;
        let better = match best {
            None => true,
            Some((_, best_num, best_den)) => fraction_greater(num, den, best_num, best_den),
        };
        if better {
            best = Some((t as u8, num, den));
        }
    }
    best.map(|(t, _, _)| t)
}

/// `a/b > c/d` for positive denominators, exact when the products fit.
fn fraction_greater(a: u128, b: u128, c: u128, d: u128) -> bool {
    match (a.checked_mul(d), c.checked_mul(b)) {
        (Some(lhs), Some(rhs)) => lhs > rhs,
        _ => (a as f64 / b as f64) > (c as f64 / d as f64),
    }
}

/// Global Otsu binarization with dark ink as foreground: a pixel is
/// foreground iff its intensity is at or below the threshold. A constant
/// image is all background.
pub fn binarize(img: &GrayImage) -> BinaryImage {
    let bits = match otsu_threshold(img) {
        Some(t) => img.pixels().iter().map(|&p| p <= t).collect(),
        None => vec![false; img.pixels().len()],
    };
    BinaryImage {
        width: img.width(),
        height: img.height(),
        bits,
    }
}

pub fn invert(img: &BinaryImage) -> BinaryImage {
    BinaryImage {
        width: img.width,
        height: img.height,
        bits: img.bits.iter().map(|&b| !b).collect(),
    }
}

/// 3x3 square erosion; pixels outside the image count as background.
pub fn erode(img: &BinaryImage) -> BinaryImage {
    let (w, h) = (img.width, img.height);
    let mut out = vec![false; w * h];
    if w >= 3 && h >= 3 {
        for y in 1..h - 1 {
            for x in 1..w - 1 {
                out[y * w + x] =
                    (y - 1..=y + 1).all(|yy| (x - 1..=x + 1).all(|xx| img.get(xx, yy)));
            }
        }
    }
    BinaryImage {
        width: w,
        height: h,
        bits: out,
    }
}

/// 3x3 square dilation; neighbors outside the image are ignored.
pub fn dilate(img: &BinaryImage) -> BinaryImage {
    let (w, h) = (img.width, img.height);
    let mut out = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            if !img.get(x, y) {
                continue;
            }
            for yy in y.saturating_sub(1)..=(y + 1).min(h - 1) {
                for xx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                    out[yy * w + xx] = true;
                }
            }
        }
    }
    BinaryImage {
        width: w,
        height: h,
        bits: out,
    }
}

/// Opening with a 3x3 square: erosion then dilation. Removes any ink not
/// covered by a fully inked 3x3 square lying inside the image.
pub fn morphological_open(img: &BinaryImage) -> BinaryImage {
    dilate(&erode(img))
}

pub fn bounding_box(img: &BinaryImage) -> Result<BoundingBox, ImageError> {
    let mut min_x = usize::MAX;
    let mut min_y = usize::MAX;
    let mut max_x = 0;
    let mut max_y = 0;
    for (y, row) in img.bits.chunks(img.width).enumerate() {
        for (x, _) in row.iter().enumerate().filter(|(_, &b)| b) {
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
    }
    if min_x == usize::MAX {
        return Err(ImageError::EmptyGlyph);
    }
    Ok(BoundingBox {
        left: min_x,
        top: min_y,
        width: max_x - min_x + 1,
        height: max_y - min_y + 1,
    })
}

pub fn crop(img: &BinaryImage, bbox: BoundingBox) -> Result<BinaryImage, ImageError> {
    let fits = bbox.width >= 1
        && bbox.height >= 1
        && bbox
            .left
            .checked_add(bbox.width)
            .is_some_and(|r| r <= img.width)
        && bbox
            .top
            .checked_add(bbox.height)
            .is_some_and(|b| b <= img.height);
    if !fits {
        return Err(ImageError::OutOfBounds {
            left: bbox.left,
            top: bbox.top,
            width: bbox.width,
            height: bbox.height,
            image_width: img.width,
            image_height: img.height,
        });
    }
    let mut bits = Vec::with_capacity(bbox.width * bbox.height);
    for y in bbox.top..bbox.top + bbox.height {
        let start = y * img.width + bbox.left;
        bits.extend_from_slice(&img.bits[start..start + bbox.width]);
    }
    Ok(BinaryImage {
        width: bbox.width,
        height: bbox.height,
        bits,
    })
}

/// Left zone takes columns `[0, w/2)`, right zone the rest.
pub fn split_vertical(img: &BinaryImage) -> Result<(BinaryImage, BinaryImage), ImageError> {
    if img.width < 2 {
        return Err(ImageError::ZoneTooThin {
            axis: "width",
            extent: img.width,
        });
    }
    let mid = img.width / 2;
    let left = crop(
        img,
        BoundingBox {
            left: 0,
            top: 0,
            width: mid,
            height: img.height,
        },
    )?;
    let right = crop(
        img,
        BoundingBox {
            left: mid,
            top: 0,
            width: img.width - mid,
            height: img.height,
        },
    )?;
    Ok((left, right))
}

/// Top zone takes rows `[0, h/2)`, bottom zone the rest.
pub fn split_horizontal(img: &BinaryImage) -> Result<(BinaryImage, BinaryImage), ImageError> {
    if img.height < 2 {
        return Err(ImageError::ZoneTooThin {
            axis: "height",
            extent: img.height,
        });
    }
    let mid = img.height / 2;
    let split = mid * img.width;
    Ok((
        BinaryImage {
            width: img.width,
            height: mid,
            bits: img.bits[..split].to_vec(),
        },
        BinaryImage {
            width: img.width,
            height: img.height - mid,
            bits: img.bits[split..].to_vec(),
        },
    ))
}
