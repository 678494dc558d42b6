//! Zoned Euler-number feature vector and the full glyph pipeline.

use std::fmt;

use crate::imagecore::{
    binarize, bounding_box, crop, invert, morphological_open, split_horizontal, split_vertical,
    BinaryImage, GrayImage, ImageError,
};
use crate::topology::{euler_bitquad, Connectivity};

/// Euler numbers of the whole glyph and of its left, right, top and bottom
/// halves, each zone taken as a standalone image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FeatureVector {
    pub whole: i32,
    pub left: i32,
    pub right: i32,
    pub top: i32,
    pub bottom: i32,
}

impl FeatureVector {
    pub const ARITY: usize = 5;

    pub fn new(whole: i32, left: i32, right: i32, top: i32, bottom: i32) -> Self {
        FeatureVector {
            whole,
            left,
            right,
            top,
            bottom,
        }
    }

    pub fn to_array(self) -> [i32; 5] {
        [self.whole, self.left, self.right, self.top, self.bottom]
    }

    pub fn from_array(v: [i32; 5]) -> Self {
        FeatureVector::new(v[0], v[1], v[2], v[3], v[4])
    }
}

impl From<[i32; 5]> for FeatureVector {
    fn from(v: [i32; 5]) -> Self {
        FeatureVector::from_array(v)
    }
}

/// Space-separated components in storage order.
impl fmt::Display for FeatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {}",
            self.whole, self.left, self.right, self.top, self.bottom
        )
    }
}

fn euler(img: &BinaryImage, conn: Connectivity) -> i32 {
    // Euler numbers of a raster are bounded by its pixel count
    euler_bitquad(img, conn) as i32
}

/// Feature vector of an already cropped glyph.
pub fn extract_features(
    glyph: &BinaryImage,
    conn: Connectivity,
) -> Result<FeatureVector, ImageError> {
    if !glyph.has_foreground() {
        return Err(ImageError::EmptyGlyph);
    }
    let (left, right) = split_vertical(glyph)?;
    let (top, bottom) = split_horizontal(glyph)?;
    Ok(FeatureVector {
        whole: euler(glyph, conn),
        left: euler(&left, conn),
        right: euler(&right, conn),
        top: euler(&top, conn),
        bottom: euler(&bottom, conn),
    })
}

/// Ink polarity of the source raster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Polarity {
    /// Dark strokes on a light page; the native convention.
    #[default]
    DarkInk,
    /// Light strokes on a dark page; inverted after thresholding.
    LightInk,
}

/// A decoded source image, either grayscale or already bilevel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Glyph {
    Gray(GrayImage),
    Binary(BinaryImage),
}

impl Glyph {
    pub fn width(&self) -> usize {
        match self {
            Glyph::Gray(g) => g.width(),
            Glyph::Binary(b) => b.width(),
        }
    }

    pub fn height(&self) -> usize {
        match self {
            Glyph::Gray(g) => g.height(),
            Glyph::Binary(b) => b.height(),
        }
    }
}

impl From<GrayImage> for Glyph {
    fn from(img: GrayImage) -> Self {
        Glyph::Gray(img)
    }
}

impl From<BinaryImage> for Glyph {
    fn from(img: BinaryImage) -> Self {
        Glyph::Binary(img)
    }
}

/// Thresholds (gray input), fixes polarity, removes specks and crops to the
/// glyph's bounding box.
pub fn preprocess(input: &Glyph, polarity: Polarity) -> Result<BinaryImage, ImageError> {
    let binary = match input {
        Glyph::Gray(g) => binarize(g),
        Glyph::Binary(b) => b.clone(),
    };
    let binary = match polarity {
        Polarity::DarkInk => binary,
        Polarity::LightInk => invert(&binary),
    };
    let opened = morphological_open(&binary);
    let bbox = bounding_box(&opened)?;
    crop(&opened, bbox)
}

pub fn process_glyph(
    input: &Glyph,
    conn: Connectivity,
    polarity: Polarity,
) -> Result<FeatureVector, ImageError> {
    extract_features(&preprocess(input, polarity)?, conn)
}
