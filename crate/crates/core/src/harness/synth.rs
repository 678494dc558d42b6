//! Synthetic topological corpus standing in for rendered font glyphs.
//!
//! Every shape is a union of axis-aligned bars at least three pixels thick,
//! so 3x3 opening leaves it intact, and is symmetric about its zoning lines
//! so that size jitter never moves a cut across a stroke. Each shape thus
//! has one feature vector regardless of the sampled geometry.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::netpbm::{encode_pbm_plain, encode_pgm_plain};
use super::{Corpus, CorpusEntry, HarnessError, SplitRng};
use crate::features::{FeatureVector, Glyph};
use crate::imagecore::{BinaryImage, GrayImage};
use crate::knn::ClassLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    /// Filled rectangle.
    Block,
    /// Rectangle with one rectangular hole.
    Ring,
    /// Two blocks side by side.
    BlockPairH,
    /// Two blocks stacked.
    BlockPairV,
    /// Two rings side by side.
    RingPairH,
    /// Two rings stacked.
    RingPairV,
    /// Two holes stacked in one outline.
    EightV,
    /// Two holes side by side in one outline.
    EightH,
    /// Ring with its right wall removed.
    OpenRight,
    /// Ring with its top bar removed.
    OpenTop,
}

impl Shape {
    pub const ALL: [Shape; 10] = [
        Shape::Ring,
        Shape::Block,
        Shape::BlockPairH,
        Shape::BlockPairV,
        Shape::RingPairH,
        Shape::RingPairV,
        Shape::EightV,
        Shape::EightH,
        Shape::OpenRight,
        Shape::OpenTop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Shape::Block => "block",
            Shape::Ring => "ring",
            Shape::BlockPairH => "block-pair-h",
            Shape::BlockPairV => "block-pair-v",
            Shape::RingPairH => "ring-pair-h",
            Shape::RingPairV => "ring-pair-v",
            Shape::EightV => "eight-v",
            Shape::EightH => "eight-h",
            Shape::OpenRight => "open-right",
            Shape::OpenTop => "open-top",
        }
    }

    /// Feature vector (whole, left, right, top, bottom) of every rendering,
    /// identical under both connectivities.
    pub fn expected_features(self) -> FeatureVector {
        let v = match self {
            Shape::Block => [1, 1, 1, 1, 1],
            Shape::Ring => [0, 1, 1, 1, 1],
            Shape::BlockPairH => [2, 1, 1, 2, 2],
            Shape::BlockPairV => [2, 2, 2, 1, 1],
            Shape::RingPairH => [0, 0, 0, 2, 2],
            Shape::RingPairV => [0, 2, 2, 0, 0],
            Shape::EightV => [-1, 1, 1, 0, 0],
            Shape::EightH => [-1, 0, 0, 1, 1],
            Shape::OpenRight => [1, 1, 2, 1, 1],
            Shape::OpenTop => [1, 1, 1, 2, 1],
        };
        FeatureVector::from_array(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassSpec {
    pub label: ClassLabel,
    pub shape: Shape,
}

/// Ten classes labelled 0-9 with pairwise-distinct feature vectors; class 0
/// is the closed loop.
pub fn default_classes() -> Vec<ClassSpec> {
    Shape::ALL
        .iter()
        .enumerate()
        .map(|(i, &shape)| ClassSpec {
            label: ClassLabel(i as u32),
            shape,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthFormat {
    /// Plain PBM (P1).
    Pbm,
    /// Plain PGM (P2) with dark ink on a light, noisy page.
    Pgm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthConfig {
    pub canvas_width: usize,
    pub canvas_height: usize,
    pub count_per_class: usize,
    pub seed: u64,
    pub format: SynthFormat,
    /// Upper bound on isolated noise pixels per image.
    pub max_specks: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            canvas_width: 48,
            canvas_height: 48,
            count_per_class: 75,
            seed: 42,
            format: SynthFormat::Pbm,
            max_specks: 4,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Geometry {
    stroke: usize,
    hole_w: usize,
    hole_h: usize,
    block_w: usize,
    block_h: usize,
    gap: usize,
}

const MIN_GEOMETRY: Geometry = Geometry {
    stroke: 3,
    hole_w: 3,
    hole_h: 3,
    block_w: 5,
    block_h: 5,
    gap: 2,
};

impl Geometry {
    fn sample(rng: &mut SplitRng) -> Geometry {
        Geometry {
            stroke: rng.range_inclusive(3, 5),
            hole_w: rng.range_inclusive(3, 7),
            hole_h: rng.range_inclusive(3, 7),
            block_w: rng.range_inclusive(5, 12),
            block_h: rng.range_inclusive(5, 12),
            gap: rng.range_inclusive(2, 5),
        }
    }

    fn ring_size(&self) -> (usize, usize) {
        (2 * self.stroke + self.hole_w, 2 * self.stroke + self.hole_h)
    }

    fn size(&self, shape: Shape) -> (usize, usize) {
        let (rw, rh) = self.ring_size();
        let (t, g) = (self.stroke, self.gap);
        match shape {
            Shape::Block => (self.block_w, self.block_h),
            Shape::Ring | Shape::OpenRight | Shape::OpenTop => (rw, rh),
            Shape::BlockPairH => (2 * self.block_w + g, self.block_h),
            Shape::BlockPairV => (self.block_w, 2 * self.block_h + g),
            Shape::RingPairH => (2 * rw + g, rh),
            Shape::RingPairV => (rw, 2 * rh + g),
            Shape::EightV => (rw, 3 * t + 2 * self.hole_h),
            Shape::EightH => (3 * t + 2 * self.hole_w, rh),
        }
    }
}

fn fill(img: &mut BinaryImage, x0: usize, y0: usize, w: usize, h: usize, value: bool) {
    for y in y0..y0 + h {
        for x in x0..x0 + w {
            img.set(x, y, value);
        }
    }
}

fn draw_ring(img: &mut BinaryImage, x0: usize, y0: usize, g: &Geometry) {
    let (rw, rh) = g.ring_size();
    fill(img, x0, y0, rw, rh, true);
    fill(img, x0 + g.stroke, y0 + g.stroke, g.hole_w, g.hole_h, false);
}

fn draw(shape: Shape, g: &Geometry) -> BinaryImage {
    let (w, h) = g.size(shape);
    let mut img = BinaryImage::filled(w, h, false).expect("positive shape size");
    let (rw, rh) = g.ring_size();
    let t = g.stroke;
    match shape {
        Shape::Block => fill(&mut img, 0, 0, w, h, true),
        Shape::Ring => draw_ring(&mut img, 0, 0, g),
        Shape::BlockPairH => {
            fill(&mut img, 0, 0, g.block_w, h, true);
            fill(&mut img, g.block_w + g.gap, 0, g.block_w, h, true);
        }
        Shape::BlockPairV => {
            fill(&mut img, 0, 0, w, g.block_h, true);
            fill(&mut img, 0, g.block_h + g.gap, w, g.block_h, true);
        }
        Shape::RingPairH => {
            draw_ring(&mut img, 0, 0, g);
            draw_ring(&mut img, rw + g.gap, 0, g);
        }
        Shape::RingPairV => {
            draw_ring(&mut img, 0, 0, g);
            draw_ring(&mut img, 0, rh + g.gap, g);
        }
        Shape::EightV => {
            fill(&mut img, 0, 0, w, h, true);
            fill(&mut img, t, t, g.hole_w, g.hole_h, false);
            fill(&mut img, t, 2 * t + g.hole_h, g.hole_w, g.hole_h, false);
        }
        Shape::EightH => {
            fill(&mut img, 0, 0, w, h, true);
            fill(&mut img, t, t, g.hole_w, g.hole_h, false);
            fill(&mut img, 2 * t + g.hole_w, t, g.hole_w, g.hole_h, false);
        }
        Shape::OpenRight => {
            draw_ring(&mut img, 0, 0, g);
            fill(&mut img, t + g.hole_w, t, t, g.hole_h, false);
        }
        Shape::OpenTop => {
            draw_ring(&mut img, 0, 0, g);
            fill(&mut img, t, 0, g.hole_w, t, false);
        }
    }
    img
}

fn fits(size: (usize, usize), cfg: &SynthConfig) -> bool {
    // one pixel of margin on every side
    size.0 + 2 <= cfg.canvas_width && size.1 + 2 <= cfg.canvas_height
}

/// Renders one jittered instance of `shape` on a background canvas, with
/// up to `max_specks` isolated noise pixels kept two pixels clear of the
/// glyph and of each other.
pub fn render_glyph(
    shape: Shape,
    cfg: &SynthConfig,
    rng: &mut SplitRng,
) -> Result<BinaryImage, HarnessError> {
    if !fits(MIN_GEOMETRY.size(shape), cfg) {
        return Err(HarnessError::SpecUnrealizable {
            shape: shape.name().to_string(),
            width: cfg.canvas_width,
            height: cfg.canvas_height,
        });
    }
    let geometry = (0..64)
        .map(|_| Geometry::sample(rng))
        .find(|g| fits(g.size(shape), cfg))
        .unwrap_or(MIN_GEOMETRY);
    let glyph = draw(shape, &geometry);
    let (gw, gh) = (glyph.width(), glyph.height());
    let x0 = rng.range_inclusive(1, cfg.canvas_width - gw - 1);
    let y0 = rng.range_inclusive(1, cfg.canvas_height - gh - 1);

    let mut canvas = BinaryImage::filled(cfg.canvas_width, cfg.canvas_height, false)
        .expect("canvas fits a glyph");
    for y in 0..gh {
        for x in 0..gw {
            if glyph.get(x, y) {
                canvas.set(x0 + x, y0 + y, true);
            }
        }
    }

    let specks = rng.range_inclusive(0, cfg.max_specks);
    let mut placed: Vec<(usize, usize)> = Vec::new();
    for _ in 0..specks * 8 {
        if placed.len() == specks {
            break;
        }
        let x = rng.below(cfg.canvas_width);
        let y = rng.below(cfg.canvas_height);
        let near_glyph = x + 2 >= x0 && x < x0 + gw + 2 && y + 2 >= y0 && y < y0 + gh + 2;
        let near_speck = placed
            .iter()
            .any(|&(px, py)| px.abs_diff(x) < 2 && py.abs_diff(y) < 2);
        if !near_glyph && !near_speck {
            placed.push((x, y));
            canvas.set(x, y, true);
        }
    }
    Ok(canvas)
}

fn to_gray(img: &BinaryImage, rng: &mut SplitRng) -> GrayImage {
    let px = img
        .bits()
        .iter()
        .map(|&ink| {
            let noise = rng.below(64) as u8;
            if ink {
                noise
            } else {
                192 + noise
            }
        })
        .collect();
    GrayImage::new(img.width(), img.height(), px).expect("same dimensions")
}

/// Renders `count_per_class` images per class into `out_dir` together with
/// `manifest.txt`, and returns the corpus as loaded from that manifest.
/// Output bytes depend only on `classes` and `cfg`.
pub fn generate_synthetic(
    classes: &[ClassSpec],
    cfg: &SynthConfig,
    out_dir: &Path,
) -> Result<Corpus, HarnessError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| HarnessError::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;

    let mut rng = SplitRng::new(cfg.seed);
    let mut manifest = String::new();
    let _ = writeln!(
        manifest,
        "# synthetic corpus: seed={} count={} canvas={}x{}",
        cfg.seed, cfg.count_per_class, cfg.canvas_width, cfg.canvas_height
    );
    let ext = match cfg.format {
        SynthFormat::Pbm => "pbm",
        SynthFormat::Pgm => "pgm",
    };
    let mut entries = Vec::new();
    for class in classes {
        for i in 0..cfg.count_per_class {
            let bin = render_glyph(class.shape, cfg, &mut rng)?;
            let (bytes, image) = match cfg.format {
                SynthFormat::Pbm => (encode_pbm_plain(&bin), Glyph::Binary(bin)),
                SynthFormat::Pgm => {
                    let gray = to_gray(&bin, &mut rng);
                    (encode_pgm_plain(&gray), Glyph::Gray(gray))
                }
            };
            let name = format!("c{}_{:04}.{ext}", class.label, i);
            let path = out_dir.join(&name);
            fs::write(&path, bytes).map_err(io_err(&path))?;
            let _ = writeln!(manifest, "{} {} {}", class.label, name, class.shape.name());
            entries.push(CorpusEntry {
                label: class.label,
                path: name.into(),
                style: class.shape.name().to_string(),
                image,
            });
        }
    }
    let manifest_path = out_dir.join("manifest.txt");
    fs::write(&manifest_path, manifest).map_err(io_err(&manifest_path))?;
    Ok(Corpus {
        entries,
        manifest: manifest_path,
    })
}
