//! Connected components, holes and the Euler number of a binary image.
//!
//! Two independent routes compute the Euler number: [`euler_cc`] counts
//! labelled objects and enclosed background regions, [`euler_bitquad`]
//! counts 2x2 window patterns in a single pass. They agree on every input
//! under the same [`Connectivity`]; the component route is the reference.

mod union_find;

pub use union_find::UnionFind;

use std::fmt;
use std::str::FromStr;

use crate::imagecore::{invert, BinaryImage};

/// Foreground adjacency rule. Background (holes) always uses the
/// complementary rule so that the digital topology is well formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    pub fn complement(self) -> Connectivity {
        match self {
            Connectivity::Four => Connectivity::Eight,
            Connectivity::Eight => Connectivity::Four,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Connectivity::Four => "four",
            Connectivity::Eight => "eight",
        }
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownConnectivity(pub String);

impl fmt::Display for UnknownConnectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown connectivity {:?} (expected four or eight)",
            self.0
        )
    }
}

impl std::error::Error for UnknownConnectivity {}

impl FromStr for Connectivity {
    type Err = UnknownConnectivity;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "four" | "4" => Ok(Connectivity::Four),
            "eight" | "8" => Ok(Connectivity::Eight),
            other => Err(UnknownConnectivity(other.to_string())),
        }
    }
}

/// Dense component labelling: 0 is background, components are `1..=count`
/// numbered in raster order of their first pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    count: u32,
}

impl LabelMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn count(&self) -> u32 {
        self.count
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }
}

/// Two-pass labelling of foreground pixels with a union-find over
/// provisional labels.
pub fn label_components(img: &BinaryImage, conn: Connectivity) -> LabelMap {
    let (w, h) = (img.width(), img.height());
    const NONE: u32 = u32::MAX;
    let mut provisional = vec![NONE; w * h];
    let mut sets = UnionFind::new(0);

    for y in 0..h {
        for x in 0..w {
            if !img.get(x, y) {
                continue;
            }
            let mut current = NONE;
            let visit = |nx: usize, ny: usize, current: &mut u32, sets: &mut UnionFind| {
                let label = provisional[ny * w + nx];
                if label == NONE {
                    return;
                }
                if *current == NONE {
                    *current = label;
                } else if *current != label {
                    sets.union(*current as usize, label as usize);
                }
            };
            if x > 0 {
                visit(x - 1, y, &mut current, &mut sets);
            }
            if y > 0 {
                visit(x, y - 1, &mut current, &mut sets);
                if conn == Connectivity::Eight {
                    if x > 0 {
                        visit(x - 1, y - 1, &mut current, &mut sets);
                    }
                    if x + 1 < w {
                        visit(x + 1, y - 1, &mut current, &mut sets);
                    }
                }
            }
            if current == NONE {
                current = sets.make_set() as u32;
            }
            provisional[y * w + x] = current;
        }
    }

    let mut dense = vec![0u32; sets.len()];
    let mut count = 0u32;
    let labels = provisional
        .iter()
        .map(|&p| {
            if p == NONE {
                return 0;
            }
            let root = sets.find(p as usize);
            if dense[root] == 0 {
                count += 1;
                dense[root] = count;
            }
            dense[root]
        })
        .collect();

    LabelMap {
        width: w,
        height: h,
        labels,
        count,
    }
}

/// Background regions not connected to the infinite exterior, using the
/// connectivity complementary to `conn`.
pub fn count_holes(img: &BinaryImage, conn: Connectivity) -> u32 {
    let background = invert(&img.pad(1));
    // the padding ring guarantees at least the exterior component
    label_components(&background, conn.complement()).count() - 1
}

/// Objects minus holes, by explicit labelling.
pub fn euler_cc(img: &BinaryImage, conn: Connectivity) -> i64 {
    i64::from(label_components(img, conn).count()) - i64::from(count_holes(img, conn))
}

/// Counts of the 2x2 window pattern families over the background-padded
/// image.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QuadCounts {
    /// windows with exactly one foreground pixel
    pub q1: i64,
    /// windows with exactly three foreground pixels
    pub q3: i64,
    /// windows with foreground on exactly one diagonal
    pub qd: i64,
}

pub fn quad_counts(img: &BinaryImage) -> QuadCounts {
    let (w, h) = (img.width() as isize, img.height() as isize);
    let mut counts = QuadCounts::default();
    for y in -1..h {
        for x in -1..w {
            let a = img.get_or_background(x, y);
            let b = img.get_or_background(x + 1, y);
            let c = img.get_or_background(x, y + 1);
            let d = img.get_or_background(x + 1, y + 1);
            match a as u8 + b as u8 + c as u8 + d as u8 {
                1 => counts.q1 += 1,
                3 => counts.q3 += 1,
                2 if a == d => counts.qd += 1,
                _ => {}
            }
        }
    }
    counts
}

/// Single-pass Euler number from bit-quad counts:
/// `(Q1 - Q3 + 2 QD) / 4` for four-connectivity and
/// `(Q1 - Q3 - 2 QD) / 4` for eight-connectivity.
pub fn euler_bitquad(img: &BinaryImage, conn: Connectivity) -> i64 {
    let QuadCounts { q1, q3, qd } = quad_counts(img);
    let numerator = match conn {
        Connectivity::Four => q1 - q3 + 2 * qd,
        Connectivity::Eight => q1 - q3 - 2 * qd,
    };
    assert_eq!(
        numerator % 4,
        0,
        "bit-quad numerator {numerator} not divisible by 4"
    );
    numerator / 4
}
