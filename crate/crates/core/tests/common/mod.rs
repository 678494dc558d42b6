//! Independent oracles shared by the integration suites.

#![allow(dead_code)]

use std::collections::VecDeque;
use std::path::PathBuf;

use eulerglyph::features::FeatureVector;
use eulerglyph::harness::SplitRng;
use eulerglyph::imagecore::BinaryImage;
use eulerglyph::knn::ClassLabel;
use eulerglyph::topology::Connectivity;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn offsets(conn: Connectivity) -> &'static [(isize, isize)] {
    match conn {
        Connectivity::Four => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
        Connectivity::Eight => &[
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
        ],
    }
}

/// Breadth-first flood fill over cells where `cell(x, y) == value`, on a
/// grid of `w` x `h`. Returns, per region, whether it touches the grid edge.
fn flood_regions(
    w: usize,
    h: usize,
    cell: impl Fn(usize, usize) -> bool,
    value: bool,
    conn: Connectivity,
) -> Vec<bool> {
    let mut seen = vec![false; w * h];
    let mut regions = Vec::new();
    for sy in 0..h {
        for sx in 0..w {
            if seen[sy * w + sx] || cell(sx, sy) != value {
                continue;
            }
            let mut touches = false;
            let mut queue = VecDeque::from([(sx, sy)]);
            seen[sy * w + sx] = true;
            while let Some((x, y)) = queue.pop_front() {
                if x == 0 || y == 0 || x == w - 1 || y == h - 1 {
                    touches = true;
                }
                for &(dx, dy) in offsets(conn) {
                    let (nx, ny) = (x as isize + dx, y as isize + dy);
                    if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                        continue;
                    }
                    let (nx, ny) = (nx as usize, ny as usize);
                    if !seen[ny * w + nx] && cell(nx, ny) == value {
                        seen[ny * w + nx] = true;
                        queue.push_back((nx, ny));
                    }
                }
            }
            regions.push(touches);
        }
    }
    regions
}

pub fn flood_components(img: &BinaryImage, conn: Connectivity) -> usize {
    flood_regions(img.width(), img.height(), |x, y| img.get(x, y), true, conn).len()
}

/// Background regions (complementary connectivity) of the image framed by
/// one background ring that do not reach the frame.
pub fn flood_holes(img: &BinaryImage, conn: Connectivity) -> usize {
    let (w, h) = (img.width() + 2, img.height() + 2);
    let cell = |x: usize, y: usize| {
        x >= 1 && y >= 1 && x <= img.width() && y <= img.height() && img.get(x - 1, y - 1)
    };
    let bg = match conn {
        Connectivity::Four => Connectivity::Eight,
        Connectivity::Eight => Connectivity::Four,
    };
    flood_regions(w, h, cell, false, bg)
        .into_iter()
        .filter(|&touches| !touches)
        .count()
}

pub fn flood_euler(img: &BinaryImage, conn: Connectivity) -> i64 {
    flood_components(img, conn) as i64 - flood_holes(img, conn) as i64
}

pub fn random_image(rng: &mut SplitRng, w: usize, h: usize) -> BinaryImage {
    // density varies per image so sparse and dense topologies both occur
    let density = rng.range_inclusive(10, 90);
    let bits = (0..w * h).map(|_| rng.below(100) < density).collect();
    BinaryImage::new(w, h, bits).unwrap()
}

pub fn random_vector(rng: &mut SplitRng, spread: usize) -> FeatureVector {
    let mut v = [0i32; 5];
    for c in &mut v {
        *c = rng.below(2 * spread + 1) as i32 - spread as i32;
    }
    FeatureVector::from_array(v)
}

fn sq_dist(a: &FeatureVector, b: &FeatureVector) -> u64 {
    let (a, b) = (a.to_array(), b.to_array());
    (0..5).map(|i| ((a[i] - b[i]) as i64).pow(2) as u64).sum()
}

/// Exhaustive k-NN reference: tries every k-subset of prototypes and keeps
/// the one whose members all precede every non-member under
/// (distance, ordinal); then scans label pairs for the vote winner.
pub fn knn_oracle(
    samples: &[(ClassLabel, FeatureVector)],
    query: &FeatureVector,
    k: usize,
) -> ClassLabel {
    let n = samples.len();
    let key = |i: usize| (sq_dist(&samples[i].1, query), i);
    let mut chosen: Option<Vec<usize>> = None;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let inside: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let outside: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
        if inside
            .iter()
            .all(|&i| outside.iter().all(|&o| key(i) < key(o)))
        {
            assert!(chosen.is_none(), "neighbor set must be unique");
            chosen = Some(inside);
        }
    }
    let chosen = chosen.expect("some k-subset precedes the rest");
    let labels: Vec<ClassLabel> = chosen.iter().map(|&i| samples[i].0).collect();
    let stats = |l: ClassLabel| {
        let votes = labels.iter().filter(|&&x| x == l).count();
        let dist: u64 = chosen
            .iter()
            .filter(|&&i| samples[i].0 == l)
            .map(|&i| key(i).0)
            .sum();
        (votes, dist)
    };
    let mut winner = labels[0];
    for &cand in &labels {
        let (cv, cd) = stats(cand);
        let (wv, wd) = stats(winner);
        if cv > wv || (cv == wv && (cd < wd || (cd == wd && cand < winner))) {
            winner = cand;
        }
    }
    winner
}

/// All permutations of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        heap(k - 1, a, out);
        for i in 0..k - 1 {
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            heap(k - 1, a, out);
        }
    }
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    heap(n, &mut a, &mut out);
    out
}

pub fn fixture_ring(outer_w: usize, outer_h: usize, stroke: usize) -> BinaryImage {
    let mut img = BinaryImage::filled(outer_w, outer_h, true).unwrap();
    for y in stroke..outer_h - stroke {
        for x in stroke..outer_w - stroke {
            img.set(x, y, false);
        }
    }
    img
}
