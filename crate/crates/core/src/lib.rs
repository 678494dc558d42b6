//! Printed numeral recognition from zoned Euler-number features.
//!
//! A glyph is thresholded, cleaned by a 3x3 opening and cropped to its
//! bounding box. The Euler number (objects minus holes) of the whole glyph
//! and of its left/right and top/bottom halves forms a five-component
//! integer feature vector, classified with a k-nearest-neighbor prototype
//! classifier.
//!
//! ```
//! use eulerglyph::imagecore::BinaryImage;
//! use eulerglyph::features::extract_features;
//! use eulerglyph::topology::Connectivity;
//!
//! let ring = BinaryImage::from_pattern("####\n#..#\n#..#\n####").unwrap();
//! let v = extract_features(&ring, Connectivity::Eight).unwrap();
//! assert_eq!(v.to_string(), "0 1 1 1 1");
//! ```

pub mod cli;
pub mod features;
pub mod harness;
pub mod imagecore;
pub mod knn;
pub mod topology;

pub use features::{extract_features, process_glyph, FeatureVector, Glyph, Polarity};
pub use imagecore::{BinaryImage, GrayImage, ImageError};
pub use knn::{ClassLabel, Model};
pub use topology::Connectivity;
