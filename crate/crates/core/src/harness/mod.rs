//! Corpus ingestion, seeded splitting, evaluation reports and the synthetic
//! topological corpus.

pub mod bmp;
mod corpus;
mod eval;
pub mod netpbm;
mod split;
mod synth;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::features::Glyph;
use crate::imagecore::ImageError;
use crate::knn::{ClassLabel, KnnError};

pub use corpus::{load_corpus, parse_manifest, Corpus, CorpusEntry, ManifestLine};
pub use eval::{
    evaluate, extract_all, sweep_k, ClassRow, ConfusionMatrix, EvalParams, EvalReport, Extraction,
    Failure, Phase, SweepReport,
};
pub use split::{split, Split, SplitRng, SplitSpec};
pub use synth::{
    default_classes, generate_synthetic, render_glyph, ClassSpec, Shape, SynthConfig, SynthFormat,
};

/// Decoder failure, without file context.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct CodecError(pub String);

impl CodecError {
    pub fn new(message: impl Into<String>) -> Self {
        CodecError(message.into())
    }

    pub(crate) fn from_image(err: ImageError) -> Self {
        CodecError(err.to_string())
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}:{line}: {message}", path.display())]
    Manifest {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}: {message}", path.display())]
    ImageFormat { path: PathBuf, message: String },
    #[error("class {label} has {available} samples, split needs {required}")]
    InsufficientSamples {
        label: ClassLabel,
        available: usize,
        required: usize,
    },
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("{0} set is empty")]
    EmptySet(&'static str),
    #[error("shape {shape} does not fit a {width}x{height} canvas")]
    SpecUnrealizable {
        shape: String,
        width: usize,
        height: usize,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Knn(#[from] KnnError),
}

/// Decodes PBM/PGM (P1, P2, P4, P5) or BMP by signature.
pub fn decode_image(data: &[u8]) -> Result<Glyph, CodecError> {
    if netpbm::is_netpbm(data) {
        netpbm::decode(data)
    } else if bmp::is_bmp(data) {
        bmp::decode(data)
    } else {
        Err(CodecError::new("unrecognized image signature"))
    }
}

pub fn load_image(path: &Path) -> Result<Glyph, HarnessError> {
    let data = std::fs::read(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode_image(&data).map_err(|e| HarnessError::ImageFormat {
        path: path.to_path_buf(),
        message: e.0,
    })
}
