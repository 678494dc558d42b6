//! Prototype k-nearest-neighbor classifier over Euler feature vectors.
//!
//! Training stores every labelled vector verbatim. Classification ranks the
//! stored prototypes by exact integer squared Euclidean distance (ties by
//! insertion ordinal), then takes a majority vote among the first `k`.
//! Vote ties go to the label whose voters have the smaller summed distance,
//! then to the smaller label value.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::features::FeatureVector;
use crate::topology::Connectivity;

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MODEL_MAGIC: &str = "eulerglyph-model";

#[derive(Debug, Error)]
pub enum KnnError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("k = {k} exceeds model size {size}")]
    KTooLarge { k: usize, size: usize },
    #[error("k = {0} is not an odd positive integer")]
    EvenK(usize),
    #[error("model was trained with {model} connectivity, {requested} requested")]
    ConnectivityMismatch {
        model: Connectivity,
        requested: Connectivity,
    },
    #[error("model format error at line {line}: {message}")]
    FormatError { line: usize, message: String },
    #[error("unsupported model format version {found} (expected {MODEL_FORMAT_VERSION})")]
    VersionMismatch { found: u32 },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Class identifier. Values 0-9 are the decimal numerals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassLabel(pub u32);

const KANNADA_DIGITS: [char; 10] = ['೦', '೧', '೨', '೩', '೪', '೫', '೬', '೭', '೮', '೯'];

impl ClassLabel {
    pub fn value(self) -> u32 {
        self.0
    }

    /// Display name: the Kannada numeral for 0-9, the decimal value otherwise.
    pub fn name(self) -> String {
        match KANNADA_DIGITS.get(self.0 as usize) {
            Some(c) => c.to_string(),
            None => self.0.to_string(),
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::str::FromStr for ClassLabel {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(ClassLabel)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSample {
    pub label: ClassLabel,
    pub features: FeatureVector,
    pub ordinal: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    samples: Vec<LabeledSample>,
    connectivity: Connectivity,
    labels: Vec<ClassLabel>,
    version: u32,
}

impl Model {
    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn connectivity(&self) -> Connectivity {
        self.connectivity
    }

    /// Declared label set, ascending.
    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    pub fn version(&self) -> u32 {
        self.version
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn ensure_connectivity(&self, requested: Connectivity) -> Result<(), KnnError> {
        if requested != self.connectivity {
            return Err(KnnError::ConnectivityMismatch {
                model: self.connectivity,
                requested,
            });
        }
        Ok(())
    }
}

/// Stores the samples in order with ordinals `0..n`. The label set is the
/// distinct labels present.
pub fn train<I>(samples: I, conn: Connectivity) -> Result<Model, KnnError>
where
    I: IntoIterator<Item = (ClassLabel, FeatureVector)>,
{
    let samples: Vec<LabeledSample> = samples
        .into_iter()
        .enumerate()
        .map(|(ordinal, (label, features))| LabeledSample {
            label,
            features,
            ordinal,
        })
        .collect();
    if samples.is_empty() {
        return Err(KnnError::EmptyTrainingSet);
    }
    let mut labels: Vec<ClassLabel> = samples.iter().map(|s| s.label).collect();
    labels.sort_unstable();
    labels.dedup();
    Ok(Model {
        samples,
        connectivity: conn,
        labels,
        version: MODEL_FORMAT_VERSION,
    })
}

pub fn squared_distance(a: &FeatureVector, b: &FeatureVector) -> u64 {
    a.to_array()
        .iter()
        .zip(b.to_array())
        .map(|(&x, y)| {
            let d = i64::from(x) - i64::from(y);
            (d * d) as u64
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    pub ordinal: usize,
    pub label: ClassLabel,
    pub distance: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub label: ClassLabel,
    /// The `k` chosen prototypes, nearest first.
    pub neighbors: Vec<Neighbor>,
}

pub fn validate_k(k: usize, model_size: usize) -> Result<(), KnnError> {
    if k.is_multiple_of(2) {
        return Err(KnnError::EvenK(k));
    }
    if k > model_size {
        return Err(KnnError::KTooLarge {
            k,
            size: model_size,
        });
    }
    Ok(())
}

pub fn classify(
    model: &Model,
    query: &FeatureVector,
    k: usize,
) -> Result<Classification, KnnError> {
    validate_k(k, model.len())?;

    let mut ranked: Vec<Neighbor> = model
        .samples
        .iter()
        .map(|s| Neighbor {
            ordinal: s.ordinal,
            label: s.label,
            distance: squared_distance(&s.features, query),
        })
        .collect();
    ranked.sort_unstable_by_key(|n| (n.distance, n.ordinal));
    ranked.truncate(k);

    let label = majority_vote(&ranked);
    Ok(Classification {
        label,
        neighbors: ranked,
    })
}

/// Most votes, then smaller summed squared distance, then smaller label.
fn majority_vote(neighbors: &[Neighbor]) -> ClassLabel {
    let mut tally: BTreeMap<ClassLabel, (usize, u64)> = BTreeMap::new();
    for n in neighbors {
        let entry = tally.entry(n.label).or_default();
        entry.0 += 1;
        entry.1 += n.distance;
    }
    tally
        .into_iter()
        .min_by(|(la, (va, da)), (lb, (vb, db))| vb.cmp(va).then(da.cmp(db)).then(la.cmp(lb)))
        .map(|(label, _)| label)
        .expect("k >= 1 neighbors")
}

/// Writes the line-oriented text model format.
pub fn save_model<W: Write>(model: &Model, mut out: W) -> io::Result<()> {
    writeln!(out, "{MODEL_MAGIC} v{}", model.version)?;
    writeln!(out, "connectivity {}", model.connectivity)?;
    let labels: Vec<String> = model.labels.iter().map(ToString::to_string).collect();
    writeln!(out, "labels {}", labels.join(","))?;
    for s in &model.samples {
        writeln!(out, "{} {}", s.label, s.features)?;
    }
    out.flush()
}

fn format_error(line: usize, message: impl Into<String>) -> KnnError {
    KnnError::FormatError {
        line,
        message: message.into(),
    }
}

pub fn load_model<R: BufRead>(mut input: R) -> Result<Model, KnnError> {
    let mut lines = Vec::new();
    let mut buf = String::new();
    loop {
        buf.clear();
        if input.read_line(&mut buf)? == 0 {
            break;
        }
        let number = lines.len() + 1;
        let Some(line) = buf.strip_suffix('\n') else {
            return Err(format_error(
                number,
                "line is not newline-terminated (truncated file?)",
            ));
        };
        if !line.is_ascii() {
            return Err(format_error(number, "non-ASCII content"));
        }
        lines.push(line.to_string());
    }

    let header = lines
        .first()
        .ok_or_else(|| format_error(1, "missing header"))?;
    let version = header
        .strip_prefix(MODEL_MAGIC)
        .and_then(|rest| rest.strip_prefix(" v"))
        .and_then(|v| v.parse::<u32>().ok())
        .ok_or_else(|| {
            format_error(
                1,
                format!("expected `{MODEL_MAGIC} v<N>`, found {header:?}"),
            )
        })?;
    if version != MODEL_FORMAT_VERSION {
        return Err(KnnError::VersionMismatch { found: version });
    }

    let conn_line = lines
        .get(1)
        .ok_or_else(|| format_error(2, "missing connectivity line"))?;
    let connectivity = conn_line
        .strip_prefix("connectivity ")
        .and_then(|c| c.parse::<Connectivity>().ok())
        .ok_or_else(|| {
            format_error(
                2,
                format!("expected `connectivity <four|eight>`, found {conn_line:?}"),
            )
        })?;

    let labels_line = lines
        .get(2)
        .ok_or_else(|| format_error(3, "missing labels line"))?;
    let labels = labels_line
        .strip_prefix("labels ")
        .and_then(|l| {
            l.split(',')
                .map(|v| v.parse::<ClassLabel>().ok())
                .collect::<Option<Vec<_>>>()
        })
        .ok_or_else(|| {
            format_error(
                3,
                format!("expected `labels <v,v,...>`, found {labels_line:?}"),
            )
        })?;
    if labels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format_error(3, "label set must be strictly ascending"));
    }

    let mut samples = Vec::with_capacity(lines.len().saturating_sub(3));
    for (idx, line) in lines.iter().enumerate().skip(3) {
        let number = idx + 1;
        let fields: Vec<&str> = line.split(' ').collect();
        if fields.len() != 1 + FeatureVector::ARITY {
            return Err(format_error(
                number,
                format!(
                    "expected label and {} features, found {line:?}",
                    FeatureVector::ARITY
                ),
            ));
        }
        let label: ClassLabel = fields[0]
            .parse()
            .map_err(|_| format_error(number, format!("bad label {:?}", fields[0])))?;
        if labels.binary_search(&label).is_err() {
            return Err(format_error(
                number,
                format!("label {label} not in declared label set"),
            ));
        }
        let mut values = [0i32; 5];
        for (slot, field) in values.iter_mut().zip(&fields[1..]) {
            *slot = field
                .parse()
                .map_err(|_| format_error(number, format!("bad feature value {field:?}")))?;
        }
        samples.push(LabeledSample {
            label,
            features: FeatureVector::from_array(values),
            ordinal: samples.len(),
        });
    }
    if samples.is_empty() {
        return Err(format_error(lines.len() + 1, "model has no samples"));
    }

    Ok(Model {
        samples,
        connectivity,
        labels,
        version,
    })
}
