use std::path::{Path, PathBuf};

use super::{load_image, HarnessError};
use crate::features::Glyph;
use crate::knn::ClassLabel;

/// One manifest record: `<label> <relative image path> <style tag>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestLine {
    pub line: usize,
    pub label: ClassLabel,
    pub path: PathBuf,
    pub style: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub label: ClassLabel,
    /// Path as written in the manifest.
    pub path: PathBuf,
    pub style: String,
    pub image: Glyph,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
    pub manifest: PathBuf,
}

impl Corpus {
    /// Distinct labels, ascending.
    pub fn labels(&self) -> Vec<ClassLabel> {
        let mut labels: Vec<ClassLabel> = self.entries.iter().map(|e| e.label).collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Parses manifest text. `#` starts a comment line; blank lines are skipped.
/// The style tag is the remainder of the line after the path.
pub fn parse_manifest(text: &str, manifest: &Path) -> Result<Vec<ManifestLine>, HarnessError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |message: String| HarnessError::Manifest {
            path: manifest.to_path_buf(),
            line,
            message,
        };
        let mut parts = trimmed.splitn(3, char::is_whitespace);
        let (Some(label), Some(path), Some(style)) = (parts.next(), parts.next(), parts.next())
        else {
            return Err(err(format!(
                "expected `<label> <path> <style>`, found {trimmed:?}"
            )));
        };
        let style = style.trim();
        if style.is_empty() {
            return Err(err("missing style tag".into()));
        }
        let label: ClassLabel = label
            .parse()
            .map_err(|_| err(format!("bad label {label:?}")))?;
        out.push(ManifestLine {
            line,
            label,
            path: PathBuf::from(path),
            style: style.to_string(),
        });
    }
    Ok(out)
}

/// Reads a manifest and decodes every image it references, relative to the
/// manifest's directory.
pub fn load_corpus(manifest: &Path) -> Result<Corpus, HarnessError> {
    let text = std::fs::read_to_string(manifest).map_err(|source| HarnessError::Io {
        path: manifest.to_path_buf(),
        source,
    })?;
    let base = manifest.parent().unwrap_or_else(|| Path::new(""));
    let mut entries = Vec::new();
    for rec in parse_manifest(&text, manifest)? {
        let full = base.join(&rec.path);
        if !full.is_file() {
            return Err(HarnessError::Manifest {
                path: manifest.to_path_buf(),
                line: rec.line,
                message: format!("missing image file {}", full.display()),
            });
        }
        entries.push(CorpusEntry {
            label: rec.label,
            path: rec.path,
            style: rec.style,
            image: load_image(&full)?,
        });
    }
    Ok(Corpus {
        entries,
        manifest: manifest.to_path_buf(),
    })
}
