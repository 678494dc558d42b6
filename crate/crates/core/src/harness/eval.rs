use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;

use super::{CorpusEntry, HarnessError};
use crate::features::{process_glyph, FeatureVector, Polarity};
use crate::imagecore::ImageError;
use crate::knn::{classify, train, validate_k, ClassLabel};
use crate::topology::Connectivity;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalParams {
    pub k: usize,
    pub connectivity: Connectivity,
    pub polarity: Polarity,
    /// Recorded in the report; the split itself is made by the caller.
    pub seed: u64,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams {
            k: 1,
            connectivity: Connectivity::Eight,
            polarity: Polarity::DarkInk,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub label: ClassLabel,
    pub path: PathBuf,
    pub features: Result<FeatureVector, ImageError>,
}

/// Runs the glyph pipeline over every entry in parallel; output order
/// matches input order.
pub fn extract_all(
    entries: &[&CorpusEntry],
    conn: Connectivity,
    polarity: Polarity,
) -> Vec<Extraction> {
    entries
        .par_iter()
        .map(|e| Extraction {
            label: e.label,
            path: e.path.clone(),
            features: process_glyph(&e.image, conn, polarity),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Train,
    Test,
}

/// A sample whose features could not be extracted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub phase: Phase,
    pub label: ClassLabel,
    pub path: PathBuf,
    pub error: ImageError,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRow {
    pub label: ClassLabel,
    pub train: usize,
    pub test: usize,
    pub correct: usize,
}

impl ClassRow {
    pub fn accuracy(&self) -> Option<f64> {
        (self.test > 0).then(|| 100.0 * self.correct as f64 / self.test as f64)
    }
}

/// Rows are true classes, columns predicted classes in `labels` order plus
/// a trailing column for failed extractions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub labels: Vec<ClassLabel>,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    fn new(labels: Vec<ClassLabel>) -> Self {
        let n = labels.len();
        ConfusionMatrix {
            labels,
            counts: vec![vec![0; n + 1]; n],
        }
    }

    fn index(&self, label: ClassLabel) -> usize {
        self.labels.binary_search(&label).expect("label in matrix")
    }

    pub fn failed_column(&self) -> usize {
        self.labels.len()
    }

    pub fn row_sum(&self, row: usize) -> usize {
        self.counts[row].iter().sum()
    }

    pub fn diagonal_sum(&self) -> usize {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalReport {
    pub rows: Vec<ClassRow>,
    pub confusion: ConfusionMatrix,
    pub failures: Vec<Failure>,
    pub k: usize,
    pub seed: u64,
    pub connectivity: Connectivity,
}

fn percent(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |p| format!("{p:.2}"))
}

impl EvalReport {
    pub fn total_test(&self) -> usize {
        self.rows.iter().map(|r| r.test).sum()
    }

    pub fn total_train(&self) -> usize {
        self.rows.iter().map(|r| r.train).sum()
    }

    pub fn total_correct(&self) -> usize {
        self.rows.iter().map(|r| r.correct).sum()
    }

    pub fn overall_accuracy(&self) -> f64 {
        100.0 * self.total_correct() as f64 / self.total_test() as f64
    }

    /// Per-numeral table (train images, test images, % of recognition) with
    /// the average row, followed by failures and the confusion matrix.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Recognition results (k={}, connectivity={}, seed={})",
            self.k, self.connectivity, self.seed
        );
        let _ = writeln!(
            out,
            "{:<22}{:>14}{:>13}{:>18}",
            "numerals", "Train images", "Test images", "% of recognition"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<22}{:>14}{:>13}{:>18}",
                r.label.to_string(),
                r.train,
                r.test,
                percent(r.accuracy())
            );
        }
        let _ = writeln!(
            out,
            "{:<22}{:>14}{:>13}{:>18}",
            "Average recognition",
            self.total_train(),
            self.total_test(),
            percent(Some(self.overall_accuracy()))
        );

        let _ = writeln!(out);
        let _ = writeln!(out, "Extraction failures: {}", self.failures.len());
        for f in &self.failures {
            let phase = match f.phase {
                Phase::Train => "train",
                Phase::Test => "test",
            };
            let _ = writeln!(
                out,
                "  {phase} {} {}: {}",
                f.label,
                f.path.display(),
                f.error
            );
        }

        let _ = writeln!(out);
        let _ = writeln!(out, "Confusion matrix (rows true, columns predicted)");
        let _ = write!(out, "{:>6}", "");
        for l in &self.confusion.labels {
            let _ = write!(out, "{:>6}", l.to_string());
        }
        let _ = writeln!(out, "{:>6}", "fail");
        for (label, row) in self.confusion.labels.iter().zip(&self.confusion.counts) {
            let _ = write!(out, "{:>6}", label.to_string());
            for c in row {
                let _ = write!(out, "{c:>6}");
            }
            let _ = writeln!(out);
        }
        out
    }

    /// One comma-separated record per table row, header first.
    pub fn render_csv(&self) -> String {
        let mut out =
            String::from("numeral,train_images,test_images,correct,recognition_percent\n");
        for r in &self.rows {
            let acc = r.accuracy().map_or_else(String::new, |p| format!("{p:.2}"));
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.label, r.train, r.test, r.correct, acc
            );
        }
        let _ = writeln!(
            out,
            "average,{},{},{},{:.2}",
            self.total_train(),
            self.total_test(),
            self.total_correct(),
            self.overall_accuracy()
        );
        out
    }
}

fn record_failures(extractions: &[Extraction], phase: Phase, out: &mut Vec<Failure>) {
    out.extend(extractions.iter().filter_map(|x| match &x.features {
        Ok(_) => None,
        Err(e) => Some(Failure {
            phase,
            label: x.label,
            path: x.path.clone(),
            error: e.clone(),
        }),
    }));
}

fn evaluate_extracted(
    train_set: &[Extraction],
    test_set: &[Extraction],
    params: &EvalParams,
) -> Result<EvalReport, HarnessError> {
    if train_set.is_empty() {
        return Err(HarnessError::EmptySet("train"));
    }
    if test_set.is_empty() {
        return Err(HarnessError::EmptySet("test"));
    }
    let model = train(
        train_set
            .iter()
            .filter_map(|x| x.features.as_ref().ok().map(|f| (x.label, *f))),
        params.connectivity,
    )?;
    validate_k(params.k, model.len())?;

    let mut labels: Vec<ClassLabel> = train_set.iter().chain(test_set).map(|x| x.label).collect();
    labels.sort_unstable();
    labels.dedup();

    let mut rows: Vec<ClassRow> = labels
        .iter()
        .map(|&label| ClassRow {
            label,
            train: train_set.iter().filter(|x| x.label == label).count(),
            test: test_set.iter().filter(|x| x.label == label).count(),
            correct: 0,
        })
        .collect();
    let mut confusion = ConfusionMatrix::new(labels);

    for x in test_set {
        let row = confusion.index(x.label);
        match &x.features {
            Ok(f) => {
                let predicted = classify(&model, f, params.k)?.label;
                let col = confusion.index(predicted);
                confusion.counts[row][col] += 1;
                if predicted == x.label {
                    rows[row].correct += 1;
                }
            }
            Err(_) => {
                let col = confusion.failed_column();
                confusion.counts[row][col] += 1;
            }
        }
    }

    let mut failures = Vec::new();
    record_failures(train_set, Phase::Train, &mut failures);
    record_failures(test_set, Phase::Test, &mut failures);

    Ok(EvalReport {
        rows,
        confusion,
        failures,
        k: params.k,
        seed: params.seed,
        connectivity: params.connectivity,
    })
}

/// Extracts features for both sets, trains on the train set and classifies
/// every test sample. Failed extractions count as misclassifications.
pub fn evaluate(
    train_set: &[&CorpusEntry],
    test_set: &[&CorpusEntry],
    params: &EvalParams,
) -> Result<EvalReport, HarnessError> {
    let train_x = extract_all(train_set, params.connectivity, params.polarity);
    let test_x = extract_all(test_set, params.connectivity, params.polarity);
    evaluate_extracted(&train_x, &test_x, params)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepReport {
    pub reports: Vec<EvalReport>,
}

impl SweepReport {
    pub fn rows(&self) -> Vec<(usize, f64)> {
        self.reports
            .iter()
            .map(|r| (r.k, r.overall_accuracy()))
            .collect()
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        if let Some(first) = self.reports.first() {
            let _ = writeln!(
                out,
                "Average recognition rate by k (connectivity={}, seed={})",
                first.connectivity, first.seed
            );
        }
        let _ = writeln!(
            out,
            "{:<18}{:>26}",
            "K-NN classifiers", "Recognition accuracy in %"
        );
        for (k, acc) in self.rows() {
            let _ = writeln!(out, "{:<18}{:>26.2}", format!("K={k}"), acc);
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from("k,recognition_percent\n");
        for (k, acc) in self.rows() {
            let _ = writeln!(out, "{k},{acc:.2}");
        }
        out
    }
}

/// One evaluation per `k` over the same split; features are extracted once.
pub fn sweep_k(
    train_set: &[&CorpusEntry],
    test_set: &[&CorpusEntry],
    ks: &[usize],
    params: &EvalParams,
) -> Result<SweepReport, HarnessError> {
    let train_x = extract_all(train_set, params.connectivity, params.polarity);
    let test_x = extract_all(test_set, params.connectivity, params.polarity);
    let reports = ks
        .iter()
        .map(|&k| evaluate_extracted(&train_x, &test_x, &EvalParams { k, ..*params }))
        .collect::<Result<_, _>>()?;
    Ok(SweepReport { reports })
}
