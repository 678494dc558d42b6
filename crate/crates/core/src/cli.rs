//! Command-line front end: `extract`, `train`, `classify`, `evaluate`,
//! `sweep` and `gen`.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::features::{process_glyph, Polarity};
use crate::harness::{
    default_classes, evaluate, generate_synthetic, load_corpus, load_image, split, sweep_k,
    EvalParams, HarnessError, SplitSpec, SynthConfig, SynthFormat,
};
use crate::imagecore::ImageError;
use crate::knn::{classify, load_model, save_model, train, KnnError};
use crate::topology::Connectivity;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Knn(#[from] KnnError),
    #[error("{}: {source}", path.display())]
    Glyph { path: PathBuf, source: ImageError },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{source}")]
    Output { source: io::Error },
}

fn io_at(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

impl From<io::Error> for CliError {
    fn from(source: io::Error) -> Self {
        CliError::Output { source }
    }
}

fn parse_odd_k(s: &str) -> Result<usize, String> {
    let k: usize = s
        .parse()
        .map_err(|_| format!("`{s}` is not a positive integer"))?;
    if k.is_multiple_of(2) {
        return Err(format!("k must be odd and positive, got {k}"));
    }
    Ok(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConnectivityArg {
    Four,
    Eight,
}

impl From<ConnectivityArg> for Connectivity {
    fn from(c: ConnectivityArg) -> Self {
        match c {
            ConnectivityArg::Four => Connectivity::Four,
            ConnectivityArg::Eight => Connectivity::Eight,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Pbm,
    Pgm,
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    /// Foreground connectivity; holes use the complementary rule.
    #[arg(long, value_enum, default_value = "eight")]
    pub connectivity: ConnectivityArg,
    /// Input images have light strokes on a dark page.
    #[arg(long)]
    pub invert_input: bool,
}

impl PipelineArgs {
    fn polarity(&self) -> Polarity {
        if self.invert_input {
            Polarity::LightInk
        } else {
            Polarity::DarkInk
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Training images per class.
    #[arg(long = "train", default_value_t = 50)]
    pub train_count: usize,
    /// Test images per class.
    #[arg(long = "test", default_value_t = 25)]
    pub test_count: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Comma-separated records instead of the aligned table.
    #[arg(long)]
    pub csv: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Print the five Euler features of each image.
    Extract {
        #[arg(required = true)]
        images: Vec<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long)]
        csv: bool,
        /// Prefix each vector with its image path.
        #[arg(long)]
        verbose: bool,
    },
    /// Build a model from every image in a manifest.
    Train {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Predict the class of each image.
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "1", value_parser = parse_odd_k)]
        k: usize,
        /// Must match the model when given.
        #[arg(long, value_enum)]
        connectivity: Option<ConnectivityArg>,
        #[arg(long)]
        invert_input: bool,
        /// Also list the chosen neighbors.
        #[arg(long)]
        verbose: bool,
        #[arg(required = true)]
        images: Vec<PathBuf>,
    },
    /// Seeded split, train and test; prints the per-class table.
    Evaluate {
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long, default_value = "1", value_parser = parse_odd_k)]
        k: usize,
    },
    /// Evaluate several k over one split.
    Sweep {
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long, value_delimiter = ',', default_value = "1,3,5,7", value_parser = parse_odd_k)]
        k: Vec<usize>,
    },
    /// Write a synthetic ten-class corpus and its manifest.
    Gen {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Images per class.
        #[arg(long, default_value_t = 75)]
        count: usize,
        #[arg(long, value_enum, default_value = "pbm")]
        format: FormatArg,
    },
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "eulerglyph",
    version,
    about = "Numeral recognition from zoned Euler-number features"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

fn emit(text: &str, dest: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match dest {
        Some(path) => std::fs::write(path, text).map_err(io_at(path)),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn eval_params(split: &SplitArgs, k: usize) -> EvalParams {
    EvalParams {
        k,
        connectivity: split.pipeline.connectivity.into(),
        polarity: split.pipeline.polarity(),
        seed: split.seed,
    }
}

fn split_spec(args: &SplitArgs) -> SplitSpec {
    SplitSpec {
        train_per_class: args.train_count,
        test_per_class: args.test_count,
        seed: args.seed,
    }
}

pub fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &config.command {
        Command::Extract {
            images,
            pipeline,
            csv,
            verbose,
        } => {
            for path in images {
                let glyph = load_image(path)?;
                let v = process_glyph(&glyph, pipeline.connectivity.into(), pipeline.polarity())
                    .map_err(|source| CliError::Glyph {
                        path: path.clone(),
                        source,
                    })?;
                let text = if *csv {
                    v.to_array().map(|e| e.to_string()).join(",")
                } else {
                    v.to_string()
                };
                if *verbose {
                    writeln!(stdout, "{} {text}", path.display())?;
                } else {
                    writeln!(stdout, "{text}")?;
                }
            }
        }
        Command::Train {
            manifest,
            out,
            pipeline,
        } => {
            let corpus = load_corpus(manifest)?;
            let conn = pipeline.connectivity.into();
            let mut samples = Vec::with_capacity(corpus.len());
            for e in &corpus.entries {
                let v = process_glyph(&e.image, conn, pipeline.polarity()).map_err(|source| {
                    CliError::Glyph {
                        path: e.path.clone(),
                        source,
                    }
                })?;
                samples.push((e.label, v));
            }
            let model = train(samples, conn)?;
            let file = File::create(out).map_err(io_at(out))?;
            save_model(&model, BufWriter::new(file)).map_err(io_at(out))?;
            writeln!(
                stdout,
                "trained {} samples, {} classes",
                model.len(),
                model.labels().len()
            )?;
        }
        Command::Classify {
            model,
            k,
            connectivity,
            invert_input,
            verbose,
            images,
        } => {
            let file = File::open(model).map_err(io_at(model))?;
            let m = load_model(BufReader::new(file))?;
            if let Some(c) = connectivity {
                m.ensure_connectivity((*c).into())?;
            }
            let polarity = if *invert_input {
                Polarity::LightInk
            } else {
                Polarity::DarkInk
            };
            for path in images {
                let glyph = load_image(path)?;
                let v = process_glyph(&glyph, m.connectivity(), polarity).map_err(|source| {
                    CliError::Glyph {
                        path: path.clone(),
                        source,
                    }
                })?;
                let result = classify(&m, &v, *k)?;
                if *verbose {
                    writeln!(stdout, "{} {} features={v}", path.display(), result.label)?;
                    for n in &result.neighbors {
                        writeln!(
                            stdout,
                            "  neighbor ordinal={} label={} squared_distance={}",
                            n.ordinal, n.label, n.distance
                        )?;
                    }
                } else {
                    writeln!(stdout, "{}", result.label)?;
                }
            }
        }
        Command::Evaluate { split: args, k } => {
            let corpus = load_corpus(&args.manifest)?;
            let sets = split(&corpus, split_spec(args))?;
            let report = evaluate(&sets.train, &sets.test, &eval_params(args, *k))?;
            let text = if args.csv {
                report.render_csv()
            } else {
                report.render_table()
            };
            emit(&text, args.out.as_deref(), stdout)?;
        }
        Command::Sweep { split: args, k } => {
            let corpus = load_corpus(&args.manifest)?;
            let sets = split(&corpus, split_spec(args))?;
            let report = sweep_k(&sets.train, &sets.test, k, &eval_params(args, 1))?;
            let text = if args.csv {
                report.render_csv()
            } else {
                report.render_table()
            };
            emit(&text, args.out.as_deref(), stdout)?;
        }
        Command::Gen {
            out,
            seed,
            count,
            format,
        } => {
            let cfg = SynthConfig {
                count_per_class: *count,
                seed: *seed,
                format: match format {
                    FormatArg::Pbm => SynthFormat::Pbm,
                    FormatArg::Pgm => SynthFormat::Pgm,
                },
                ..SynthConfig::default()
            };
            let corpus = generate_synthetic(&default_classes(), &cfg, out)?;
            writeln!(
                stdout,
                "wrote {} images to {}",
                corpus.len(),
                corpus.manifest.display()
            )?;
        }
    }
    Ok(())
}
