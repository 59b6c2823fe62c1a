//! The `hebbocr` command line: `gen`, `train`, `test` and `kb-diff`.
//!
//! [`run`] takes the argument list and output streams and returns the exit
//! status, so the whole pipeline can be driven in-process. Exit codes:
//! 0 ok, 1 I/O or data error, 2 usage error, 3 `kb-diff` found differences.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::evaluation::{build_report, plot_text, table_text, KbSummary, PlotKind};
use crate::glyphgen::{generate_dataset, DistortionParams, Manifest, Split};
use crate::hebbnet::{KnowledgeBase, Outcome, Regime, TrainingSample};
use crate::imagegrid::{parse_pnm, ExtractionConfig, FeatureVector, GridDims, ImageError};
use crate::kbstore::{diff_kb, load_kb, save_kb};
use crate::Label;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DIFFERENT: i32 = 3;

const DEFAULT_KB: &str = "knowledge.kb";
const DEFAULT_REPORT: &str = "report.tsv";
const DEFAULT_PLOTS: &str = "plots";

#[derive(Debug, Parser)]
#[command(name = "hebbocr", version, about = "Offline letter recognition with Hebbian membership neurons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic letter corpus with a manifest
    Gen(GenArgs),
    /// Train a knowledge base on the corpus training split
    Train(TrainArgs),
    /// Classify a corpus split and write the report and plot data
    Test(TestArgs),
    /// Compare two knowledge-base files
    KbDiff(DiffArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value = "data")]
    out: PathBuf,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    train_sets: u64,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    test_sets: u64,
    /// Per-cell flip probability in [0, 1]
    #[arg(long, default_value_t = 0.02, value_parser = parse_fraction)]
    noise: f64,
    /// Maximum translation in cells
    #[arg(long, default_value_t = 1)]
    shift: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Canvas size the 8x8 templates are drawn on
    #[arg(long, default_value = "10x10")]
    canvas: GridDims,
    /// Overwrite an existing manifest
    #[arg(long)]
    force: bool,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long, default_value = "data")]
    data: PathBuf,
    /// Output knowledge-base file [default: <data>/knowledge.kb]
    #[arg(long)]
    kb: Option<PathBuf>,
    #[arg(long, default_value = "16x16")]
    grid: GridDims,
    /// Ink cutoff as a fraction of maxval
    #[arg(long, default_value_t = 0.5, value_parser = parse_fraction)]
    threshold: f64,
    #[arg(long, value_enum, default_value_t = RegimeArg::OneVsRest)]
    regime: RegimeArg,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    epochs: u64,
}

#[derive(Debug, Args)]
struct TestArgs {
    #[arg(long, default_value = "data")]
    data: PathBuf,
    /// Knowledge-base file [default: <data>/knowledge.kb]
    #[arg(long)]
    kb: Option<PathBuf>,
    /// Expected feature grid; must match the knowledge base [default: the knowledge base's grid]
    #[arg(long)]
    grid: Option<GridDims>,
    #[arg(long, default_value_t = 0.5, value_parser = parse_fraction)]
    threshold: f64,
    /// Report TSV [default: <data>/report.tsv]
    #[arg(long)]
    report: Option<PathBuf>,
    /// Directory for the plot CSVs [default: <data>/plots]
    #[arg(long)]
    plots: Option<PathBuf>,
    /// Corpus split to classify
    #[arg(long, value_enum, default_value_t = SplitArg::Test)]
    split: SplitArg,
}

#[derive(Debug, Args)]
struct DiffArgs {
    left: PathBuf,
    right: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RegimeArg {
    OneVsRest,
    PositiveOnly,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::OneVsRest => Regime::OneVsRest,
            RegimeArg::PositiveOnly => Regime::PositiveOnly,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SplitArg {
    Train,
    Test,
}

impl From<SplitArg> for Split {
    fn from(s: SplitArg) -> Self {
        match s {
            SplitArg::Train => Split::Train,
            SplitArg::Test => Split::Test,
        }
    }
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(format!("{v} is outside [0, 1]"));
    }
    Ok(v)
}

/// Resolved parameters of a train or test run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub extraction: ExtractionConfig,
    pub regime: Regime,
    pub epochs: u64,
    pub data_dir: PathBuf,
    pub kb_path: PathBuf,
    pub report_path: PathBuf,
    pub plots_dir: PathBuf,
}

impl RunConfig {
    fn new(data: &Path, kb: Option<PathBuf>) -> Self {
        RunConfig {
            extraction: ExtractionConfig::default(),
            regime: Regime::default(),
            epochs: 1,
            data_dir: data.to_path_buf(),
            kb_path: kb.unwrap_or_else(|| data.join(DEFAULT_KB)),
            report_path: data.join(DEFAULT_REPORT),
            plots_dir: data.join(DEFAULT_PLOTS),
        }
    }
}

/// Error carrying its exit status.
#[derive(Debug)]
struct Failure(i32, String);

fn data_err(msg: impl std::fmt::Display) -> Failure {
    Failure(EXIT_DATA, msg.to_string())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a, out),
        Command::Train(a) => cmd_train(a, out, err),
        Command::Test(a) => cmd_test(a, out),
        Command::KbDiff(a) => cmd_kb_diff(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn cmd_gen(a: GenArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let params = DistortionParams {
        flip_probability: a.noise,
        max_shift: a.shift,
        canvas: a.canvas,
        seed: a.seed,
    };
    let manifest = generate_dataset(a.train_sets as usize, a.test_sets as usize, &params, &a.out, a.force)
        .map_err(data_err)?;
    let train = manifest.split(Split::Train).count();
    let test = manifest.split(Split::Test).count();
    let _ = writeln!(out, "wrote {train} training and {test} test images to {}", a.out.display());
    Ok(EXIT_OK)
}

enum Extracted {
    Features(FeatureVector),
    Blank,
}

fn extract_file(root: &Path, rel: &str, cfg: &ExtractionConfig) -> Result<Extracted, Failure> {
    let path = root.join(rel);
    let bytes = fs::read(&path).map_err(|e| data_err(format!("{}: {e}", path.display())))?;
    let img = parse_pnm(&bytes).map_err(|e| data_err(format!("{}: {e}", path.display())))?;
    match cfg.extract(&img) {
        Ok(f) => Ok(Extracted::Features(f)),
        Err(ImageError::NoInk) => Ok(Extracted::Blank),
        Err(e) => Err(data_err(format!("{}: {e}", path.display()))),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| data_err(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, bytes).map_err(|e| data_err(format!("{}: {e}", path.display())))
}

fn cmd_train(a: TrainArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let mut cfg = RunConfig::new(&a.data, a.kb);
    cfg.extraction = ExtractionConfig { grid: a.grid, threshold: a.threshold };
    cfg.regime = a.regime.into();
    cfg.epochs = a.epochs;

    let manifest = Manifest::load(&cfg.data_dir).map_err(data_err)?;
    let mut samples = Vec::new();
    let mut skipped = 0usize;
    for entry in manifest.split(Split::Train) {
        match extract_file(&cfg.data_dir, &entry.path, &cfg.extraction)? {
            Extracted::Features(f) => samples.push(TrainingSample::new(entry.label, f)),
            Extracted::Blank => {
                skipped += 1;
                let _ = writeln!(err, "warning: skipping {}: image has no ink", cfg.data_dir.join(&entry.path).display());
            }
        }
    }
    if samples.is_empty() {
        return Err(data_err(format!(
            "no usable training samples in {} ({skipped} blank)",
            cfg.data_dir.display()
        )));
    }

    let mut counts: BTreeMap<Label, usize> = BTreeMap::new();
    for s in &samples {
        *counts.entry(s.label).or_default() += 1;
    }
    let labels: Vec<Label> = counts.keys().copied().collect();
    let kb = KnowledgeBase::init_zero(&labels, cfg.extraction.grid, cfg.regime)
        .and_then(|kb| kb.train(&samples, cfg.epochs))
        .map_err(data_err)?;
    let mut bytes = Vec::new();
    save_kb(&kb, &mut bytes).map_err(data_err)?;
    write_file(&cfg.kb_path, &bytes)?;

    for (label, n) in &counts {
        let _ = writeln!(out, "{}\t{n}", label.tag());
    }
    let _ = writeln!(
        out,
        "trained {} samples over {} classes ({}, {} epoch(s), grid {}); skipped {skipped} blank",
        samples.len(),
        labels.len(),
        cfg.regime,
        cfg.epochs,
        cfg.extraction.grid,
    );
    let _ = writeln!(out, "wrote {}", cfg.kb_path.display());
    Ok(EXIT_OK)
}

fn read_kb(path: &Path) -> Result<KnowledgeBase, Failure> {
    let file = fs::File::open(path).map_err(|e| data_err(format!("{}: {e}", path.display())))?;
    load_kb(std::io::BufReader::new(file)).map_err(|e| data_err(format!("{}: {e}", path.display())))
}

fn cmd_test(a: TestArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let mut cfg = RunConfig::new(&a.data, a.kb);
    if let Some(r) = a.report {
        cfg.report_path = r;
    }
    if let Some(p) = a.plots {
        cfg.plots_dir = p;
    }
    let kb = read_kb(&cfg.kb_path)?;
    if let Some(g) = a.grid {
        if g != kb.grid() {
            return Err(data_err(format!(
                "grid {g} does not match the knowledge base grid {}",
                kb.grid()
            )));
        }
    }
    cfg.extraction = ExtractionConfig { grid: kb.grid(), threshold: a.threshold };
    cfg.regime = kb.regime();
    cfg.epochs = kb.epochs_trained();

    let manifest = Manifest::load(&cfg.data_dir).map_err(data_err)?;
    let mut training_counts: BTreeMap<Label, u64> = BTreeMap::new();
    for e in manifest.split(Split::Train) {
        *training_counts.entry(e.label).or_default() += 1;
    }

    let mut truth = Vec::new();
    let mut outcomes = Vec::new();
    for entry in manifest.split(a.split.into()) {
        let outcome = match extract_file(&cfg.data_dir, &entry.path, &cfg.extraction)? {
            Extracted::Features(f) => kb.classify(&f).map_err(data_err)?.outcome,
            Extracted::Blank => Outcome::Unrecognized,
        };
        truth.push(entry.label);
        outcomes.push(outcome);
    }
    let summary = KbSummary { grid: kb.grid(), regime: kb.regime(), epochs: kb.epochs_trained() };
    let report = build_report(&truth, &outcomes, &training_counts, summary).map_err(data_err)?;

    write_file(&cfg.report_path, table_text(&report).as_bytes())?;
    for kind in PlotKind::ALL {
        write_file(&cfg.plots_dir.join(kind.file_name()), plot_text(&report, kind).as_bytes())?;
    }

    let o = &report.overall;
    match (o.success_rate_pct, o.frr_pct) {
        (Some(s), Some(f)) => {
            let _ = writeln!(
                out,
                "tested {} patterns: success rate {s}%, FRR {f}% ({} unrecognized, {} misclassified)",
                o.testing_count, o.unrecognized_count, o.misclassified_count
            );
        }
        _ => {
            let _ = writeln!(out, "no patterns tested");
        }
    }
    let _ = writeln!(out, "wrote {} and {}", cfg.report_path.display(), cfg.plots_dir.display());
    Ok(EXIT_OK)
}

fn cmd_kb_diff(a: DiffArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let left = read_kb(&a.left)?;
    let right = read_kb(&a.right)?;
    let diff = diff_kb(&left, &right);
    let _ = write!(out, "{diff}");
    Ok(if diff.is_identical() { EXIT_OK } else { EXIT_DIFFERENT })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("hebbocr").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_capture(&["gen", "--noise", "1.5"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["train", "--grid", "16"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["train", "--epochs", "0"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["train", "--regime", "sometimes"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&[]).0, EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("kb-diff"));
    }

    #[test]
    fn fraction_parser() {
        assert_eq!(parse_fraction("0.25"), Ok(0.25));
        assert!(parse_fraction("-0.1").is_err());
        assert!(parse_fraction("x").is_err());
    }
}
