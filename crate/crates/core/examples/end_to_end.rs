// The whole pipeline through the library API: generate a corpus, extract
// features, train both regimes, classify the test split and report.
//
// ```bash
// cargo run -p hebbocr --example end_to_end
// ```

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use hebbocr::evaluation::{build_report, table_text, KbSummary};
use hebbocr::glyphgen::{generate_dataset, DistortionParams, Manifest, Split};
use hebbocr::hebbnet::{KnowledgeBase, Outcome, Regime, TrainingSample};
use hebbocr::imagegrid::{parse_pnm, ExtractionConfig, FeatureVector, ImageError};
use hebbocr::Label;

fn features(root: &Path, rel: &str, cfg: &ExtractionConfig) -> Result<Option<FeatureVector>, Box<dyn std::error::Error>> {
    let img = parse_pnm(&fs::read(root.join(rel))?)?;
    match cfg.extract(&img) {
        Ok(f) => Ok(Some(f)),
        Err(ImageError::NoInk) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let params = DistortionParams { flip_probability: 0.02, max_shift: 1, seed: 42, ..Default::default() };
    generate_dataset(10, 5, &params, dir.path(), false)?;
    let manifest = Manifest::load(dir.path())?;
    let cfg = ExtractionConfig::default();

    let mut samples = Vec::new();
    let mut training_counts: BTreeMap<Label, u64> = BTreeMap::new();
    for e in manifest.split(Split::Train) {
        if let Some(f) = features(dir.path(), &e.path, &cfg)? {
            samples.push(TrainingSample::new(e.label, f));
            *training_counts.entry(e.label).or_default() += 1;
        }
    }
    let labels: Vec<Label> = training_counts.keys().copied().collect();

    for regime in [Regime::OneVsRest, Regime::PositiveOnly] {
        let kb = KnowledgeBase::init_zero(&labels, cfg.grid, regime)?.train(&samples, 1)?;
        let mut truth = Vec::new();
        let mut outcomes = Vec::new();
        for e in manifest.split(Split::Test) {
            let outcome = match features(dir.path(), &e.path, &cfg)? {
                Some(f) => kb.classify(&f)?.outcome,
                None => Outcome::Unrecognized,
            };
            truth.push(e.label);
            outcomes.push(outcome);
        }
        let summary = KbSummary { grid: kb.grid(), regime, epochs: kb.epochs_trained() };
        let report = build_report(&truth, &outcomes, &training_counts, summary)?;
        let table = table_text(&report);
        println!("{regime}:");
        for line in table.lines().take(4).chain(table.lines().last()) {
            println!("  {line}");
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
