// 52 mutually orthogonal patterns (Hadamard rows) are all recalled with
// a false rejection rate of 0%.
//
// ```bash
// cargo run -p hebbocr --example orthogonal_recall
// ```

use std::collections::BTreeMap;

use hebbocr::evaluation::{build_report, KbSummary};
use hebbocr::hebbnet::{KnowledgeBase, Regime, TrainingSample};
use hebbocr::imagegrid::{FeatureVector, GridDims};
use hebbocr::Label;

fn sylvester(order: usize) -> Vec<Vec<i8>> {
    let mut h = vec![vec![1i8]];
    while h.len() < order {
        let m = h.len();
        h = (0..2 * m)
            .map(|i| (0..2 * m).map(|j| if i >= m && j >= m { -h[i % m][j % m] } else { h[i % m][j % m] }).collect())
            .collect();
    }
    h
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let labels: Vec<Label> = Label::all().collect();
    let samples = labels
        .iter()
        .zip(sylvester(64))
        .map(|(&l, row)| Ok(TrainingSample::new(l, FeatureVector::new(row)?)))
        .collect::<Result<Vec<_>, hebbocr::imagegrid::ImageError>>()?;

    for regime in [Regime::OneVsRest, Regime::PositiveOnly] {
        let kb = KnowledgeBase::init_zero(&labels, GridDims::new(8, 8)?, regime)?.train(&samples, 1)?;
        let mut outcomes = Vec::new();
        for s in &samples {
            let d = kb.classify(&s.input)?;
            outcomes.push(d.outcome);
        }
        let probe = kb.classify(&samples[0].input)?;
        let summary = KbSummary { grid: kb.grid(), regime, epochs: 1 };
        let report = build_report(&labels, &outcomes, &BTreeMap::new(), summary)?;
        println!(
            "{regime}: own score {}, other score {}, success {}%, FRR {}%",
            probe.net_inputs[&labels[0]],
            probe.net_inputs[&labels[1]],
            report.overall.success_rate_pct.map(|p| p.render()).unwrap_or_default(),
            report.overall.frr_pct.map(|p| p.render()).unwrap_or_default(),
        );
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
