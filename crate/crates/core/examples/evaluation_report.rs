// Tally decisions into a per-class table with success rate and FRR, and
// emit the three plot series.
//
// ```bash
// cargo run -p hebbocr --example evaluation_report
// ```

use std::collections::BTreeMap;

use hebbocr::evaluation::{build_report, emit_plot_data, emit_table, KbSummary, PlotKind};
use hebbocr::hebbnet::{Outcome, Regime};
use hebbocr::imagegrid::GridDims;
use hebbocr::Label;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (a, b, c) = (Label::new('A')?, Label::new('B')?, Label::new('c')?);
    use Outcome::{Recognized as R, Unrecognized as U};
    let tests = [
        (a, R(a)), (a, R(a)), (a, R(a)), (a, R(a)), (a, R(a)),
        (b, R(b)), (b, U), (b, R(b)), (b, U), (b, R(b)),
        (c, R(c)), (c, R(a)), (c, R(c)), (c, R(c)), (c, U),
    ];
    let truth: Vec<Label> = tests.iter().map(|t| t.0).collect();
    let outcomes: Vec<Outcome> = tests.iter().map(|t| t.1).collect();
    let training = BTreeMap::from([(a, 10), (b, 10), (c, 10)]);
    let summary = KbSummary { grid: GridDims::default(), regime: Regime::OneVsRest, epochs: 1 };
    let report = build_report(&truth, &outcomes, &training, summary)?;

    let mut stdout = std::io::stdout().lock();
    emit_table(&report, &mut stdout)?;
    for kind in PlotKind::ALL {
        println!("\n{}:", kind.file_name());
        emit_plot_data(&report, kind, &mut stdout)?;
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
