//! Success rate, false rejection rate (FRR) and per-class reports.
//!
//! Percentages are exact rationals and only rounded (half up, two decimals)
//! when rendered, so report files are byte-stable.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

use num_rational::Ratio;
use thiserror::Error;

use crate::hebbnet::{Outcome, Regime};
use crate::imagegrid::GridDims;
use crate::Label;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no patterns were tested")]
    NoTests,
    #[error("{count} exceeds the {tested} patterns tested")]
    CountOverflow { count: u64, tested: u64 },
    #[error("{truth} test labels but {decisions} decisions")]
    LengthMismatch { truth: usize, decisions: usize },
}

/// An exact percentage in `[0, 100]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Percentage(Ratio<u64>);

impl Percentage {
    /// `100 × part / whole`.
    pub fn of(part: u64, whole: u64) -> Result<Self, EvalError> {
        if whole == 0 {
            return Err(EvalError::NoTests);
        }
        if part > whole {
            return Err(EvalError::CountOverflow { count: part, tested: whole });
        }
        Ok(Percentage(Ratio::new(part, whole) * 100))
    }

    pub fn ratio(self) -> Ratio<u64> {
        self.0
    }

    /// Rounded half up to two decimals, e.g. `66.67`.
    pub fn render(self) -> String {
        let (n, d) = (*self.0.numer() as u128, *self.0.denom() as u128);
        let hundredths = (200 * n + d) / (2 * d);
        format!("{}.{:02}", hundredths / 100, hundredths % 100)
    }
}

impl fmt::Display for Percentage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub fn success_rate(correct: u64, tested: u64) -> Result<Percentage, EvalError> {
    Percentage::of(correct, tested)
}

/// False rejection rate: unrecognized patterns over patterns tested, × 100.
pub fn frr(unrecognized: u64, tested: u64) -> Result<Percentage, EvalError> {
    Percentage::of(unrecognized, tested)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RowLabel {
    Class(Label),
    All,
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowLabel::Class(l) => f.write_str(&l.tag()),
            RowLabel::All => f.write_str("ALL"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalRecord {
    pub label: RowLabel,
    pub training_count: u64,
    pub testing_count: u64,
    pub correct_count: u64,
    pub misclassified_count: u64,
    pub unrecognized_count: u64,
    /// `None` when nothing was tested.
    pub success_rate_pct: Option<Percentage>,
    pub frr_pct: Option<Percentage>,
}

impl EvalRecord {
    fn tally(label: RowLabel, training_count: u64, correct: u64, wrong: u64, unrecognized: u64) -> Self {
        let tested = correct + wrong + unrecognized;
        EvalRecord {
            label,
            training_count,
            testing_count: tested,
            correct_count: correct,
            misclassified_count: wrong,
            unrecognized_count: unrecognized,
            success_rate_pct: success_rate(correct, tested).ok(),
            frr_pct: frr(unrecognized, tested).ok(),
        }
    }

    /// Share of tests recognized as a wrong class.
    pub fn misclassified_pct(&self) -> Option<Percentage> {
        Percentage::of(self.misclassified_count, self.testing_count).ok()
    }
}

/// Metadata of the knowledge base a report was produced with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KbSummary {
    pub grid: GridDims,
    pub regime: Regime,
    pub epochs: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalReport {
    /// One per tested class, in order of first appearance in the test set.
    pub records: Vec<EvalRecord>,
    pub overall: EvalRecord,
    pub kb_summary: KbSummary,
}

impl EvalReport {
    /// True when the test set was empty, so overall rates are undefined.
    pub fn no_tests(&self) -> bool {
        self.overall.testing_count == 0
    }
}

/// Tallies `outcomes` against the true labels, one record per tested class.
pub fn build_report(
    truth: &[Label],
    outcomes: &[Outcome],
    training_counts: &BTreeMap<Label, u64>,
    kb_summary: KbSummary,
) -> Result<EvalReport, EvalError> {
    if truth.len() != outcomes.len() {
        return Err(EvalError::LengthMismatch { truth: truth.len(), decisions: outcomes.len() });
    }
    let mut order: Vec<Label> = Vec::new();
    let mut counts: BTreeMap<Label, [u64; 3]> = BTreeMap::new();
    for (&label, outcome) in truth.iter().zip(outcomes) {
        let slot = counts.entry(label).or_insert_with(|| {
            order.push(label);
            [0; 3]
        });
        match outcome {
            Outcome::Recognized(l) if *l == label => slot[0] += 1,
            Outcome::Recognized(_) => slot[1] += 1,
            Outcome::Unrecognized => slot[2] += 1,
        }
    }
    let records: Vec<EvalRecord> = order
        .iter()
        .map(|l| {
            let [c, w, u] = counts[l];
            let train = training_counts.get(l).copied().unwrap_or(0);
            EvalRecord::tally(RowLabel::Class(*l), train, c, w, u)
        })
        .collect();
    let sum = |f: fn(&EvalRecord) -> u64| records.iter().map(f).sum::<u64>();
    let overall = EvalRecord::tally(
        RowLabel::All,
        sum(|r| r.training_count),
        sum(|r| r.correct_count),
        sum(|r| r.misclassified_count),
        sum(|r| r.unrecognized_count),
    );
    Ok(EvalReport { records, overall, kb_summary })
}

pub const TABLE_HEADER: &str =
    "label\ttrain_count\ttest_count\tcorrect\tmisclassified\tunrecognized\tsuccess_rate_pct\tfrr_pct";

fn render_opt(p: Option<Percentage>) -> String {
    p.map_or_else(|| "NA".to_string(), Percentage::render)
}

fn table_row(r: &EvalRecord) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
        r.label,
        r.training_count,
        r.testing_count,
        r.correct_count,
        r.misclassified_count,
        r.unrecognized_count,
        render_opt(r.success_rate_pct),
        render_opt(r.frr_pct),
    )
}

/// Tab-separated table: header, one row per class, then the `ALL` row.
/// Rates of an empty test set render as `NA`.
pub fn table_text(report: &EvalReport) -> String {
    let mut out = format!("{TABLE_HEADER}\n");
    for r in &report.records {
        out.push_str(&table_row(r));
    }
    out.push_str(&table_row(&report.overall));
    out
}

pub fn emit_table<W: Write>(report: &EvalReport, mut sink: W) -> io::Result<usize> {
    let text = table_text(report);
    sink.write_all(text.as_bytes())?;
    Ok(text.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlotKind {
    /// Class index (1-based, record order) vs success rate.
    SuccessByClass,
    /// Class index vs FRR.
    FrrByClass,
    /// Success rate vs FRR, one point per class.
    SuccessVsFrr,
}

impl PlotKind {
    pub const ALL: [PlotKind; 3] = [PlotKind::SuccessByClass, PlotKind::FrrByClass, PlotKind::SuccessVsFrr];

    pub fn file_name(self) -> &'static str {
        match self {
            PlotKind::SuccessByClass => "success_by_class.csv",
            PlotKind::FrrByClass => "frr_by_class.csv",
            PlotKind::SuccessVsFrr => "success_vs_frr.csv",
        }
    }
}

pub fn plot_text(report: &EvalReport, which: PlotKind) -> String {
    let mut out = String::from("x,y\n");
    for (i, r) in report.records.iter().enumerate() {
        let (x, y) = match which {
            PlotKind::SuccessByClass => ((i + 1).to_string(), render_opt(r.success_rate_pct)),
            PlotKind::FrrByClass => ((i + 1).to_string(), render_opt(r.frr_pct)),
            PlotKind::SuccessVsFrr => (render_opt(r.success_rate_pct), render_opt(r.frr_pct)),
        };
        out.push_str(&format!("{x},{y}\n"));
    }
    out
}

pub fn emit_plot_data<W: Write>(report: &EvalReport, which: PlotKind, mut sink: W) -> io::Result<usize> {
    let text = plot_text(report, which);
    sink.write_all(text.as_bytes())?;
    Ok(text.len())
}
