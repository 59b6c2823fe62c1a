//! Text persistence and comparison of knowledge bases.
//!
//! File layout (UTF-8, LF line endings):
//!
//! ```text
//! HEBBKB 1
//! grid <rows> <cols>
//! regime <ONE_VS_REST|POSITIVE_ONLY>
//! epochs <count>
//! classes <count>
//! neuron <label> bias <int>        one pair per class,
//! weights <int> <int> ... <int>    sorted by label code point
//! checksum <8 lowercase hex digits>
//! ```
//!
//! The checksum is FNV-1a (32-bit) over every byte before the checksum line.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::io::{self, Read, Write};

use thiserror::Error;

use crate::hebbnet::{ClusterNeuron, HebbError, KnowledgeBase, Regime, FORMAT_VERSION};
use crate::imagegrid::GridDims;
use crate::Label;

const MAGIC: &str = "HEBBKB";

#[derive(Debug, Error)]
pub enum KbError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("unknown knowledge-base version {0}")]
    UnknownVersion(String),
    #[error("checksum mismatch: file says {stored}, contents hash to {computed}")]
    ChecksumMismatch { stored: String, computed: String },
    #[error("malformed record at line {line}: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("neuron {label} has {actual} weights, grid needs {expected}")]
    DimensionMismatch { label: String, expected: usize, actual: usize },
    #[error("invalid knowledge base: {0}")]
    Invalid(#[from] HebbError),
}

/// 32-bit FNV-1a.
pub fn fnv1a32(bytes: &[u8]) -> u32 {
    bytes.iter().fold(0x811c_9dc5u32, |h, &b| (h ^ b as u32).wrapping_mul(0x0100_0193))
}

/// Serializes `kb` to its canonical text form.
pub fn to_text(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    // writing to a String cannot fail
    let _ = writeln!(out, "{MAGIC} {}", kb.format_version());
    let _ = writeln!(out, "grid {} {}", kb.grid().rows, kb.grid().cols);
    let _ = writeln!(out, "regime {}", kb.regime());
    let _ = writeln!(out, "epochs {}", kb.epochs_trained());
    let _ = writeln!(out, "classes {}", kb.neurons().len());
    for n in kb.neurons() {
        let _ = writeln!(out, "neuron {} bias {}", n.label.tag(), n.bias);
        out.push_str("weights");
        for w in &n.weights {
            let _ = write!(out, " {w}");
        }
        out.push('\n');
    }
    let sum = fnv1a32(out.as_bytes());
    let _ = writeln!(out, "checksum {sum:08x}");
    out
}

pub fn save_kb<W: Write>(kb: &KnowledgeBase, mut sink: W) -> io::Result<usize> {
    let text = to_text(kb);
    sink.write_all(text.as_bytes())?;
    Ok(text.len())
}

pub fn load_kb<R: Read>(mut source: R) -> Result<KnowledgeBase, KbError> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    from_bytes(&bytes)
}

fn malformed(line: usize, message: impl Into<String>) -> KbError {
    KbError::MalformedRecord { line, message: message.into() }
}

/// Parses the canonical text form. The version line is checked first, then
/// the checksum, then the records.
pub fn from_bytes(bytes: &[u8]) -> Result<KnowledgeBase, KbError> {
    let first_end = bytes.iter().position(|&b| b == b'\n').ok_or_else(|| malformed(1, "missing header"))?;
    let header = String::from_utf8_lossy(&bytes[..first_end]);
    match header.split_once(' ') {
        Some((MAGIC, v)) if v == FORMAT_VERSION.to_string() => {}
        Some((MAGIC, v)) => return Err(KbError::UnknownVersion(v.to_string())),
        _ => return Err(malformed(1, format!("expected `{MAGIC} <version>`, got {header:?}"))),
    }

    let trimmed = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    let split = trimmed.iter().rposition(|&b| b == b'\n').ok_or_else(|| malformed(2, "missing checksum"))?;
    let (body, tail) = (&bytes[..=split], &trimmed[split + 1..]);
    let checksum_line = body.iter().filter(|&&b| b == b'\n').count() + 1;
    let stored = std::str::from_utf8(tail)
        .ok()
        .and_then(|t| t.strip_prefix("checksum "))
        .filter(|h| h.len() == 8 && h.bytes().all(|b| b.is_ascii_hexdigit()))
        .ok_or_else(|| malformed(checksum_line, "expected `checksum <8 hex digits>`"))?;
    let computed = format!("{:08x}", fnv1a32(body));
    if !stored.eq_ignore_ascii_case(&computed) {
        return Err(KbError::ChecksumMismatch { stored: stored.to_string(), computed });
    }

    let text = std::str::from_utf8(body).map_err(|e| malformed(0, format!("not UTF-8: {e}")))?;
    parse_records(text)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next line split into its keyword and the remaining fields.
    fn record(&mut self, keyword: &str) -> Result<(usize, Vec<&'a str>), KbError> {
        let (i, line) = self
            .inner
            .next()
            .ok_or_else(|| malformed(self.last + 1, format!("missing `{keyword}` record")))?;
        self.last = i + 1;
        let mut fields = line.split(' ');
        if fields.next() != Some(keyword) {
            return Err(malformed(i + 1, format!("expected `{keyword}`, got {line:?}")));
        }
        Ok((i + 1, fields.collect()))
    }
}

fn number<T: std::str::FromStr>(line: usize, field: Option<&&str>, what: &str) -> Result<T, KbError> {
    field
        .and_then(|f| f.parse().ok())
        .ok_or_else(|| malformed(line, format!("bad {what}")))
}

fn exact_fields(line: usize, fields: &[&str], n: usize) -> Result<(), KbError> {
    if fields.len() != n {
        return Err(malformed(line, format!("expected {n} fields, got {}", fields.len())));
    }
    Ok(())
}

fn parse_records(text: &str) -> Result<KnowledgeBase, KbError> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    lines.record(MAGIC)?;

    let (ln, f) = lines.record("grid")?;
    exact_fields(ln, &f, 2)?;
    let grid = GridDims::new(number(ln, f.first(), "rows")?, number(ln, f.get(1), "cols")?)
        .map_err(|e| malformed(ln, e.to_string()))?;

    let (ln, f) = lines.record("regime")?;
    exact_fields(ln, &f, 1)?;
    let regime: Regime = match f[0] {
        "ONE_VS_REST" => Regime::OneVsRest,
        "POSITIVE_ONLY" => Regime::PositiveOnly,
        other => return Err(malformed(ln, format!("unknown regime {other:?}"))),
    };

    let (ln, f) = lines.record("epochs")?;
    exact_fields(ln, &f, 1)?;
    let epochs: u64 = number(ln, f.first(), "epoch count")?;

    let (ln, f) = lines.record("classes")?;
    exact_fields(ln, &f, 1)?;
    let classes: usize = number(ln, f.first(), "class count")?;

    let mut neurons = Vec::with_capacity(classes.min(crate::label::CLASS_COUNT));
    for _ in 0..classes {
        let (ln, f) = lines.record("neuron")?;
        exact_fields(ln, &f, 3)?;
        let label = Label::from_tag(f[0]).map_err(|e| malformed(ln, e.to_string()))?;
        if f[1] != "bias" {
            return Err(malformed(ln, "expected `bias`"));
        }
        let bias: i64 = number(ln, f.get(2), "bias")?;

        let (ln, f) = lines.record("weights")?;
        let weights = f
            .iter()
            .map(|w| w.parse::<i64>().map_err(|_| malformed(ln, format!("bad weight {w:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if weights.len() != grid.len() {
            return Err(KbError::DimensionMismatch {
                label: label.tag(),
                expected: grid.len(),
                actual: weights.len(),
            });
        }
        neurons.push(ClusterNeuron { label, weights, bias });
    }
    if let Some((i, line)) = lines.inner.next() {
        return Err(malformed(i + 1, format!("unexpected trailing record {line:?}")));
    }
    if neurons.windows(2).any(|w| w[0].label >= w[1].label) {
        return Err(malformed(0, "neurons are not in strictly increasing label order"));
    }
    Ok(KnowledgeBase::from_parts(grid, regime, epochs, neurons)?)
}

/// Per-label result of [`diff_kb`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelDelta {
    /// Largest absolute difference over all weights and the bias.
    MaxAbs(u64),
    /// Weight vectors have different lengths.
    Incomparable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KbDiff {
    pub shared_labels: BTreeSet<Label>,
    pub only_left: BTreeSet<Label>,
    pub only_right: BTreeSet<Label>,
    pub per_label_max_abs_delta: BTreeMap<Label, LabelDelta>,
    /// Grid dimensions and regime agree.
    pub metadata_equal: bool,
    pub left_summary: (GridDims, Regime, u64),
    pub right_summary: (GridDims, Regime, u64),
}

impl KbDiff {
    /// True when the two knowledge bases hold the same neurons, weights and
    /// metadata, including the epoch count.
    pub fn is_identical(&self) -> bool {
        self.metadata_equal
            && self.left_summary == self.right_summary
            && self.only_left.is_empty()
            && self.only_right.is_empty()
            && self.per_label_max_abs_delta.values().all(|d| *d == LabelDelta::MaxAbs(0))
    }
}

fn label_list(set: &BTreeSet<Label>) -> String {
    if set.is_empty() {
        return "-".to_string();
    }
    set.iter().map(|l| l.tag()).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for KbDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identical() {
            return writeln!(f, "identical");
        }
        let (lg, lr, le) = self.left_summary;
        let (rg, rr, re) = self.right_summary;
        writeln!(f, "{:<16}{:<24}right", "", "left")?;
        writeln!(f, "{:<16}{:<24}{}", "grid", lg, rg)?;
        writeln!(f, "{:<16}{:<24}{}", "regime", lr, rr)?;
        writeln!(f, "{:<16}{:<24}{}", "epochs", le, re)?;
        writeln!(f, "metadata_equal  {}", self.metadata_equal)?;
        writeln!(f, "only_left       {}", label_list(&self.only_left))?;
        writeln!(f, "only_right      {}", label_list(&self.only_right))?;
        for (label, delta) in &self.per_label_max_abs_delta {
            match delta {
                LabelDelta::MaxAbs(d) => writeln!(f, "{:<16}{}", label.tag(), d)?,
                LabelDelta::Incomparable => writeln!(f, "{:<16}incomparable", label.tag())?,
            }
        }
        Ok(())
    }
}

fn max_abs_delta(a: &ClusterNeuron, b: &ClusterNeuron) -> LabelDelta {
    if a.weights.len() != b.weights.len() {
        return LabelDelta::Incomparable;
    }
    let d = a
        .weights
        .iter()
        .zip(&b.weights)
        .map(|(x, y)| x.abs_diff(*y))
        .chain(std::iter::once(a.bias.abs_diff(b.bias)))
        .max()
        .unwrap_or(0);
    LabelDelta::MaxAbs(d)
}

pub fn diff_kb(left: &KnowledgeBase, right: &KnowledgeBase) -> KbDiff {
    let ls: BTreeSet<Label> = left.labels().collect();
    let rs: BTreeSet<Label> = right.labels().collect();
    let shared: BTreeSet<Label> = ls.intersection(&rs).copied().collect();
    let per_label = shared
        .iter()
        .filter_map(|&l| Some((l, max_abs_delta(left.neuron(l)?, right.neuron(l)?))))
        .collect();
    KbDiff {
        only_left: ls.difference(&rs).copied().collect(),
        only_right: rs.difference(&ls).copied().collect(),
        shared_labels: shared,
        per_label_max_abs_delta: per_label,
        metadata_equal: left.grid() == right.grid() && left.regime() == right.regime(),
        left_summary: (left.grid(), left.regime(), left.epochs_trained()),
        right_summary: (right.grid(), right.regime(), right.epochs_trained()),
    }
}
