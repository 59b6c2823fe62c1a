//! Seeded synthetic corpus of the 52 English letters.
//!
//! Each sample is a built-in 8×8 template centered on a background canvas,
//! shifted and speckled by [`distort`]. Every random draw comes from
//! [`SplitMix64`] seeded with `seed ^ stream_index`, and every file has its
//! own stream index, so a corpus is a pure function of its parameters.

mod splitmix;

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use thiserror::Error;

pub use splitmix::SplitMix64;

use crate::imagegrid::{write_pbm, BinaryGrid, Cell, GridDims};
use crate::label::CLASS_COUNT;
use crate::Label;

/// Name of the manifest written at the root of a generated corpus.
pub const MANIFEST_FILE: &str = "manifest.tsv";

/// Added to the stream index of every test-split file.
pub const TEST_STREAM_OFFSET: u64 = 1_000_000;

const TEMPLATE_DATA: &str = include_str!("templates.txt");

#[derive(Debug, Error)]
pub enum GenError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0} already exists (pass --force to overwrite)")]
    ManifestExists(PathBuf),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("canvas {canvas} is smaller than the {template} template")]
    CanvasTooSmall { canvas: GridDims, template: GridDims },
    #[error("manifest line {line}: {message}")]
    BadManifest { line: usize, message: String },
}

impl GenError {
    fn io(path: &Path) -> impl FnOnce(io::Error) -> GenError + '_ {
        move |source| GenError::Io { path: path.to_path_buf(), source }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlyphTemplate {
    pub label: Label,
    pub bitmap: BinaryGrid,
}

fn parse_templates(text: &str) -> Vec<GlyphTemplate> {
    let mut out = Vec::new();
    let mut lines = text.lines().filter(|l| !l.is_empty() && !l.starts_with('#'));
    while let Some(tag) = lines.next() {
        let label = Label::from_tag(tag).expect("template tag");
        let rows: Vec<&str> = lines.by_ref().take(8).collect();
        let bitmap = BinaryGrid::from_rows(&rows).expect("template rows");
        out.push(GlyphTemplate { label, bitmap });
    }
    out
}

/// The 52 built-in templates in label order.
pub fn templates() -> &'static [GlyphTemplate] {
    static TEMPLATES: OnceLock<Vec<GlyphTemplate>> = OnceLock::new();
    TEMPLATES.get_or_init(|| parse_templates(TEMPLATE_DATA))
}

pub fn template(label: Label) -> &'static GlyphTemplate {
    &templates()[label.class_index()]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionParams {
    /// Per-cell probability of flipping ink and background.
    pub flip_probability: f64,
    /// Largest translation in cells along each axis.
    pub max_shift: usize,
    pub canvas: GridDims,
    pub seed: u64,
}

impl Default for DistortionParams {
    fn default() -> Self {
        DistortionParams {
            flip_probability: 0.0,
            max_shift: 0,
            canvas: GridDims { rows: 10, cols: 10 },
            seed: 0,
        }
    }
}

impl DistortionParams {
    pub fn validate(&self) -> Result<(), GenError> {
        if !(0.0..=1.0).contains(&self.flip_probability) {
            return Err(GenError::InvalidParams(format!(
                "flip probability {} is outside [0, 1]",
                self.flip_probability
            )));
        }
        Ok(())
    }
}

/// Places `t` in the middle of a background canvas; odd leftover space goes
/// below and to the right.
pub fn render_glyph(t: &GlyphTemplate, canvas: GridDims) -> Result<BinaryGrid, GenError> {
    let size = t.bitmap.dims();
    if canvas.rows < size.rows || canvas.cols < size.cols {
        return Err(GenError::CanvasTooSmall { canvas, template: size });
    }
    let top = (canvas.rows - size.rows) / 2;
    let left = (canvas.cols - size.cols) / 2;
    let mut out = BinaryGrid::filled(canvas, Cell::Background);
    for r in 0..size.rows {
        for c in 0..size.cols {
            out.set(top + r, left + c, t.bitmap.get(r, c));
        }
    }
    Ok(out)
}

fn signed_shift(rng: &mut SplitMix64, max_shift: usize) -> i64 {
    rng.next_below(2 * max_shift as u64 + 1) as i64 - max_shift as i64
}

/// Deterministic shift-then-speckle distortion.
///
/// Draws from `SplitMix64::new(p.seed ^ stream_index)` in this order:
///
/// 1. row shift `next_u64() % (2·max_shift + 1) − max_shift`,
/// 2. column shift, same formula,
/// 3. one `next_f64()` per cell in row-major order; the cell flips iff the
///    draw is `< flip_probability`.
///
/// The shift is clamped so the ink bounding box stays on the canvas.
/// All draws are consumed even when `max_shift` or `flip_probability` is 0.
pub fn distort(g: &BinaryGrid, p: &DistortionParams, stream_index: u64) -> BinaryGrid {
    let mut rng = SplitMix64::new(p.seed ^ stream_index);
    let dr = signed_shift(&mut rng, p.max_shift);
    let dc = signed_shift(&mut rng, p.max_shift);

    let mut out = g.clone();
    if let Some((top, left, bottom, right)) = g.ink_bounds() {
        let dr = dr.clamp(-(top as i64), (g.rows() - 1 - bottom) as i64);
        let dc = dc.clamp(-(left as i64), (g.cols() - 1 - right) as i64);
        out = BinaryGrid::filled(g.dims(), Cell::Background);
        for r in top..=bottom {
            for c in left..=right {
                let (nr, nc) = ((r as i64 + dr) as usize, (c as i64 + dc) as usize);
                out.set(nr, nc, g.get(r, c));
            }
        }
    }
    for r in 0..out.rows() {
        for c in 0..out.cols() {
            if rng.next_f64() < p.flip_probability {
                out.set(r, c, out.get(r, c).flipped());
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn dir_name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }

    /// `set × 52 + class_index`, plus [`TEST_STREAM_OFFSET`] for test files.
    pub fn stream_index(self, set: usize, label: Label) -> u64 {
        let base = match self {
            Split::Train => 0,
            Split::Test => TEST_STREAM_OFFSET,
        };
        base + (set * CLASS_COUNT + label.class_index()) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Relative to the corpus root, `/`-separated.
    pub path: String,
    pub label: Label,
    pub set: usize,
    pub stream_index: u64,
}

impl ManifestEntry {
    pub fn split(&self) -> Option<Split> {
        match self.path.split('/').next() {
            Some("train") => Some(Split::Train),
            Some("test") => Some(Split::Test),
            _ => None,
        }
    }
}

/// Index of a corpus: `path<TAB>label<TAB>set<TAB>stream_index` per file,
/// preceded by `#` comment lines recording the generation parameters.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Manifest {
    pub comments: Vec<String>,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        for e in &self.entries {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", e.path, e.label.tag(), e.set, e.stream_index);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Manifest, GenError> {
        let mut m = Manifest::default();
        for (i, line) in text.lines().enumerate() {
            let bad = |message: String| GenError::BadManifest { line: i + 1, message };
            if let Some(c) = line.strip_prefix('#') {
                m.comments.push(c.trim_start().to_string());
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 4 {
                return Err(bad(format!("expected 4 tab-separated fields, got {}", f.len())));
            }
            m.entries.push(ManifestEntry {
                path: f[0].to_string(),
                label: Label::from_tag(f[1]).map_err(|e| bad(e.to_string()))?,
                set: f[2].parse().map_err(|_| bad(format!("bad set {:?}", f[2])))?,
                stream_index: f[3].parse().map_err(|_| bad(format!("bad stream index {:?}", f[3])))?,
            });
        }
        Ok(m)
    }

    /// Reads `<root>/manifest.tsv`.
    pub fn load(root: &Path) -> Result<Manifest, GenError> {
        let path = root.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(GenError::io(&path))?;
        Manifest::parse(&text)
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split() == Some(split))
    }
}

/// File name of one sample, e.g. `upper_A_03.pbm`.
pub fn sample_file_name(label: Label, set: usize) -> String {
    format!("{}_{:02}.pbm", label.tag(), set)
}

/// Renders and distorts one sample of the corpus.
pub fn generate_sample(label: Label, split: Split, set: usize, p: &DistortionParams) -> Result<BinaryGrid, GenError> {
    let base = render_glyph(template(label), p.canvas)?;
    Ok(distort(&base, p, split.stream_index(set, label)))
}

/// Writes `train_sets × 52` training and `test_sets × 52` test bitmaps
/// under `out_dir/train` and `out_dir/test`, plus the manifest.
///
/// Refuses to overwrite an existing manifest unless `force` is set.
pub fn generate_dataset(
    train_sets: usize,
    test_sets: usize,
    p: &DistortionParams,
    out_dir: &Path,
    force: bool,
) -> Result<Manifest, GenError> {
    if train_sets == 0 || test_sets == 0 {
        return Err(GenError::InvalidParams("set counts must be at least 1".into()));
    }
    p.validate()?;
    let manifest_path = out_dir.join(MANIFEST_FILE);
    if manifest_path.exists() && !force {
        return Err(GenError::ManifestExists(manifest_path));
    }

    let mut manifest = Manifest {
        comments: vec![
            "hebbocr synthetic corpus".to_string(),
            format!(
                "train_sets={train_sets} test_sets={test_sets} flip_probability={} max_shift={} canvas={} seed={}",
                p.flip_probability, p.max_shift, p.canvas, p.seed
            ),
        ],
        entries: Vec::with_capacity((train_sets + test_sets) * CLASS_COUNT),
    };
    for (split, sets) in [(Split::Train, train_sets), (Split::Test, test_sets)] {
        let dir = out_dir.join(split.dir_name());
        fs::create_dir_all(&dir).map_err(GenError::io(&dir))?;
        for set in 0..sets {
            for t in templates() {
                let grid = generate_sample(t.label, split, set, p)?;
                let name = sample_file_name(t.label, set);
                let path = dir.join(&name);
                let mut bytes = Vec::new();
                write_pbm(&grid, &mut bytes).map_err(GenError::io(&path))?;
                fs::write(&path, bytes).map_err(GenError::io(&path))?;
                manifest.entries.push(ManifestEntry {
                    path: format!("{}/{}", split.dir_name(), name),
                    label: t.label,
                    set,
                    stream_index: split.stream_index(set, t.label),
                });
            }
        }
    }
    fs::write(&manifest_path, manifest.to_text()).map_err(GenError::io(&manifest_path))?;
    Ok(manifest)
}
