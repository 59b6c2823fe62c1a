//! Raster input and bipolar feature extraction.
//!
//! The standard pipeline is [`binarize`] → [`crop_to_bounding_box`] →
//! [`resample_to_grid`] → [`to_feature_vector`], bundled as
//! [`ExtractionConfig::extract`]. Every step is a pure function.

mod pnm;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use pnm::{parse_pnm, write_pbm, PBM_MAXVAL};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImageError {
    #[error("malformed PNM header: {0}")]
    MalformedHeader(String),
    #[error("pixel {index} has value {value} above maxval {maxval}")]
    ValueOutOfRange { index: usize, value: u64, maxval: u16 },
    #[error("pixel {index} is not a valid sample: {token:?}")]
    InvalidPixel { index: usize, token: String },
    #[error("expected {expected} pixels, found {found}")]
    TruncatedData { expected: usize, found: usize },
    #[error("image has no ink")]
    NoInk,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },
    #[error("invalid image: {0}")]
    Invalid(String),
}

/// Grayscale pixel rectangle, row-major, low values dark.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    maxval: u16,
    pixels: Vec<u16>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, maxval: u16, pixels: Vec<u16>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 || maxval == 0 {
            return Err(ImageError::Invalid(format!(
                "{width}x{height} with maxval {maxval}"
            )));
        }
        if pixels.len() != width * height {
            return Err(ImageError::DimensionMismatch {
                expected: format!("{} pixels", width * height),
                actual: format!("{} pixels", pixels.len()),
            });
        }
        if let Some((index, &value)) = pixels.iter().enumerate().find(|(_, &p)| p > maxval) {
            return Err(ImageError::ValueOutOfRange { index, value: value as u64, maxval });
        }
        Ok(RasterImage { width, height, maxval, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn maxval(&self) -> u16 {
        self.maxval
    }

    pub fn pixels(&self) -> &[u16] {
        &self.pixels
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Ink,
    Background,
}

impl Cell {
    pub fn is_ink(self) -> bool {
        self == Cell::Ink
    }

    pub fn flipped(self) -> Cell {
        match self {
            Cell::Ink => Cell::Background,
            Cell::Background => Cell::Ink,
        }
    }
}

/// Row and column counts of a grid, both at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridDims {
    pub rows: usize,
    pub cols: usize,
}

impl GridDims {
    pub fn new(rows: usize, cols: usize) -> Result<Self, ImageError> {
        if rows == 0 || cols == 0 {
            return Err(ImageError::Invalid(format!("grid {rows}x{cols} is empty")));
        }
        Ok(GridDims { rows, cols })
    }

    pub fn len(self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }
}

impl Default for GridDims {
    fn default() -> Self {
        GridDims { rows: 16, cols: 16 }
    }
}

impl fmt::Display for GridDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&format!("{}x{}", self.rows, self.cols))
    }
}

impl FromStr for GridDims {
    type Err = ImageError;

    /// Parses `RxC`, e.g. `16x16`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ImageError::Invalid(format!("grid {s:?} is not of the form RxC"));
        let (r, c) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let rows = r.trim().parse().map_err(|_| bad())?;
        let cols = c.trim().parse().map_err(|_| bad())?;
        GridDims::new(rows, cols)
    }
}

/// Rectangle of ink/background cells, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryGrid {
    dims: GridDims,
    cells: Vec<Cell>,
}

impl BinaryGrid {
    pub fn new(dims: GridDims, cells: Vec<Cell>) -> Result<Self, ImageError> {
        if cells.len() != dims.len() {
            return Err(ImageError::DimensionMismatch {
                expected: format!("{} cells", dims.len()),
                actual: format!("{} cells", cells.len()),
            });
        }
        Ok(BinaryGrid { dims, cells })
    }

    pub fn filled(dims: GridDims, cell: Cell) -> Self {
        BinaryGrid { dims, cells: vec![cell; dims.len()] }
    }

    /// Builds a grid from text rows where `#` is ink and `.` is background.
    pub fn from_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self, ImageError> {
        let width = rows.first().map(|r| r.as_ref().chars().count()).unwrap_or(0);
        let dims = GridDims::new(rows.len(), width)?;
        let mut cells = Vec::with_capacity(dims.len());
        for row in rows {
            let row = row.as_ref();
            if row.chars().count() != width {
                return Err(ImageError::Invalid(format!("ragged row {row:?}")));
            }
            for ch in row.chars() {
                cells.push(match ch {
                    '#' => Cell::Ink,
                    '.' => Cell::Background,
                    other => return Err(ImageError::Invalid(format!("unexpected {other:?} in grid"))),
                });
            }
        }
        Ok(BinaryGrid { dims, cells })
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn rows(&self) -> usize {
        self.dims.rows
    }

    pub fn cols(&self) -> usize {
        self.dims.cols
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> Cell {
        self.cells[row * self.dims.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, cell: Cell) {
        self.cells[row * self.dims.cols + col] = cell;
    }

    pub fn ink_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_ink()).count()
    }

    /// Inclusive `(top, left, bottom, right)` of the ink, or `None` if blank.
    pub fn ink_bounds(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bounds: Option<(usize, usize, usize, usize)> = None;
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                if self.get(r, c).is_ink() {
                    bounds = Some(match bounds {
                        None => (r, c, r, c),
                        Some((t, l, b, rt)) => (t.min(r), l.min(c), b.max(r), rt.max(c)),
                    });
                }
            }
        }
        bounds
    }
}

impl fmt::Display for BinaryGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                f.write_str(if self.get(r, c).is_ink() { "#" } else { "." })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Fixed-length vector of bipolar values: `+1` for ink, `-1` for background.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureVector(Vec<i8>);

impl FeatureVector {
    pub fn new(values: Vec<i8>) -> Result<Self, ImageError> {
        if let Some(v) = values.iter().find(|&&v| v != 1 && v != -1) {
            return Err(ImageError::Invalid(format!("feature value {v} is not bipolar")));
        }
        Ok(FeatureVector(values))
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Inverse of [`to_feature_vector`].
    pub fn to_grid(&self, dims: GridDims) -> Result<BinaryGrid, ImageError> {
        let cells = self
            .0
            .iter()
            .map(|&v| if v > 0 { Cell::Ink } else { Cell::Background })
            .collect();
        BinaryGrid::new(dims, cells)
    }
}

/// Marks a pixel as ink iff it is darker than `threshold × maxval`.
///
/// `threshold` is a fraction of the gray range; callers validate it is in
/// `[0, 1]`.
pub fn binarize(img: &RasterImage, threshold: f64) -> BinaryGrid {
    let cutoff = threshold * img.maxval as f64;
    let cells = img
        .pixels
        .iter()
        .map(|&p| if (p as f64) < cutoff { Cell::Ink } else { Cell::Background })
        .collect();
    BinaryGrid {
        dims: GridDims { rows: img.height, cols: img.width },
        cells,
    }
}

/// Smallest sub-rectangle containing every ink cell.
pub fn crop_to_bounding_box(grid: &BinaryGrid) -> Result<BinaryGrid, ImageError> {
    let (top, left, bottom, right) = grid.ink_bounds().ok_or(ImageError::NoInk)?;
    let dims = GridDims { rows: bottom - top + 1, cols: right - left + 1 };
    let mut cells = Vec::with_capacity(dims.len());
    for r in top..=bottom {
        cells.extend_from_slice(&grid.cells[r * grid.cols() + left..=r * grid.cols() + right]);
    }
    Ok(BinaryGrid { dims, cells })
}

// Source span [start, end) covered by target index `i` of `target` cells,
// widened to one cell when upsampling.
fn source_span(i: usize, source: usize, target: usize) -> (usize, usize) {
    let start = i * source / target;
    let end = ((i + 1) * source / target).max(start + 1);
    (start, end)
}

/// Block-majority resampling to `target` dimensions; ties go to ink.
pub fn resample_to_grid(grid: &BinaryGrid, target: GridDims) -> BinaryGrid {
    let mut cells = Vec::with_capacity(target.len());
    for r in 0..target.rows {
        let (r0, r1) = source_span(r, grid.rows(), target.rows);
        for c in 0..target.cols {
            let (c0, c1) = source_span(c, grid.cols(), target.cols);
            let mut ink = 0usize;
            for sr in r0..r1 {
                for sc in c0..c1 {
                    if grid.get(sr, sc).is_ink() {
                        ink += 1;
                    }
                }
            }
            let total = (r1 - r0) * (c1 - c0);
            cells.push(if 2 * ink >= total { Cell::Ink } else { Cell::Background });
        }
    }
    BinaryGrid { dims: target, cells }
}

/// Row-major flatten of a grid that already has the `expected` dimensions.
pub fn to_feature_vector(grid: &BinaryGrid, expected: GridDims) -> Result<FeatureVector, ImageError> {
    if grid.dims != expected {
        return Err(ImageError::DimensionMismatch {
            expected: expected.to_string(),
            actual: grid.dims.to_string(),
        });
    }
    Ok(FeatureVector(
        grid.cells.iter().map(|c| if c.is_ink() { 1 } else { -1 }).collect(),
    ))
}

/// Parameters of the standard extraction pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionConfig {
    pub grid: GridDims,
    /// Fraction of maxval below which a pixel counts as ink.
    pub threshold: f64,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig { grid: GridDims::default(), threshold: 0.5 }
    }
}

impl ExtractionConfig {
    pub fn extract(&self, img: &RasterImage) -> Result<FeatureVector, ImageError> {
        self.extract_grid(&binarize(img, self.threshold))
    }

    /// Pipeline entry for an already binarized grid.
    pub fn extract_grid(&self, grid: &BinaryGrid) -> Result<FeatureVector, ImageError> {
        let cropped = crop_to_bounding_box(grid)?;
        to_feature_vector(&resample_to_grid(&cropped, self.grid), self.grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dims(r: usize, c: usize) -> GridDims {
        GridDims::new(r, c).unwrap()
    }

    #[test]
    fn binarize_extremes() {
        let img = RasterImage::new(2, 2, 255, vec![0, 255, 255, 0]).unwrap();
        let g = binarize(&img, 0.5);
        assert_eq!(g.cells(), &[Cell::Ink, Cell::Background, Cell::Background, Cell::Ink]);
        assert_eq!(g.dims(), dims(2, 2));
    }

    #[test]
    fn binarize_all_white_is_background() {
        let img = RasterImage::new(3, 1, 40, vec![40; 3]).unwrap();
        for t in [0.0, 0.3, 0.5, 1.0] {
            assert_eq!(binarize(&img, t).ink_count(), 0);
        }
    }

    #[test]
    fn binarize_midpoint_cutoff() {
        // cutoff 127.5: 100 < 127.5 <= 200
        let img = RasterImage::new(2, 1, 255, vec![100, 200]).unwrap();
        assert_eq!(binarize(&img, 0.5).cells(), &[Cell::Ink, Cell::Background]);
    }

    #[test]
    fn raster_invariants() {
        assert!(RasterImage::new(2, 2, 255, vec![0; 3]).is_err());
        assert!(RasterImage::new(1, 1, 10, vec![11]).is_err());
        assert!(RasterImage::new(0, 1, 10, vec![]).is_err());
    }

    #[test]
    fn crop_single_cell() {
        let mut g = BinaryGrid::filled(dims(5, 5), Cell::Background);
        g.set(2, 3, Cell::Ink);
        let c = crop_to_bounding_box(&g).unwrap();
        assert_eq!(c, BinaryGrid::from_rows(&["#"]).unwrap());
    }

    #[test]
    fn crop_full_extent_is_identity() {
        let g = BinaryGrid::from_rows(&["#..", "...", "..#"]).unwrap();
        assert_eq!(crop_to_bounding_box(&g).unwrap(), g);
    }

    #[test]
    fn crop_blank_is_no_ink() {
        let g = BinaryGrid::filled(dims(4, 3), Cell::Background);
        assert_eq!(crop_to_bounding_box(&g), Err(ImageError::NoInk));
    }

    #[test]
    fn resample_same_size_is_identity() {
        let g = BinaryGrid::from_rows(&["#..#", ".##.", "...."]).unwrap();
        assert_eq!(resample_to_grid(&g, g.dims()), g);
    }

    #[test]
    fn resample_all_ink_down() {
        let g = BinaryGrid::filled(dims(2, 2), Cell::Ink);
        assert_eq!(resample_to_grid(&g, dims(1, 1)).cells(), &[Cell::Ink]);
    }

    #[test]
    fn resample_checkerboard_ties_to_ink() {
        let g = BinaryGrid::from_rows(&["#.#.", ".#.#", "#.#.", ".#.#"]).unwrap();
        assert_eq!(resample_to_grid(&g, dims(2, 2)), BinaryGrid::filled(dims(2, 2), Cell::Ink));
    }

    #[test]
    fn resample_upsamples_by_nearest_source() {
        let g = BinaryGrid::from_rows(&["#.", ".#"]).unwrap();
        let up = resample_to_grid(&g, dims(4, 4));
        assert_eq!(up, BinaryGrid::from_rows(&["##..", "##..", "..##", "..##"]).unwrap());
        let odd = resample_to_grid(&BinaryGrid::from_rows(&["#.."]).unwrap(), dims(1, 5));
        // spans: [0,1) [0,1) [1,2) [1,2) [2,3)
        assert_eq!(odd, BinaryGrid::from_rows(&["##..."]).unwrap());
    }

    #[test]
    fn feature_vector_mapping() {
        let g = BinaryGrid::from_rows(&["#."]).unwrap();
        assert_eq!(to_feature_vector(&g, dims(1, 2)).unwrap().values(), &[1, -1]);
        let blank = BinaryGrid::filled(dims(2, 2), Cell::Background);
        assert_eq!(to_feature_vector(&blank, dims(2, 2)).unwrap().values(), &[-1, -1, -1, -1]);
        let diag = BinaryGrid::from_rows(&["#.", ".#"]).unwrap();
        assert_eq!(to_feature_vector(&diag, dims(2, 2)).unwrap().values(), &[1, -1, -1, 1]);
        assert!(matches!(
            to_feature_vector(&diag, dims(1, 4)),
            Err(ImageError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn feature_vector_rejects_non_bipolar() {
        assert!(FeatureVector::new(vec![1, 0]).is_err());
        assert!(FeatureVector::new(vec![1, -1, 2]).is_err());
    }

    #[test]
    fn grid_dims_parse() {
        assert_eq!("16x16".parse::<GridDims>().unwrap(), dims(16, 16));
        assert_eq!("3X7".parse::<GridDims>().unwrap(), dims(3, 7));
        for bad in ["16", "0x4", "ax4", "4x", ""] {
            assert!(bad.parse::<GridDims>().is_err(), "{bad}");
        }
    }

    #[test]
    fn extraction_blank_image_is_no_ink() {
        let img = RasterImage::new(4, 4, 255, vec![255; 16]).unwrap();
        assert_eq!(ExtractionConfig::default().extract(&img), Err(ImageError::NoInk));
    }

    fn arb_grid(max: usize) -> impl Strategy<Value = BinaryGrid> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec(any::<bool>(), r * c).prop_map(move |bits| {
                let cells = bits.into_iter().map(|b| if b { Cell::Ink } else { Cell::Background }).collect();
                BinaryGrid::new(GridDims { rows: r, cols: c }, cells).unwrap()
            })
        })
    }

    fn arb_image() -> impl Strategy<Value = RasterImage> {
        (1usize..8, 1usize..8, 1u16..=1000).prop_flat_map(|(w, h, m)| {
            proptest::collection::vec(0..=m, w * h)
                .prop_map(move |px| RasterImage::new(w, h, m, px).unwrap())
        })
    }

    proptest! {
        #[test]
        fn feature_round_trip(r in 1usize..6, c in 1usize..6, seed in any::<u64>()) {
            let d = dims(r, c);
            let values: Vec<i8> = (0..d.len()).map(|i| if (seed >> (i % 64)) & 1 == 1 { 1 } else { -1 }).collect();
            let fv = FeatureVector::new(values).unwrap();
            let back = to_feature_vector(&fv.to_grid(d).unwrap(), d).unwrap();
            prop_assert_eq!(back, fv);
        }

        #[test]
        fn resample_is_idempotent(g in arb_grid(12), r in 1usize..10, c in 1usize..10) {
            let once = resample_to_grid(&g, dims(r, c));
            prop_assert_eq!(resample_to_grid(&once, dims(r, c)), once);
        }

        #[test]
        fn crop_touches_all_borders(g in arb_grid(10)) {
            if let Ok(c) = crop_to_bounding_box(&g) {
                let last_r = c.rows() - 1;
                let last_c = c.cols() - 1;
                prop_assert!((0..c.cols()).any(|x| c.get(0, x).is_ink()));
                prop_assert!((0..c.cols()).any(|x| c.get(last_r, x).is_ink()));
                prop_assert!((0..c.rows()).any(|y| c.get(y, 0).is_ink()));
                prop_assert!((0..c.rows()).any(|y| c.get(y, last_c).is_ink()));
                prop_assert_eq!(c.ink_count(), g.ink_count());
            } else {
                prop_assert_eq!(g.ink_count(), 0);
            }
        }

        #[test]
        fn binarize_is_monotone(img in arb_image(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let low = binarize(&img, lo);
            let high = binarize(&img, hi);
            for (x, y) in low.cells().iter().zip(high.cells()) {
                prop_assert!(!x.is_ink() || y.is_ink());
            }
        }

        #[test]
        fn padding_does_not_change_features(
            img in arb_image(),
            top in 0usize..4, bottom in 0usize..4, left in 0usize..4, right in 0usize..4,
        ) {
            let w = img.width() + left + right;
            let h = img.height() + top + bottom;
            let mut px = vec![img.maxval(); w * h];
            for r in 0..img.height() {
                for c in 0..img.width() {
                    px[(r + top) * w + c + left] = img.pixels()[r * img.width() + c];
                }
            }
            let padded = RasterImage::new(w, h, img.maxval(), px).unwrap();
            let cfg = ExtractionConfig { grid: dims(5, 4), threshold: 0.5 };
            prop_assert_eq!(cfg.extract(&padded), cfg.extract(&img));
        }
    }
}
