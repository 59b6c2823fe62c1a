//! Offline character recognition with a bank of Hebbian membership neurons.
//!
//! The pipeline runs in five stages, each in its own module:
//!
//! - [`imagegrid`]: plain PNM parsing and feature extraction
//!   (binarize, crop to the ink bounding box, block-majority resample,
//!   flatten to a bipolar vector).
//! - [`hebbnet`]: one single-output neuron per character class, trained with
//!   the additive rule `K(new) = K(old) + input × target`, and a classifier
//!   that rejects inputs no neuron claims.
//! - [`kbstore`]: the versioned, checksummed text format for trained
//!   knowledge bases, plus a structural diff between two of them.
//! - [`evaluation`]: success rate, false rejection rate, per-class report
//!   tables and plot data.
//! - [`glyphgen`]: a seeded synthetic corpus of the 52 English letters.
//!
//! [`cli`] wires the stages into the `hebbocr` binary
//! (`gen`, `train`, `test`, `kb-diff`).
//!
//! ```
//! use hebbocr::hebbnet::{KnowledgeBase, Outcome, Regime, TrainingSample};
//! use hebbocr::imagegrid::{FeatureVector, GridDims};
//! use hebbocr::Label;
//!
//! let a = Label::new('A').unwrap();
//! let b = Label::new('B').unwrap();
//! let grid = GridDims::new(1, 2).unwrap();
//! let kb = KnowledgeBase::init_zero(&[a, b], grid, Regime::OneVsRest).unwrap();
//! let x_a = FeatureVector::new(vec![1, 1]).unwrap();
//! let x_b = FeatureVector::new(vec![1, -1]).unwrap();
//! let samples = [
//!     TrainingSample::new(a, x_a.clone()),
//!     TrainingSample::new(b, x_b),
//! ];
//! let kb = kb.train(&samples, 1).unwrap();
//! assert_eq!(kb.classify(&x_a).unwrap().outcome, Outcome::Recognized(a));
//! ```

pub mod cli;
pub mod evaluation;
pub mod glyphgen;
pub mod hebbnet;
pub mod imagegrid;
pub mod kbstore;
mod label;

pub use label::{Label, LabelError};
