use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Number of character classes: 26 capital and 26 small English letters.
pub const CLASS_COUNT: usize = 52;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("'{0}' is not an English letter")]
    NotALetter(char),
    #[error("unrecognized label tag {0:?} (expected upper_X or lower_x)")]
    BadTag(String),
}

/// A case-distinguished English letter class.
///
/// Ordering follows code points, so every capital sorts before every
/// small letter. The textual tag (`upper_A`, `lower_a`) is what appears in
/// file names, knowledge-base files and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(char);

impl Label {
    pub fn new(c: char) -> Result<Self, LabelError> {
        if c.is_ascii_alphabetic() {
            Ok(Label(c))
        } else {
            Err(LabelError::NotALetter(c))
        }
    }

    /// All 52 labels in code-point order (`A`..`Z`, then `a`..`z`).
    pub fn all() -> impl Iterator<Item = Label> {
        ('A'..='Z').chain('a'..='z').map(Label)
    }

    pub fn from_class_index(index: usize) -> Option<Self> {
        Label::all().nth(index)
    }

    pub fn as_char(self) -> char {
        self.0
    }

    /// Position in [`Label::all`]: `A` is 0, `Z` is 25, `a` is 26, `z` is 51.
    pub fn class_index(self) -> usize {
        if self.0.is_ascii_uppercase() {
            (self.0 as u8 - b'A') as usize
        } else {
            26 + (self.0 as u8 - b'a') as usize
        }
    }

    pub fn tag(self) -> String {
        if self.0.is_ascii_uppercase() {
            format!("upper_{}", self.0)
        } else {
            format!("lower_{}", self.0)
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self, LabelError> {
        let bad = || LabelError::BadTag(tag.to_string());
        let (case, letter) = tag.split_once('_').ok_or_else(bad)?;
        let mut chars = letter.chars();
        let c = match (chars.next(), chars.next()) {
            (Some(c), None) => c,
            _ => return Err(bad()),
        };
        match case {
            "upper" if c.is_ascii_uppercase() => Ok(Label(c)),
            "lower" if c.is_ascii_lowercase() => Ok(Label(c)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&self.tag())
    }
}

impl FromStr for Label {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::from_tag(s)
    }
}
