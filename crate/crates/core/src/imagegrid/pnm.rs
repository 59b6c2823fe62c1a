//! Plain (ASCII) Netpbm reader for P1 bitmaps and P2 graymaps.
//! https://netpbm.sourceforge.net/doc/pbm.html

use std::io::{self, Write};

use super::{BinaryGrid, Cell, ImageError, RasterImage};

/// Maxval assigned to P1 images, whose "1" bit means black.
pub const PBM_MAXVAL: u16 = 255;

struct Tokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Tokens { bytes, pos: 0 }
    }

    fn skip_blank(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&b) = self.bytes.get(self.pos) {
                    if b == b'\n' || b == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn next_token(&mut self) -> Option<&'a [u8]> {
        self.skip_blank();
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    // P1 rasters may pack digits without separators.
    fn next_bit(&mut self) -> Option<u8> {
        self.skip_blank();
        let b = *self.bytes.get(self.pos)?;
        self.pos += 1;
        Some(b)
    }
}

fn header_number(tokens: &mut Tokens<'_>, what: &str) -> Result<u32, ImageError> {
    let tok = tokens
        .next_token()
        .ok_or_else(|| ImageError::MalformedHeader(format!("missing {what}")))?;
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse::<u32>().ok())
        .ok_or_else(|| {
            ImageError::MalformedHeader(format!(
                "{what} is not a number: {:?}",
                String::from_utf8_lossy(tok)
            ))
        })
}

/// Parses a plain PNM file (`P1` or `P2`).
///
/// P1 ink bits (`1`) become pixel value 0 and background bits become
/// [`PBM_MAXVAL`], so dark is always low. Pixels are read row-major from
/// the top-left corner; anything after the last pixel is ignored.
pub fn parse_pnm(bytes: &[u8]) -> Result<RasterImage, ImageError> {
    let mut tokens = Tokens::new(bytes);
    let magic = tokens
        .next_token()
        .ok_or_else(|| ImageError::MalformedHeader("empty input".into()))?;
    let is_bitmap = match magic {
        b"P1" => true,
        b"P2" => false,
        other => {
            return Err(ImageError::MalformedHeader(format!(
                "unsupported magic {:?}",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let width = header_number(&mut tokens, "width")?;
    let height = header_number(&mut tokens, "height")?;
    if width == 0 || height == 0 {
        return Err(ImageError::MalformedHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    let maxval = if is_bitmap {
        PBM_MAXVAL
    } else {
        let m = header_number(&mut tokens, "maxval")?;
        if m == 0 || m > u16::MAX as u32 {
            return Err(ImageError::MalformedHeader(format!("maxval {m} out of 1..65535")));
        }
        m as u16
    };

    let expected = width as usize * height as usize;
    let mut pixels = Vec::with_capacity(expected);
    while pixels.len() < expected {
        let index = pixels.len();
        let value = if is_bitmap {
            match tokens.next_bit() {
                Some(b'1') => 0,
                Some(b'0') => PBM_MAXVAL,
                Some(b) => {
                    return Err(ImageError::InvalidPixel {
                        index,
                        token: (b as char).to_string(),
                    })
                }
                None => return Err(ImageError::TruncatedData { expected, found: index }),
            }
        } else {
            let tok = tokens
                .next_token()
                .ok_or(ImageError::TruncatedData { expected, found: index })?;
            let text = String::from_utf8_lossy(tok);
            let v: u64 = text.parse().map_err(|_| ImageError::InvalidPixel {
                index,
                token: text.to_string(),
            })?;
            if v > maxval as u64 {
                return Err(ImageError::ValueOutOfRange { index, value: v, maxval });
            }
            v as u16
        };
        pixels.push(value);
    }
    RasterImage::new(width as usize, height as usize, maxval, pixels)
}

/// Writes a grid as a plain P1 bitmap, one raster row per line.
pub fn write_pbm<W: Write>(grid: &BinaryGrid, mut sink: W) -> io::Result<usize> {
    let mut out = format!("P1\n{} {}\n", grid.cols(), grid.rows());
    for r in 0..grid.rows() {
        let row: Vec<&str> = (0..grid.cols())
            .map(|c| match grid.get(r, c) {
                Cell::Ink => "1",
                Cell::Background => "0",
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    sink.write_all(out.as_bytes())?;
    Ok(out.len())
}
