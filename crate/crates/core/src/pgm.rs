//! Portable graymap (PGM) codec.
//!
//! Reads binary `P5` and ASCII `P2` with `maxval <= 255`; `#` comments may
//! appear between header tokens. Writes binary `P5` with `maxval = 255` and
//! no comments.

use std::path::Path;

use crate::error::{Error, Result};
use crate::image::GrayImage;

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self, what: &str) -> Result<(usize, &'a [u8])> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Decode {
                offset: start,
                reason: format!("expected {what}, found end of data"),
            });
        }
        Ok((start, &self.bytes[start..self.pos]))
    }

    fn number(&mut self, what: &str) -> Result<(usize, u32)> {
        let (offset, tok) = self.token(what)?;
        let value = std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| Error::Decode {
                offset,
                reason: format!("{what} is not a non-negative integer"),
            })?;
        Ok((offset, value))
    }
}

/// Decodes a `P5` or `P2` graymap, normalizing each sample to `raw / maxval`.
pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut cur = Cursor { bytes, pos: 0 };
    let (_, magic) = cur.token("magic number")?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        _ => {
            return Err(Error::Decode {
                offset: 0,
                reason: "magic number must be P5 or P2".into(),
            })
        }
    };
    let (woff, width) = cur.number("width")?;
    let (hoff, height) = cur.number("height")?;
    let (moff, maxval) = cur.number("maxval")?;
    if width == 0 {
        return Err(Error::Decode {
            offset: woff,
            reason: "width is zero".into(),
        });
    }
    if height == 0 {
        return Err(Error::Decode {
            offset: hoff,
            reason: "height is zero".into(),
        });
    }
    if maxval == 0 || maxval > 255 {
        return Err(Error::Decode {
            offset: moff,
            reason: format!("maxval {maxval} outside 1..=255"),
        });
    }
    let (width, height) = (width as usize, height as usize);
    let count = width.checked_mul(height).ok_or_else(|| Error::Decode {
        offset: woff,
        reason: "dimensions overflow".into(),
    })?;
    let scale = f64::from(maxval);

    let mut pixels = Vec::with_capacity(count.min(bytes.len()));
    if binary {
        // Exactly one whitespace byte separates maxval from the raster.
        if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
            return Err(Error::Decode {
                offset: cur.pos,
                reason: "missing whitespace after maxval".into(),
            });
        }
        let start = cur.pos + 1;
        let available = bytes.len() - start;
        if available < count {
            return Err(Error::Decode {
                offset: start + available,
                reason: format!("truncated pixel data: {available} of {count} bytes present"),
            });
        }
        for (i, &b) in bytes[start..start + count].iter().enumerate() {
            if u32::from(b) > maxval {
                return Err(Error::Decode {
                    offset: start + i,
                    reason: format!("sample {b} exceeds maxval {maxval}"),
                });
            }
            pixels.push(f64::from(b) / scale);
        }
    } else {
        for _ in 0..count {
            let (offset, v) = cur.number("pixel sample")?;
            if v > maxval {
                return Err(Error::Decode {
                    offset,
                    reason: format!("sample {v} exceeds maxval {maxval}"),
                });
            }
            pixels.push(f64::from(v) / scale);
        }
    }
    GrayImage::new(width, height, pixels)
}

/// Quantizes a unit-interval value to a byte with round-half-up.
#[inline]
pub fn quantize(p: f64) -> u8 {
    (p * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Encodes as binary `P5`, `maxval = 255`.
pub fn save_pgm(img: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.pixels().len());
    out.extend_from_slice(header.as_bytes());
    out.extend(img.pixels().iter().map(|&p| quantize(p)));
    out
}

pub fn read_pgm_file(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    load_pgm(&bytes)
}

pub fn write_pgm_file(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, save_pgm(img)).map_err(|e| Error::io(path, e))
}
