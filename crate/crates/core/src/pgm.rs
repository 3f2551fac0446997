//! Netpbm PGM (P5 binary, P2 ASCII) reading and writing, maxval 255 only.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    Binary,
    Ascii,
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let data = fs::read(path)?;
    decode_pgm(&data)
}

pub fn save_pgm(image: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(&encode_pgm(image, PgmFormat::Binary))?;
    Ok(())
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    /// Skips whitespace and `#` comments running to end of line.
    fn skip_separators(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&b) = self.data.get(self.pos) {
                    self.pos += 1;
                    if b == b'\n' || b == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_separators();
        let start = self.pos;
        while self.pos < self.data.len() && self.data[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::MalformedHeader(format!("expected {what}")));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedHeader(format!("{what} out of range")))
    }
}

pub fn decode_pgm(data: &[u8]) -> Result<GrayImage> {
    let format = match data.get(..2) {
        Some(b"P5") => PgmFormat::Binary,
        Some(b"P2") => PgmFormat::Ascii,
        _ => return Err(Error::MalformedHeader("missing P5/P2 magic".into())),
    };
    let mut cur = Cursor { data, pos: 2 };
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader("zero dimension".into()));
    }
    if maxval != 255 {
        return Err(Error::MaxvalUnsupported(maxval));
    }
    let expected = width * height;

    let pixels = match format {
        PgmFormat::Binary => {
            // exactly one whitespace byte separates the header from the raster
            match data.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                _ => return Err(Error::MalformedHeader("no separator before raster".into())),
            }
            let raster = &data[cur.pos..];
            if raster.len() < expected {
                return Err(Error::Truncated {
                    expected,
                    found: raster.len(),
                });
            }
            raster[..expected].to_vec()
        }
        PgmFormat::Ascii => {
            let mut pixels = Vec::with_capacity(expected);
            for _ in 0..expected {
                cur.skip_separators();
                if cur.pos >= data.len() {
                    return Err(Error::Truncated {
                        expected,
                        found: pixels.len(),
                    });
                }
                let v = cur.number("sample")?;
                if v > 255 {
                    return Err(Error::MalformedHeader(format!("sample {v} exceeds maxval")));
                }
                pixels.push(v as u8);
            }
            pixels
        }
    };
    GrayImage::new(width, height, pixels)
}

pub fn encode_pgm(image: &GrayImage, format: PgmFormat) -> Vec<u8> {
    match format {
        PgmFormat::Binary => {
            let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
            out.extend_from_slice(image.pixels());
            out
        }
        PgmFormat::Ascii => {
            let mut out = format!("P2\n{} {}\n255\n", image.width(), image.height());
            for row in image.pixels().chunks(image.width()) {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
            out.into_bytes()
        }
    }
}
