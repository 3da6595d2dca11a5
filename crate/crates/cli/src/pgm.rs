//! Netpbm graymaps. Both the plain (`P2`) and raw (`P5`) variants are read
//! and written; `maxval` must be 255 or 65535, and raw 16-bit samples are
//! big-endian.

use std::io::Write;
use std::path::Path;

use dualfb_core::ImageGrid;

use crate::error::{io_err, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    Plain,
    Raw,
}

/// A graymap with samples scaled to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub format: PgmFormat,
    /// Row-major, `value / maxval`.
    pub pixels: Vec<f64>,
}

impl Pgm {
    /// The image as a square grid; rectangular images are rejected.
    pub fn to_grid(&self, path: &Path) -> CliResult<ImageGrid> {
        if self.width != self.height {
            return Err(CliError::Pgm {
                path: path.to_path_buf(),
                msg: format!(
                    "image is {}x{}, a square image is required",
                    self.width, self.height
                ),
            });
        }
        Ok(ImageGrid::new(self.width, self.pixels.clone())?)
    }
}

struct Header {
    format: PgmFormat,
    width: usize,
    height: usize,
    maxval: u16,
    /// Offset of the first payload byte.
    data: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header, String> {
    let format = match bytes.get(..2) {
        Some(b"P2") => PgmFormat::Plain,
        Some(b"P5") => PgmFormat::Raw,
        _ => return Err("not a PGM file (expected P2 or P5 magic)".into()),
    };
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for (i, name) in ["width", "height", "maxval"].iter().enumerate() {
        // whitespace and comments, which run to the end of the line
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|b| *b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(format!("malformed header: missing {name}"));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).unwrap_or_default();
        fields[i] = text
            .parse()
            .map_err(|_| format!("malformed header: {name} {text} is out of range"))?;
    }
    // exactly one whitespace byte separates the header from the payload
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err("malformed header: no whitespace after maxval".into()),
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(format!("malformed header: empty image {width}x{height}"));
    }
    let maxval = match maxval {
        255 => 255,
        65535 => 65535,
        m => return Err(format!("unsupported maxval {m} (expected 255 or 65535)")),
    };
    Ok(Header {
        format,
        width,
        height,
        maxval,
        data: pos,
    })
}

pub fn parse_pgm(bytes: &[u8]) -> Result<Pgm, String> {
    let h = parse_header(bytes)?;
    let count = h.width * h.height;
    let scale = f64::from(h.maxval);
    let payload = &bytes[h.data..];
    let samples: Vec<u16> = match h.format {
        PgmFormat::Raw => {
            let wide = h.maxval > 255;
            let need = if wide { 2 * count } else { count };
            if payload.len() < need {
                return Err(format!(
                    "truncated payload: {} of {need} bytes",
                    payload.len()
                ));
            }
            if wide {
                payload[..need]
                    .chunks_exact(2)
                    .map(|c| u16::from_be_bytes([c[0], c[1]]))
                    .collect()
            } else {
                payload[..need].iter().map(|b| u16::from(*b)).collect()
            }
        }
        PgmFormat::Plain => {
            let text = std::str::from_utf8(payload)
                .map_err(|_| "plain payload is not ASCII".to_string())?;
            let mut out = Vec::with_capacity(count);
            for tok in text.split_ascii_whitespace() {
                if out.len() == count {
                    break;
                }
                let v: u32 = tok.parse().map_err(|_| format!("bad sample {tok:?}"))?;
                if v > u32::from(h.maxval) {
                    return Err(format!("sample {v} exceeds maxval {}", h.maxval));
                }
                out.push(v as u16);
            }
            if out.len() < count {
                return Err(format!(
                    "truncated payload: {} of {count} samples",
                    out.len()
                ));
            }
            out
        }
    };
    if let Some(v) = samples.iter().find(|v| **v > h.maxval) {
        return Err(format!("sample {v} exceeds maxval {}", h.maxval));
    }
    Ok(Pgm {
        width: h.width,
        height: h.height,
        maxval: h.maxval,
        format: h.format,
        pixels: samples.iter().map(|v| f64::from(*v) / scale).collect(),
    })
}

pub fn read_pgm(path: &Path) -> CliResult<Pgm> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    parse_pgm(&bytes).map_err(|msg| CliError::Pgm {
        path: path.to_path_buf(),
        msg,
    })
}

/// Clamp to `[0, 1]`, then round to the nearest level.
pub fn quantize(v: f64, maxval: u16) -> u16 {
    let c = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
    (c * f64::from(maxval)).round() as u16
}

pub fn encode_pgm(
    width: usize,
    height: usize,
    pixels: &[f64],
    maxval: u16,
    format: PgmFormat,
) -> Vec<u8> {
    assert_eq!(pixels.len(), width * height);
    let magic = match format {
        PgmFormat::Plain => "P2",
        PgmFormat::Raw => "P5",
    };
    let mut out = format!("{magic}\n{width} {height}\n{maxval}\n").into_bytes();
    match format {
        PgmFormat::Raw => {
            for v in pixels {
                let q = quantize(*v, maxval);
                if maxval > 255 {
                    out.extend_from_slice(&q.to_be_bytes());
                } else {
                    out.push(q as u8);
                }
            }
        }
        PgmFormat::Plain => {
            for row in pixels.chunks(width) {
                let line: Vec<String> = row
                    .iter()
                    .map(|v| quantize(*v, maxval).to_string())
                    .collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
    }
    out
}

pub fn write_pgm(path: &Path, img: &ImageGrid, maxval: u16, format: PgmFormat) -> CliResult<()> {
    if maxval != 255 && maxval != 65535 {
        return Err(CliError::Pgm {
            path: path.to_path_buf(),
            msg: format!("unsupported maxval {maxval}"),
        });
    }
    let n = img.n();
    let bytes = encode_pgm(n, n, img.pixels(), maxval, format);
    let mut f = std::fs::File::create(path).map_err(io_err(path))?;
    f.write_all(&bytes).map_err(io_err(path))
}
