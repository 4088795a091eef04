//! File formats: plain-text frames and complex vectors, 8-bit binary PGM
//! images, flat key=value spec files and the versioned CSV header.
//!
//! Frame files: first line `n N real|complex`, then N whitespace-separated
//! rows of n decimals (2n interleaved re/im when complex). Complex vector
//! files: first line the length, then one `re im` pair per line.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::sensing::Mask2d;

pub const CSV_VERSION_HEADER: &str = "#analysis-lp v1";

pub fn write_frame(path: &Path, frame: &Frame) -> Result<()> {
    let mut out = String::new();
    let kind = if frame.is_real() { "real" } else { "complex" };
    out.push_str(&format!("{} {} {}\n", frame.dim(), frame.len(), kind));
    for v in frame.vectors() {
        let row: Vec<String> = if frame.is_real() {
            v.iter().map(|z| format!("{}", z.re)).collect()
        } else {
            v.iter().flat_map(|z| [format!("{}", z.re), format!("{}", z.im)]).collect()
        };
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_frame(path: &Path) -> Result<Frame> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty frame file".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("bad frame header: {header:?}")));
    }
    let n: usize = parts[0].parse().map_err(|_| Error::Parse("bad dimension".into()))?;
    let count: usize = parts[1].parse().map_err(|_| Error::Parse("bad count".into()))?;
    let complex = match parts[2] {
        "real" => false,
        "complex" => true,
        other => return Err(Error::Parse(format!("unknown kind {other:?}"))),
    };
    let want = if complex { 2 * n } else { n };
    let mut vectors = Vec::with_capacity(count);
    for line in lines.take(count) {
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad number {t:?}"))))
            .collect::<Result<_>>()?;
        if vals.len() != want {
            return Err(Error::Parse(format!("row has {} values, expected {want}", vals.len())));
        }
        let v: Vec<Complex64> = if complex {
            vals.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
        } else {
            vals.iter().map(|&re| Complex64::new(re, 0.0)).collect()
        };
        vectors.push(v);
    }
    if vectors.len() != count {
        return Err(Error::Parse(format!("expected {count} rows, found {}", vectors.len())));
    }
    Frame::new(vectors)
}

pub fn write_complex_vector(path: &Path, v: &[Complex64]) -> Result<()> {
    let mut out = String::with_capacity(v.len() * 32);
    out.push_str(&format!("{}\n", v.len()));
    for z in v {
        out.push_str(&format!("{} {}\n", z.re, z.im));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_complex_vector(path: &Path) -> Result<Vec<Complex64>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let count: usize = lines
        .next()
        .ok_or_else(|| Error::Parse("empty vector file".into()))?
        .trim()
        .parse()
        .map_err(|_| Error::Parse("bad vector length".into()))?;
    let mut v = Vec::with_capacity(count);
    for line in lines {
        let parts: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad number {t:?}"))))
            .collect::<Result<_>>()?;
        if parts.len() != 2 {
            return Err(Error::Parse(format!("expected `re im`, got {line:?}")));
        }
        v.push(Complex64::new(parts[0], parts[1]));
    }
    if v.len() != count {
        return Err(Error::Parse(format!("expected {count} entries, found {}", v.len())));
    }
    Ok(v)
}

pub fn write_pgm(path: &Path, width: usize, height: usize, pixels: &[u8]) -> Result<()> {
    if pixels.len() != width * height {
        return Err(Error::DimensionMismatch { expected: width * height, got: pixels.len() });
    }
    let mut file = fs::File::create(path)?;
    write!(file, "P5\n{width} {height}\n255\n")?;
    file.write_all(pixels)?;
    Ok(())
}

pub fn read_pgm(path: &Path) -> Result<(usize, usize, Vec<u8>)> {
    let bytes = fs::read(path)?;
    // header: magic, width, height, maxval, single whitespace, then raster
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 && pos < bytes.len() {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| Error::Parse("bad pgm header".into()))?.to_string());
    }
    if fields.len() != 4 || fields[0] != "P5" {
        return Err(Error::Parse("not a binary PGM (P5) file".into()));
    }
    let width: usize = fields[1].parse().map_err(|_| Error::Parse("bad width".into()))?;
    let height: usize = fields[2].parse().map_err(|_| Error::Parse("bad height".into()))?;
    let maxval: usize = fields[3].parse().map_err(|_| Error::Parse("bad maxval".into()))?;
    if maxval != 255 {
        return Err(Error::Parse(format!("unsupported maxval {maxval}")));
    }
    pos += 1; // single whitespace after maxval
    let raster = &bytes[pos..];
    if raster.len() < width * height {
        return Err(Error::Parse("truncated PGM raster".into()));
    }
    Ok((width, height, raster[..width * height].to_vec()))
}

/// Writes real image values in [0, 1] as an 8-bit PGM (values clamped).
pub fn write_image_pgm(path: &Path, side: usize, image: &[f64]) -> Result<()> {
    let pixels: Vec<u8> = image
        .iter()
        .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    write_pgm(path, side, side, &pixels)
}

/// Mask PGM: 255 = sampled, 0 = unsampled.
pub fn write_mask_pgm(path: &Path, mask: &Mask2d) -> Result<()> {
    let pixels: Vec<u8> = mask.grid().iter().map(|&b| if b { 255 } else { 0 }).collect();
    write_pgm(path, mask.side, mask.side, &pixels)
}

pub fn read_mask_pgm(path: &Path) -> Result<Mask2d> {
    let (w, h, pixels) = read_pgm(path)?;
    if w != h {
        return Err(Error::InvalidShape(format!("mask must be square, got {w}x{h}")));
    }
    Mask2d::new(w, pixels.iter().map(|&p| p >= 128).collect())
}

/// Flat `key = value` files; `#` starts a comment, blank lines are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(Error::Parse(format!("line {}: expected key=value, got {raw:?}", lineno + 1)));
        };
        let key = line[..eq].trim().to_string();
        let value = line[eq + 1..].trim().to_string();
        if key.is_empty() {
            return Err(Error::Parse(format!("line {}: empty key", lineno + 1)));
        }
        map.insert(key, value);
    }
    Ok(map)
}

pub fn read_key_values(path: &Path) -> Result<BTreeMap<String, String>> {
    parse_key_values(&fs::read_to_string(path)?)
}

/// CSV writer that stamps the schema version comment first.
pub struct CsvWriter {
    file: fs::File,
}

impl CsvWriter {
    pub fn create(path: &Path, columns: &[&str]) -> Result<Self> {
        let mut file = fs::File::create(path)?;
        writeln!(file, "{CSV_VERSION_HEADER}")?;
        writeln!(file, "{}", columns.join(","))?;
        Ok(CsvWriter { file })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        writeln!(self.file, "{}", fields.join(","))?;
        Ok(())
    }
}
