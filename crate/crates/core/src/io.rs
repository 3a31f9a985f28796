//! File formats: two-column text fields, the binary field format, symbol
//! tables, and small write helpers.
//!
//! Binary field layout: an 8-byte little-endian float `length`, an 8-byte
//! little-endian unsigned `n_modes`, then `n_modes` collocation values as
//! 8-byte little-endian floats.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::symbols::SymbolTable;

fn parse_error(path: &Path, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        msg: msg.into(),
    }
}

/// Two-column text: `x value` per line, `#` comments allowed.
pub fn field_to_text(field: &Field) -> String {
    let mut out = String::new();
    for (j, v) in field.values().iter().enumerate() {
        out.push_str(&format!("{:.16e} {:.16e}\n", field.grid().point(j), v));
    }
    out
}

pub fn write_field_text(field: &Field, path: impl AsRef<Path>) -> Result<()> {
    write_string(path, &field_to_text(field))
}

pub fn read_field_text(path: impl AsRef<Path>) -> Result<Field> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_field_text(&text).map_err(|msg| parse_error(path, msg))
}

fn parse_field_text(text: &str) -> std::result::Result<Field, String> {
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split_whitespace();
        let x: f64 = cols
            .next()
            .ok_or_else(|| format!("line {}: missing x column", lineno + 1))?
            .parse()
            .map_err(|_| format!("line {}: bad x value", lineno + 1))?;
        let v: f64 = cols
            .next()
            .ok_or_else(|| format!("line {}: missing value column", lineno + 1))?
            .parse()
            .map_err(|_| format!("line {}: bad value", lineno + 1))?;
        xs.push(x);
        vs.push(v);
    }
    if xs.len() < 8 {
        return Err(format!("only {} samples; need at least 8", xs.len()));
    }
    let n = xs.len();
    let spacing = xs[1] - xs[0];
    if !(spacing > 0.0) {
        return Err("abscissae must be increasing".into());
    }
    let length = spacing * n as f64;
    for (j, &x) in xs.iter().enumerate() {
        if (x - xs[0] - j as f64 * spacing).abs() > 1e-9 * length {
            return Err(format!("non-uniform spacing at sample {j}"));
        }
    }
    let grid = Grid::new(length, n).map_err(|e| e.to_string())?;
    Field::from_values(&grid, vs).map_err(|e| e.to_string())
}

pub fn write_field_binary(field: &Field, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut out = Vec::with_capacity(16 + 8 * field.n_modes());
    out.extend_from_slice(&field.grid().length().to_le_bytes());
    out.extend_from_slice(&(field.n_modes() as u64).to_le_bytes());
    for v in field.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let mut f = fs::File::create(path)?;
    f.write_all(&out)?;
    Ok(())
}

pub fn read_field_binary(path: impl AsRef<Path>) -> Result<Field> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    if bytes.len() < 16 {
        return Err(parse_error(path, "truncated header"));
    }
    let length = f64::from_le_bytes(bytes[0..8].try_into().unwrap());
    let n_modes = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let expected = 16 + 8 * n_modes;
    if bytes.len() != expected {
        return Err(parse_error(
            path,
            format!("payload is {} bytes, expected {expected}", bytes.len()),
        ));
    }
    let grid = Grid::new(length, n_modes)?;
    let values = bytes[16..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Field::from_values(&grid, values)
}

/// Read a field from either format: text when the file parses as such,
/// binary otherwise.
pub fn read_field_auto(path: impl AsRef<Path>) -> Result<Field> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    if let Ok(text) = std::str::from_utf8(&bytes) {
        if let Ok(field) = parse_field_text(text) {
            return Ok(field);
        }
    }
    read_field_binary(path)
}

/// Load a custom symbol table from two-column text `(xi, m(xi))`.
pub fn load_symbol_table(path: impl AsRef<Path>) -> Result<SymbolTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split_whitespace();
        let parse = |s: Option<&str>, what: &str| -> Result<f64> {
            s.ok_or_else(|| parse_error(path, format!("line {}: missing {what}", lineno + 1)))?
                .parse()
                .map_err(|_| parse_error(path, format!("line {}: bad {what}", lineno + 1)))
        };
        let xi = parse(cols.next(), "xi")?;
        let m = parse(cols.next(), "m")?;
        samples.push((xi, m));
    }
    SymbolTable::new(samples)
}

/// Write a string, creating parent directories as needed.
pub fn write_string(path: impl AsRef<Path>, contents: &str) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("whitham-io-tests");
        fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn text_round_trip_is_exact() {
        let grid = Grid::new(2.0 * PI, 64).unwrap();
        let f = Field::from_fn(&grid, |x| x.sin() + 0.25 * (3.0 * x).cos());
        let path = tmp("field.txt");
        write_field_text(&f, &path).unwrap();
        let g = read_field_text(&path).unwrap();
        assert_eq!(g.n_modes(), 64);
        assert!((g.grid().length() - 2.0 * PI).abs() < 1e-12);
        for (a, b) in f.values().iter().zip(g.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn binary_round_trip_is_exact() {
        let grid = Grid::new(17.5, 128).unwrap();
        let f = Field::from_fn(&grid, |x| (0.3 * x).sin());
        let path = tmp("field.bin");
        write_field_binary(&f, &path).unwrap();
        let g = read_field_binary(&path).unwrap();
        assert_eq!(g.grid().length().to_bits(), 17.5f64.to_bits());
        for (a, b) in f.values().iter().zip(g.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        // Auto-detection picks the binary reader.
        let h = read_field_auto(&path).unwrap();
        assert_eq!(h.n_modes(), 128);
    }

    #[test]
    fn auto_detection_reads_text() {
        let grid = Grid::new(1.0, 16).unwrap();
        let f = Field::from_fn(&grid, |x| x);
        let path = tmp("field-auto.txt");
        write_field_text(&f, &path).unwrap();
        assert_eq!(read_field_auto(&path).unwrap().n_modes(), 16);
    }

    #[test]
    fn corrupt_binary_is_rejected() {
        let path = tmp("bad.bin");
        fs::write(&path, [1u8, 2, 3]).unwrap();
        assert!(read_field_binary(&path).is_err());
    }

    #[test]
    fn symbol_table_loads() {
        let path = tmp("table.txt");
        fs::write(&path, "# xi m\n0 1.0\n1 0.5\n2 0.25\n").unwrap();
        let table = load_symbol_table(&path).unwrap();
        assert_eq!(table.range(), (0.0, 2.0));
    }
}
