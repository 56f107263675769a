//! Matrix and dataset files.
//!
//! Two on-disk formats are supported: headerless numeric CSV and DIVM, a
//! little-endian binary matrix:
//!
//! | offset | size | field                         |
//! |--------|------|-------------------------------|
//! | 0      | 4    | magic `b"DIVM"`               |
//! | 4      | 2    | version, `u16` = 1            |
//! | 6      | 2    | reserved, zero                |
//! | 8      | 4    | rows, `u32`                   |
//! | 12     | 4    | cols, `u32`                   |
//! | 16     | 8·rows·cols | `f64` payload, row-major |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use diva_core::{Dataset, LabelKind, Matrix};

use crate::error::{Error, Result};

pub const DIVM_MAGIC: [u8; 4] = *b"DIVM";
pub const DIVM_VERSION: u16 = 1;
/// Header size after the magic.
pub const DIVM_HEADER_LEN: usize = 12;

/// Largest accepted integer class label (exclusive).
pub const MAX_CLASS_LABEL: u64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Divm,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Divm => "divm",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "divm" => Ok(Format::Divm),
            other => Err(format!("unknown format '{other}', expected csv or divm")),
        }
    }
}

/// Encodes a matrix as DIVM bytes.
pub fn encode_divm(matrix: &Matrix) -> Result<Vec<u8>> {
    let rows = u32::try_from(matrix.rows())
        .map_err(|_| Error::Invalid(format!("{} rows do not fit in u32", matrix.rows())))?;
    let cols = u32::try_from(matrix.cols())
        .map_err(|_| Error::Invalid(format!("{} columns do not fit in u32", matrix.cols())))?;
    let mut out = Vec::with_capacity(4 + DIVM_HEADER_LEN + 8 * matrix.as_slice().len());
    out.extend_from_slice(&DIVM_MAGIC);
    out.extend_from_slice(&DIVM_VERSION.to_le_bytes());
    out.extend_from_slice(&[0, 0]);
    out.extend_from_slice(&rows.to_le_bytes());
    out.extend_from_slice(&cols.to_le_bytes());
    for v in matrix.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// Decodes DIVM bytes. `path` only labels errors.
pub fn decode_divm(bytes: &[u8], path: &Path) -> Result<Matrix> {
    if bytes.len() < 4 + DIVM_HEADER_LEN {
        return Err(Error::format(path, "truncated DIVM header"));
    }
    if bytes[..4] != DIVM_MAGIC {
        return Err(Error::format(path, "bad magic, expected DIVM"));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != DIVM_VERSION {
        return Err(Error::format(
            path,
            format!("unsupported DIVM version {version}"),
        ));
    }
    if bytes[6] != 0 || bytes[7] != 0 {
        return Err(Error::format(path, "reserved header bytes must be zero"));
    }
    let rows = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let cols = u32::from_le_bytes(bytes[12..16].try_into().expect("4 bytes")) as usize;
    let payload = &bytes[16..];
    let expected = rows
        .checked_mul(cols)
        .and_then(|c| c.checked_mul(8))
        .ok_or_else(|| Error::format(path, "matrix size overflows"))?;
    if payload.len() != expected {
        return Err(Error::format(
            path,
            format!(
                "payload is {} bytes, header says {rows}x{cols} ({expected} bytes)",
                payload.len()
            ),
        ));
    }
    let data = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok(Matrix::from_vec(rows, cols, data)?)
}

pub fn read_divm(path: &Path) -> Result<Matrix> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|f| BufReader::new(f).read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    decode_divm(&bytes, path)
}

pub fn write_divm(path: &Path, matrix: &Matrix) -> Result<()> {
    let bytes = encode_divm(matrix)?;
    write_file(path, &bytes)
}

/// Reads a headerless numeric CSV. Every row must have the same number of
/// cells and every cell must be a finite number.
pub fn read_csv(path: &Path) -> Result<Matrix> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::format(path, e.to_string()))?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(Error::Cell {
                    path: path.into(),
                    row: r + 1,
                    col: record.len().min(c) + 1,
                    msg: format!("expected {c} columns, found {}", record.len()),
                })
            }
            Some(_) => {}
        }
        for (c, cell) in record.iter().enumerate() {
            let cell_err = |msg: String| Error::Cell {
                path: path.into(),
                row: r + 1,
                col: c + 1,
                msg,
            };
            let v: f64 = cell
                .parse()
                .map_err(|_| cell_err(format!("'{cell}' is not a number")))?;
            if !v.is_finite() {
                return Err(cell_err(format!("non-finite value {cell}")));
            }
            data.push(v);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::format(path, "file has no rows"))?;
    Ok(Matrix::from_vec(rows, cols, data)?)
}

/// Writes a headerless CSV using the shortest representation that parses
/// back to the same value.
pub fn write_csv(path: &Path, matrix: &Matrix) -> Result<()> {
    let mut out = String::new();
    for row in matrix.row_iter() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    write_file(path, out.as_bytes())
}

pub fn read_matrix(path: &Path, format: Format) -> Result<Matrix> {
    match format {
        Format::Csv => read_csv(path),
        Format::Divm => read_divm(path),
    }
}

pub fn write_matrix(path: &Path, matrix: &Matrix, format: Format) -> Result<()> {
    match format {
        Format::Csv => write_csv(path, matrix),
        Format::Divm => write_divm(path, matrix),
    }
}

/// Turns a label matrix read from disk into `(labels, kind)`.
///
/// A single column of non-negative integers is a class column and is expanded
/// to one-hot rows with `k = max + 1`. Any other single column is a real
/// regression target. Wider matrices are one-hot if every row is one-hot and
/// residual targets otherwise.
pub fn interpret_labels(raw: &Matrix, path: &Path) -> Result<(Matrix, LabelKind)> {
    if raw.cols() == 1 {
        let col: Vec<f64> = raw.as_slice().to_vec();
        if col.iter().all(|v| v.fract() == 0.0) {
            let mut classes = Vec::with_capacity(col.len());
            for (r, &v) in col.iter().enumerate() {
                if v < 0.0 || v >= MAX_CLASS_LABEL as f64 {
                    return Err(Error::Cell {
                        path: path.into(),
                        row: r + 1,
                        col: 1,
                        msg: format!("class label {v} outside [0, 2^31)"),
                    });
                }
                classes.push(v as usize);
            }
            let k = classes.iter().copied().max().unwrap_or(0) + 1;
            let mut y = Matrix::zeros(classes.len(), k);
            for (r, &c) in classes.iter().enumerate() {
                y[(r, c)] = 1.0;
            }
            return Ok((y, LabelKind::OneHot));
        }
        return Ok((raw.clone(), LabelKind::Residual));
    }
    let one_hot = raw
        .row_iter()
        .all(|row| row.iter().all(|&v| v == 0.0 || v == 1.0) && row.iter().sum::<f64>() == 1.0);
    let kind = if one_hot {
        LabelKind::OneHot
    } else {
        LabelKind::Residual
    };
    Ok((raw.clone(), kind))
}

/// Loads a features file and a labels file into a validated dataset.
pub fn load_dataset(features_path: &Path, labels_path: &Path, format: Format) -> Result<Dataset> {
    let z = read_matrix(features_path, format)?;
    if let Some((row, col)) = z.find_non_finite() {
        return Err(Error::Cell {
            path: features_path.into(),
            row: row + 1,
            col: col + 1,
            msg: "non-finite value".into(),
        });
    }
    let raw = read_matrix(labels_path, format)?;
    if let Some((row, col)) = raw.find_non_finite() {
        return Err(Error::Cell {
            path: labels_path.into(),
            row: row + 1,
            col: col + 1,
            msg: "non-finite value".into(),
        });
    }
    if raw.rows() != z.rows() {
        return Err(Error::format(
            labels_path,
            format!(
                "{} label rows but {} has {} feature rows",
                raw.rows(),
                features_path.display(),
                z.rows()
            ),
        ));
    }
    let (y, kind) = interpret_labels(&raw, labels_path)?;
    Ok(Dataset::new(z, y, kind)?)
}

/// Writes class labels as a single integer column.
pub fn write_classes(path: &Path, classes: &[usize], format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            let mut out = String::new();
            for c in classes {
                out.push_str(&c.to_string());
                out.push('\n');
            }
            write_file(path, out.as_bytes())
        }
        Format::Divm => {
            let m = Matrix::from_vec(
                classes.len(),
                1,
                classes.iter().map(|&c| c as f64).collect(),
            )?;
            write_divm(path, &m)
        }
    }
}

/// Reads a list of indices, one per line (blank lines ignored).
pub fn read_indices(path: &Path) -> Result<Vec<usize>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(r, l)| {
            l.trim().parse().map_err(|_| Error::Cell {
                path: path.into(),
                row: r + 1,
                col: 1,
                msg: format!("'{}' is not an index", l.trim()),
            })
        })
        .collect()
}

pub fn write_indices(path: &Path, indices: &[usize]) -> Result<()> {
    let mut out = String::new();
    for i in indices {
        out.push_str(&i.to_string());
        out.push('\n');
    }
    write_file(path, out.as_bytes())
}

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::format(path, "not a file path"))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut w = BufWriter::new(File::create(&tmp)?);
        w.write_all(bytes)?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::io(path, e)
    })
}
