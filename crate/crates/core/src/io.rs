//! File formats: Matrix Market graphs, CSV signals, spectra, bases and filter
//! responses, edge lists and JSON.
//!
//! Floats are written in Rust's shortest round-trip scientific notation, so
//! output is byte-stable and re-reads exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filters::FilterResponse;
use crate::graph::{AdjacencyMatrix, GraphSignal};
use crate::linalg::{CMatrix, C64};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Creates the file (and its parent directories) and hands a buffered writer
/// to `body`.
pub fn write_to_path<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut w = BufWriter::new(File::create(path)?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

pub fn format_complex(c: C64) -> String {
    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
    format!("{:e}{}{:e}j", c.re, sign, c.im.abs())
}

pub fn parse_complex(text: &str) -> Option<C64> {
    let body = text.trim().strip_suffix('j')?;
    // the imaginary sign is the last +/- not belonging to an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))?;
    let re = body[..split].parse().ok()?;
    let im = body[split..].parse().ok()?;
    Some(C64::new(re, im))
}

/// Coordinate real general format, 1-based, nonzeros in column-major order.
pub fn write_matrix_market<W: Write>(w: &mut W, m: &DMatrix<f64>) -> Result<()> {
    let nnz = m.iter().filter(|x| **x != 0.0).count();
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), nnz)?;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let x = m[(i, j)];
            if x != 0.0 {
                writeln!(w, "{} {} {:e}", i + 1, j + 1, x)?;
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Real,
    Pattern,
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

/// Reads coordinate (`real`, `integer` or `pattern`; `general`, `symmetric`
/// or `skew-symmetric`) and dense `array` Matrix Market files.
pub fn read_matrix_market<R: BufRead>(r: R) -> Result<DMatrix<f64>> {
    let mut lines = r.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let header = header?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, "expected a %%MatrixMarket matrix header"));
    }
    let coordinate = match tokens[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(parse_err(1, format!("unsupported format {other}"))),
    };
    let field = match tokens[3].as_str() {
        "real" | "integer" | "double" => Field::Real,
        "pattern" if coordinate => Field::Pattern,
        other => return Err(parse_err(1, format!("unsupported field {other}"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(parse_err(1, format!("unsupported symmetry {other}"))),
    };

    let mut data = lines.filter_map(|(no, l)| match l {
        Ok(text) => {
            let t = text.trim().to_string();
            (!t.is_empty() && !t.starts_with('%')).then_some(Ok((no, t)))
        }
        Err(e) => Some(Err(Error::from(e))),
    });
    let (size_line, size) = data.next().ok_or_else(|| parse_err(2, "missing size line"))??;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(size_line, format!("bad size entry {t:?}"))))
        .collect::<Result<_>>()?;
    let expected_dims = if coordinate { 3 } else { 2 };
    if dims.len() != expected_dims {
        return Err(parse_err(size_line, "malformed size line"));
    }
    let (rows, cols) = (dims[0], dims[1]);
    let mut m = DMatrix::zeros(rows, cols);

    let parse_value = |no: usize, t: &str| -> Result<f64> {
        let v: f64 = t.parse().map_err(|_| parse_err(no, format!("bad value {t:?}")))?;
        if !v.is_finite() {
            return Err(parse_err(no, "non-finite value"));
        }
        Ok(v)
    };

    if coordinate {
        let nnz = dims[2];
        let mut seen = 0;
        for item in data {
            let (no, text) = item?;
            let parts: Vec<&str> = text.split_whitespace().collect();
            let need = if field == Field::Pattern { 2 } else { 3 };
            if parts.len() != need {
                return Err(parse_err(no, format!("expected {need} fields")));
            }
            let idx = |t: &str, max: usize| -> Result<usize> {
                let v: usize = t.parse().map_err(|_| parse_err(no, format!("bad index {t:?}")))?;
                if v == 0 || v > max {
                    return Err(parse_err(no, format!("index {v} out of range 1..={max}")));
                }
                Ok(v - 1)
            };
            let (i, j) = (idx(parts[0], rows)?, idx(parts[1], cols)?);
            let v = if field == Field::Pattern { 1.0 } else { parse_value(no, parts[2])? };
            m[(i, j)] += v;
            if i != j {
                match symmetry {
                    Symmetry::General => {}
                    Symmetry::Symmetric => m[(j, i)] += v,
                    Symmetry::SkewSymmetric => m[(j, i)] -= v,
                }
            }
            seen += 1;
        }
        if seen != nnz {
            return Err(parse_err(size_line, format!("declared {nnz} entries, found {seen}")));
        }
    } else {
        let values: Vec<(usize, f64)> = data
            .map(|item| {
                let (no, text) = item?;
                Ok((no, parse_value(no, &text)?))
            })
            .collect::<Result<_>>()?;
        let mut it = values.into_iter();
        for j in 0..cols {
            let start = if symmetry == Symmetry::General { 0 } else { j };
            for i in start..rows {
                let (_, v) = it.next().ok_or_else(|| parse_err(size_line, "too few array entries"))?;
                m[(i, j)] = v;
                if i != j {
                    match symmetry {
                        Symmetry::General => {}
                        Symmetry::Symmetric => m[(j, i)] = v,
                        Symmetry::SkewSymmetric => m[(j, i)] = -v,
                    }
                }
            }
        }
        if let Some((no, _)) = it.next() {
            return Err(parse_err(no, "too many array entries"));
        }
    }
    Ok(m)
}

pub fn save_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    write_to_path(path, |w| write_matrix_market(w, m))
}

pub fn load_matrix(path: &Path) -> Result<DMatrix<f64>> {
    read_matrix_market(open(path)?)
}

pub fn load_graph(path: &Path) -> Result<AdjacencyMatrix> {
    AdjacencyMatrix::new(load_matrix(path)?)
}

/// One value per line under a `value` header.
pub fn write_signal<W: Write>(w: &mut W, s: &GraphSignal) -> Result<()> {
    writeln!(w, "value")?;
    for x in s.as_slice() {
        writeln!(w, "{x:e}")?;
    }
    Ok(())
}

/// Accepts the signal CSV with or without its header line.
pub fn read_signal<R: BufRead>(r: R) -> Result<GraphSignal> {
    let mut values = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || (i == 0 && t.eq_ignore_ascii_case("value")) {
            continue;
        }
        let v: f64 = t.parse().map_err(|_| parse_err(i + 1, format!("bad value {t:?}")))?;
        if !v.is_finite() {
            return Err(parse_err(i + 1, "non-finite value"));
        }
        values.push(v);
    }
    GraphSignal::from_vec(values)
}

pub fn save_signal(path: &Path, s: &GraphSignal) -> Result<()> {
    write_to_path(path, |w| write_signal(w, s))
}

pub fn load_signal(path: &Path) -> Result<GraphSignal> {
    read_signal(open(path)?)
}

pub fn write_spectrum<W: Write>(w: &mut W, spectrum: &[(f64, f64)]) -> Result<()> {
    writeln!(w, "variation,magnitude")?;
    for (v, m) in spectrum {
        writeln!(w, "{v:e},{m:e}")?;
    }
    Ok(())
}

pub fn save_spectrum(path: &Path, spectrum: &[(f64, f64)]) -> Result<()> {
    write_to_path(path, |w| write_spectrum(w, spectrum))
}

/// Dense basis, one column per basis vector, entries as `re±imj`.
pub fn write_basis<W: Write>(w: &mut W, basis: &CMatrix) -> Result<()> {
    let header: Vec<String> = (0..basis.ncols()).map(|j| format!("v{j}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for row in basis.row_iter() {
        let cells: Vec<String> = row.iter().map(|c| format_complex(*c)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn read_basis<R: BufRead>(r: R) -> Result<CMatrix> {
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|c| parse_complex(c).ok_or_else(|| parse_err(i + 1, format!("bad complex entry {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    let k = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != k) {
        return Err(parse_err(0, "ragged basis rows"));
    }
    Ok(CMatrix::from_fn(n, k, |i, j| rows[i][j]))
}

pub fn write_response<W: Write>(w: &mut W, r: &FilterResponse) -> Result<()> {
    writeln!(w, "x,re,im")?;
    for (x, v) in r.points.iter().zip(&r.values) {
        writeln!(w, "{x:e},{:e},{:e}", v.re, v.im)?;
    }
    Ok(())
}

/// `src,dst,weight` rows with 0-based node ids; the header line is optional.
/// The node count is one more than the largest id unless given.
pub fn read_edge_list<R: BufRead>(r: R, nodes: Option<usize>) -> Result<AdjacencyMatrix> {
    let mut edges = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        if i == 0 && parts.first() == Some(&"src") {
            continue;
        }
        if parts.len() != 3 {
            return Err(parse_err(i + 1, "expected src,dst,weight"));
        }
        let src: usize = parts[0].parse().map_err(|_| parse_err(i + 1, format!("bad node id {:?}", parts[0])))?;
        let dst: usize = parts[1].parse().map_err(|_| parse_err(i + 1, format!("bad node id {:?}", parts[1])))?;
        let w: f64 = parts[2].parse().map_err(|_| parse_err(i + 1, format!("bad weight {:?}", parts[2])))?;
        if !w.is_finite() {
            return Err(parse_err(i + 1, "non-finite weight"));
        }
        edges.push((src, dst, w));
    }
    let max_id = edges.iter().map(|&(s, d, _)| s.max(d) + 1).max().unwrap_or(0);
    let n = nodes.unwrap_or(max_id);
    AdjacencyMatrix::from_edges(n, &edges)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_to_path(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(open(path)?)?)
}
