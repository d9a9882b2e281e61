//! Matrix Market coordinate format (real/integer, general/symmetric).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::linalg::sparse::SparseMatrix;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn mm_read(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let text = fs::read_to_string(path)?;
    mm_read_str(&text)
}

/// Parse Matrix Market text. Symmetric storage is expanded and duplicate
/// entries are summed.
pub fn mm_read_str(text: &str) -> Result<SparseMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (lno, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(parse_err(lno, "missing %%MatrixMarket header"));
    }
    if tokens[1] != "matrix" || tokens[2] != "coordinate" {
        return Err(parse_err(
            lno,
            format!("unsupported object/format '{} {}'", tokens[1], tokens[2]),
        ));
    }
    match tokens[3].as_str() {
        "real" | "integer" => {}
        other => return Err(parse_err(lno, format!("unsupported field '{other}'"))),
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(parse_err(lno, format!("unsupported symmetry '{other}'"))),
    };

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (lno, size) = body.next().ok_or_else(|| parse_err(lno, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(lno, format!("bad size line: {e}")))?;
    if dims.len() != 3 {
        return Err(parse_err(lno, "size line must hold rows, cols, nnz"));
    }
    let (nrows, ncols, nnz) = (dims[0], dims[1], dims[2]);
    if symmetry == Symmetry::Symmetric && nrows != ncols {
        return Err(parse_err(lno, "symmetric matrix must be square"));
    }

    let mut triplets = Vec::with_capacity(if symmetry == Symmetry::Symmetric {
        2 * nnz
    } else {
        nnz
    });
    let mut count = 0;
    for (lno, line) in body {
        let mut it = line.split_whitespace();
        let mut index = |name: &str, bound: usize| -> Result<usize> {
            let t = it
                .next()
                .ok_or_else(|| parse_err(lno, format!("missing {name} index")))?;
            let v: usize = t
                .parse()
                .map_err(|_| parse_err(lno, format!("bad {name} index '{t}'")))?;
            if v == 0 || v > bound {
                return Err(parse_err(lno, format!("{name} index {v} out of range 1..={bound}")));
            }
            Ok(v - 1)
        };
        let i = index("row", nrows)?;
        let j = index("column", ncols)?;
        let t = it.next().ok_or_else(|| parse_err(lno, "missing value"))?;
        let v: f64 = t
            .parse()
            .map_err(|_| parse_err(lno, format!("bad value '{t}'")))?;
        if it.next().is_some() {
            return Err(parse_err(lno, "trailing tokens after value"));
        }
        triplets.push((i, j, C64::new(v, 0.0)));
        if symmetry == Symmetry::Symmetric && i != j {
            triplets.push((j, i, C64::new(v, 0.0)));
        }
        count += 1;
    }
    if count != nnz {
        return Err(parse_err(
            0,
            format!("header announces {nnz} entries, found {count}"),
        ));
    }
    SparseMatrix::from_triplets(nrows, ncols, triplets)
}

/// Serialize a real matrix in `coordinate real general` form.
pub fn mm_write_string(a: &SparseMatrix) -> Result<String> {
    if !a.is_real() {
        return Err(Error::InvalidArgument(
            "Matrix Market output supports real matrices only".into(),
        ));
    }
    let mut s = String::new();
    s.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(s, "{} {} {}", a.nrows(), a.ncols(), a.nnz());
    for i in 0..a.nrows() {
        let (cols, vals) = a.row(i);
        for (&j, v) in cols.iter().zip(vals) {
            // `{}` on f64 prints the shortest string that round-trips exactly.
            let _ = writeln!(s, "{} {} {}", i + 1, j + 1, v.re);
        }
    }
    Ok(s)
}

pub fn mm_write(path: impl AsRef<Path>, a: &SparseMatrix) -> Result<()> {
    fs::write(path, mm_write_string(a)?)?;
    Ok(())
}
