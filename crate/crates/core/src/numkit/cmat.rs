//! CMAT text persistence.
//!
//! ```text
//! cmat 1 <rows> <cols>
//! <re> <im>        (rows·cols lines, row-major, 17 significant digits)
//! ```

use super::ComplexMatrix;
use num_complex::Complex64 as C64;
use std::io::{self, BufRead, Write};

#[derive(Debug, thiserror::Error)]
pub enum CmatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Matrix(#[from] crate::Error),
}

/// Formats a float with 17 significant digits.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_cmat<W: Write>(m: &ComplexMatrix, mut out: W) -> io::Result<()> {
    writeln!(out, "cmat 1 {} {}", m.rows(), m.cols())?;
    for z in m.as_slice() {
        writeln!(out, "{} {}", fmt_f64(z.re), fmt_f64(z.im))?;
    }
    Ok(())
}

pub fn read_cmat<R: BufRead>(input: R) -> Result<ComplexMatrix, CmatError> {
    let mut lines = input.lines();
    let header = lines.next().ok_or(CmatError::Parse {
        line: 1,
        msg: "missing header".into(),
    })??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (rows, cols) = match fields.as_slice() {
        ["cmat", "1", r, c] => (parse_dim(r)?, parse_dim(c)?),
        _ => {
            return Err(CmatError::Parse {
                line: 1,
                msg: format!("bad header {header:?}"),
            })
        }
    };
    let mut data = Vec::with_capacity(rows * cols);
    for (k, line) in lines.enumerate() {
        let line = line?;
        let lineno = k + 2;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (re, im) = match (parts.next(), parts.next(), parts.next()) {
            (Some(re), Some(im), None) => (re, im),
            _ => {
                return Err(CmatError::Parse {
                    line: lineno,
                    msg: "expected `<re> <im>`".into(),
                })
            }
        };
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| CmatError::Parse {
                line: lineno,
                msg: format!("{s:?}: {e}"),
            })
        };
        data.push(C64::new(parse(re)?, parse(im)?));
    }
    if data.len() != rows * cols {
        return Err(CmatError::Parse {
            line: data.len() + 1,
            msg: format!("expected {} entries, found {}", rows * cols, data.len()),
        });
    }
    Ok(ComplexMatrix::new(rows, cols, data)?)
}

fn parse_dim(s: &str) -> Result<usize, CmatError> {
    s.parse().map_err(|_| CmatError::Parse {
        line: 1,
        msg: format!("bad dimension {s:?}"),
    })
}
