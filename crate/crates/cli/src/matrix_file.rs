//! Plain-text dense matrices: a `dim n` header, then `n` rows of `n`
//! whitespace-separated `re,im` pairs in sector basis order.

use std::fmt::Write as _;
use std::path::Path;

use unikit_core::{CMatrix, C64};

use crate::{CliError, Result};

fn bad(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Scenario(format!("matrix file line {line}: {msg}"))
}

pub fn parse(text: &str) -> Result<CMatrix> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    let n: usize = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["dim", n] => n.parse().map_err(|_| bad(1, format!("`{n}` is not a dimension")))?,
        _ => return Err(bad(1, "expected `dim <n>`")),
    };
    if n == 0 {
        return Err(bad(1, "dimension must be positive"));
    }
    let mut m = CMatrix::zeros(n, n);
    let mut rows = 0;
    for (idx, line) in lines {
        let lineno = idx + 1;
        if rows == n {
            return Err(bad(lineno, format!("more than {n} rows")));
        }
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != n {
            return Err(bad(lineno, format!("expected {n} entries, found {}", entries.len())));
        }
        for (col, entry) in entries.iter().enumerate() {
            let parsed = entry
                .split_once(',')
                .and_then(|(re, im)| Some(C64::new(re.parse().ok()?, im.parse().ok()?)))
                .filter(|z| z.re.is_finite() && z.im.is_finite())
                .ok_or_else(|| bad(lineno, format!("entry {} `{entry}` is not a finite `re,im` pair", col + 1)))?;
            m[(rows, col)] = parsed;
        }
        rows += 1;
    }
    if rows != n {
        return Err(bad(rows + 2, format!("expected {n} rows, found {rows}")));
    }
    Ok(m)
}

pub fn read(path: &Path) -> Result<CMatrix> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    parse(&text)
}

/// Inverse of [`parse`]; floats are written in shortest round-trip form.
pub fn format(m: &CMatrix) -> String {
    let mut out = format!("dim {}\n", m.nrows());
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format!("{},{}", m[(r, c)].re, m[(r, c)].im)).collect();
        writeln!(out, "{}", row.join(" ")).expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let m = CMatrix::from_fn(3, 3, |r, c| C64::new((r as f64 + 0.1).sqrt(), -(c as f64) / 3.0));
        assert_eq!(parse(&format(&m)).unwrap(), m);
    }

    #[test]
    fn examples() {
        let m = parse("dim 2\n1,0 0,0\n0,0 0,-1\n").unwrap();
        assert_eq!(m[(1, 1)], C64::new(0.0, -1.0));
    }

    #[test]
    fn errors_name_the_line() {
        let err = parse("dim 2\n1,0 0,0\n0,0 x,1\n").unwrap_err().to_string();
        assert!(err.contains("line 3") && err.contains("entry 2"), "{err}");
        let err = parse("dim 2\n1,0 0,0\n").unwrap_err().to_string();
        assert!(err.contains("expected 2 rows"), "{err}");
        assert!(parse("size 2\n").is_err());
        assert!(parse("dim 1\n1,0 2,0\n").is_err());
        assert!(parse("dim 1\nNaN,0\n").is_err());
    }
}
