// SPDX-License-Identifier: Apache-2.0
//! Readers for band, right-hand-side and matrix files.

use std::path::Path;

use systolic_core::oracle::DenseMatrix;

use crate::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn reals(path: &Path, text: &str) -> Result<Vec<f64>, CliError> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Usage(format!("{}: not a finite real: {t:?}", path.display())))
        })
        .collect()
}

/// Whitespace-separated reals; exactly `expected` of them.
pub fn read_reals(path: &Path, expected: usize) -> Result<Vec<f64>, CliError> {
    let v = reals(path, &read(path)?)?;
    if v.len() != expected {
        return Err(CliError::Usage(format!("{}: expected {expected} values, found {}", path.display(), v.len())));
    }
    Ok(v)
}

/// Order `n`, then the lower triangle row by row.
pub fn read_matrix(path: &Path) -> Result<DenseMatrix, CliError> {
    let text = read(path)?;
    let mut tokens = text.split_whitespace();
    let head = tokens.next().ok_or_else(|| CliError::Usage(format!("{}: empty matrix file", path.display())))?;
    let n: usize = head.parse().map_err(|_| CliError::Usage(format!("{}: bad order {head:?}", path.display())))?;
    let rest: Vec<&str> = tokens.collect();
    let vals = reals(path, &rest.join(" "))?;
    if vals.len() != n * (n + 1) / 2 {
        return Err(CliError::Usage(format!(
            "{}: order {n} needs {} lower-triangle values, found {}",
            path.display(),
            n * (n + 1) / 2,
            vals.len()
        )));
    }
    let at = |i: usize, j: usize| {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        vals[i * (i + 1) / 2 + j]
    };
    Ok(DenseMatrix::from_fn(n, at))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn temp(contents: &str, name: &str) -> std::path::PathBuf {
        let p = std::env::temp_dir().join(format!("systolic-input-{}-{name}", std::process::id()));
        std::fs::File::create(&p).unwrap().write_all(contents.as_bytes()).unwrap();
        p
    }

    #[test]
    fn lower_triangle() {
        let p = temp("3\n1\n2 3\n4 5 6\n", "m");
        let m = read_matrix(&p).unwrap();
        assert_eq!(m.get(0, 1), 2.0);
        assert_eq!(m.get(2, 0), 4.0);
        assert_eq!(m.get(1, 2), 5.0);
        assert_eq!(m.get(2, 2), 6.0);
        assert!(read_reals(&p, 3).is_err());
    }

    #[test]
    fn rejects_garbage() {
        let p = temp("1\nx\n", "g");
        assert!(matches!(read_matrix(&p), Err(CliError::Usage(_))));
        let q = temp("1\n2\nnan\n", "n");
        assert!(read_reals(&q, 3).is_err());
    }
}
