//! Line-oriented text formats shared by the library and the CLI.
//!
//! Three small formats, all deterministic and diff-friendly:
//!
//! * **weight files** — one exact rational per line, `p/q` or a plain
//!   integer, 1-based (line 1 holds α_1); blank lines and `#` comments are
//!   skipped;
//! * **complex matrices** — a `rows cols` header line, then one row per
//!   line of comma-separated `re,im` pairs (so an r×c matrix has r lines of
//!   2c comma-separated numbers);
//! * **residual grids** — CSV with a header row, one line per submatrix size
//!   n and one column per basis index i.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use crate::scalar::{format_rational, parse_rational};
use crate::{CoreError, Rational, Result};

// ---------------------------------------------------------------------------
// Weight files
// ---------------------------------------------------------------------------

/// Parse a weight file: one exact rational per line, 1-based.
pub fn parse_weight_lines(text: &str) -> Result<Vec<Rational>> {
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value =
            parse_rational(line).map_err(|e| CoreError::Parse(format!("line {}: {e}", idx + 1)))?;
        values.push(value);
    }
    Ok(values)
}

pub fn read_weight_file(path: &Path) -> Result<Vec<Rational>> {
    let text = fs::read_to_string(path)?;
    parse_weight_lines(&text)
}

pub fn write_weight_file(path: &Path, values: &[Rational]) -> Result<()> {
    let mut out = String::new();
    for v in values {
        out.push_str(&format_rational(v));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Complex matrices
// ---------------------------------------------------------------------------

/// Parse the complex-matrix text format: header `rows cols`, then `rows`
/// lines of `re,im` pairs (2·cols comma-separated numbers each).
pub fn parse_complex_matrix(text: &str) -> Result<Array2<Complex64>> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| CoreError::Parse("empty matrix file".into()))?;
    let mut dims = header.split_whitespace();
    let parse_dim = |tok: Option<&str>| -> Result<usize> {
        tok.ok_or_else(|| CoreError::Parse(format!("bad matrix header `{header}`")))?
            .parse()
            .map_err(|e| CoreError::Parse(format!("bad matrix header `{header}`: {e}")))
    };
    let rows = parse_dim(dims.next())?;
    let cols = parse_dim(dims.next())?;
    if dims.next().is_some() {
        return Err(CoreError::Parse(format!(
            "matrix header `{header}` has trailing tokens"
        )));
    }

    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let line = lines.next().ok_or_else(|| {
            CoreError::Parse(format!("matrix row {} missing (expected {rows})", r + 1))
        })?;
        let nums: Vec<&str> = line.split(',').map(str::trim).collect();
        if nums.len() != 2 * cols {
            return Err(CoreError::Parse(format!(
                "matrix row {} has {} numbers, expected {}",
                r + 1,
                nums.len(),
                2 * cols
            )));
        }
        for c in 0..cols {
            let re: f64 = nums[2 * c]
                .parse()
                .map_err(|e| CoreError::Parse(format!("row {} col {}: {e}", r + 1, c + 1)))?;
            let im: f64 = nums[2 * c + 1]
                .parse()
                .map_err(|e| CoreError::Parse(format!("row {} col {}: {e}", r + 1, c + 1)))?;
            data.push(Complex64::new(re, im));
        }
    }
    if lines.next().is_some() {
        return Err(CoreError::Parse(format!(
            "matrix has more than {rows} data rows"
        )));
    }
    Array2::from_shape_vec((rows, cols), data)
        .map_err(|e| CoreError::Parse(format!("matrix shape error: {e}")))
}

/// Render a matrix in the complex-matrix text format (full precision).
pub fn format_complex_matrix(m: &Array2<Complex64>) -> String {
    let (rows, cols) = m.dim();
    let mut out = format!("{rows} {cols}\n");
    for r in 0..rows {
        let mut parts = Vec::with_capacity(2 * cols);
        for c in 0..cols {
            let z = m[(r, c)];
            parts.push(format_f64(z.re));
            parts.push(format_f64(z.im));
        }
        out.push_str(&parts.join(","));
        out.push('\n');
    }
    out
}

pub fn read_complex_matrix(path: &Path) -> Result<Array2<Complex64>> {
    let text = fs::read_to_string(path)?;
    parse_complex_matrix(&text)
}

pub fn write_complex_matrix(path: &Path, m: &Array2<Complex64>) -> Result<()> {
    fs::write(path, format_complex_matrix(m))?;
    Ok(())
}

/// Shortest round-trippable decimal form.
fn format_f64(x: f64) -> String {
    // Ryu-style shortest form via the standard formatter: `{:?}` on f64 is
    // guaranteed to round-trip.
    format!("{x:?}")
}

// ---------------------------------------------------------------------------
// Residual grids
// ---------------------------------------------------------------------------

/// Emit a residual grid as CSV: header `n,i1,i2,…`, then one row per n.
pub fn format_residual_grid(ns: &[usize], is: &[usize], grid: &Array2<f64>) -> Result<String> {
    if grid.dim() != (ns.len(), is.len()) {
        return Err(CoreError::invariant(format!(
            "grid shape {:?} does not match {}×{} labels",
            grid.dim(),
            ns.len(),
            is.len()
        )));
    }
    let mut out = String::from("n");
    for i in is {
        out.push_str(&format!(",i{i}"));
    }
    out.push('\n');
    for (row, n) in ns.iter().enumerate() {
        out.push_str(&n.to_string());
        for col in 0..is.len() {
            out.push_str(&format!(",{}", format_f64(grid[(row, col)])));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_residual_grid(
    path: &Path,
    ns: &[usize],
    is: &[usize],
    grid: &Array2<f64>,
) -> Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(format_residual_grid(ns, is, grid)?.as_bytes())?;
    Ok(())
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;
    use ndarray::array;

    #[test]
    fn weight_lines_round_trip() {
        let text = "1\n1/2\n# comment\n\n28/27\n";
        let values = parse_weight_lines(text).unwrap();
        assert_eq!(values, vec![ratio(1, 1), ratio(1, 2), ratio(28, 27)]);

        let dir = std::env::temp_dir().join("cso-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("weights.txt");
        write_weight_file(&path, &values).unwrap();
        assert_eq!(read_weight_file(&path).unwrap(), values);
    }

    #[test]
    fn weight_lines_reject_garbage() {
        assert!(parse_weight_lines("1\nx/y\n").is_err());
        assert!(parse_weight_lines("1/0\n").is_err());
    }

    #[test]
    fn complex_matrix_round_trip() {
        let m = array![
            [Complex64::new(0.0, 0.0), Complex64::new(1.5, -2.25)],
            [Complex64::new(-0.125, 3.0), Complex64::new(0.1, 0.2)],
        ];
        let text = format_complex_matrix(&m);
        let back = parse_complex_matrix(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn complex_matrix_rejects_bad_shapes() {
        assert!(parse_complex_matrix("").is_err());
        assert!(parse_complex_matrix("2 2\n1,0,0,0\n").is_err()); // missing row
        assert!(parse_complex_matrix("1 2\n1,0\n").is_err()); // short row
        assert!(parse_complex_matrix("1 1\n1,0\n2,0\n").is_err()); // extra row
        assert!(parse_complex_matrix("1 1 7\n1,0\n").is_err()); // bad header
    }

    #[test]
    fn residual_grid_layout() {
        let grid = array![[1.0, 0.5], [0.25, 0.0]];
        let csv = format_residual_grid(&[2, 4], &[1, 3], &grid).unwrap();
        assert_eq!(csv, "n,i1,i3\n2,1.0,0.5\n4,0.25,0.0\n");
        assert!(format_residual_grid(&[2], &[1, 3], &grid).is_err());
    }
}
