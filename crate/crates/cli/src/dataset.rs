//! Plain-text dataset format.
//!
//! First data line: `n p`. Then n lines, each holding p design entries
//! followed by the response value, whitespace separated. Blank lines and
//! `#` comment lines are skipped. Parse errors name the first bad line.

use std::path::Path;

use ndarray::{Array1, Array2};
use resvar::{Dataset, DesignMatrix};

use crate::Failure;

pub fn read_dataset(path: &Path) -> Result<Dataset, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    parse_dataset(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parse_dataset(text: &str) -> Result<Dataset, String> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (ln, header) = lines.next().ok_or_else(|| "line 1: empty file".to_string())?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(format!(
            "line {ln}: expected `n p`, found {} tokens",
            dims.len()
        ));
    }
    let n: usize = dims[0]
        .parse()
        .map_err(|_| format!("line {ln}: bad row count '{}'", dims[0]))?;
    let p: usize = dims[1]
        .parse()
        .map_err(|_| format!("line {ln}: bad column count '{}'", dims[1]))?;
    if n == 0 || p == 0 {
        return Err(format!("line {ln}: dimensions must be positive"));
    }

    let mut entries = Vec::with_capacity(n * p);
    let mut response = Vec::with_capacity(n);
    for r in 0..n {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| format!("expected {n} data rows, found {r}"))?;
        let mut values = Vec::with_capacity(p + 1);
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| format!("line {ln}: bad number '{tok}'"))?;
            values.push(v);
        }
        if values.len() != p + 1 {
            return Err(format!(
                "line {ln}: expected {} numbers, found {}",
                p + 1,
                values.len()
            ));
        }
        response.push(values.pop().expect("nonempty"));
        entries.extend_from_slice(&values);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(format!("line {ln}: unexpected data after {n} rows"));
    }

    let design = DesignMatrix::from_entries(
        Array2::from_shape_vec((n, p), entries).expect("length matches shape"),
    )
    .map_err(|e| e.to_string())?;
    Dataset::new(design, Array1::from_vec(response)).map_err(|e| e.to_string())
}
