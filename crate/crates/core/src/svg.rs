//! Deterministic SVG sparsity plots: row 1 at the top, 10-unit cells,
//! `+1` in red and `-1` in blue on a white background.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix_engine::{PartialMapMatrix, SparseSignMatrix};

pub const CELL: usize = 10;
pub const MAX_DIM: usize = 4096;
pub const POSITIVE: &str = "#d62728";
pub const NEGATIVE: &str = "#1f77b4";

/// Anything with a square pattern of signed unit entries.
pub trait SparsityPattern {
    fn dim(&self) -> usize;
    /// `(row, col, value)` in column-major order.
    fn signed_entries(&self) -> Vec<(usize, usize, i8)>;
}

impl SparsityPattern for PartialMapMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn signed_entries(&self) -> Vec<(usize, usize, i8)> {
        self.rows()
            .iter()
            .enumerate()
            .filter(|(_, &r)| r != 0)
            .map(|(j, &r)| (r, j + 1, 1))
            .collect()
    }
}

impl SparsityPattern for SparseSignMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn signed_entries(&self) -> Vec<(usize, usize, i8)> {
        self.entries().collect()
    }
}

pub fn render_svg(matrix: &dyn SparsityPattern) -> Result<String> {
    let n = matrix.dim();
    if n > MAX_DIM {
        return Err(Error::SizeLimitExceeded {
            size: n,
            limit: MAX_DIM,
        });
    }
    let side = n * CELL;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}" viewBox="0 0 {side} {side}" shape-rendering="crispEdges">"#
    )
    .unwrap();
    writeln!(
        out,
        r##"<rect width="{side}" height="{side}" fill="#ffffff"/>"##
    )
    .unwrap();
    for (r, c, v) in matrix.signed_entries() {
        let fill = if v > 0 { POSITIVE } else { NEGATIVE };
        writeln!(
            out,
            r#"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{fill}"/>"#,
            (c - 1) * CELL,
            (r - 1) * CELL
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn write_svg(matrix: &dyn SparsityPattern, path: &Path) -> Result<()> {
    let svg = render_svg(matrix)?;
    std::fs::write(path, svg)?;
    Ok(())
}
