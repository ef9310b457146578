//! Sparse matrices of a local function.
//!
//! `M` has column `j` equal to the unit vector `e_{phi_n(j)}` (or zero), so
//! it and all its powers are stored as partial maps: one row index per
//! column. `I - M` and its inverse are kept column-wise with signed entries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_model::LocalFunction;
use crate::orbit_engine::{CycleReport, HeightProfile};

/// Binary matrix with at most one nonzero per column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialMapMatrix {
    // Index 0 is the absorbing zero row and always maps to 0.
    col_to_row: Vec<usize>,
}

impl PartialMapMatrix {
    pub fn zero(n: usize) -> Self {
        PartialMapMatrix {
            col_to_row: vec![0; n + 1],
        }
    }

    pub fn identity(n: usize) -> Self {
        PartialMapMatrix {
            col_to_row: (0..=n).collect(),
        }
    }

    /// Builds from the row index of each column `1..=n`, 0 for a zero column.
    pub fn from_rows(rows: &[usize]) -> Result<Self> {
        let n = rows.len();
        if let Some(&r) = rows.iter().find(|&&r| r > n) {
            return Err(Error::IndexOutOfRange { index: r, n });
        }
        let mut col_to_row = Vec::with_capacity(n + 1);
        col_to_row.push(0);
        col_to_row.extend_from_slice(rows);
        Ok(PartialMapMatrix { col_to_row })
    }

    pub fn n(&self) -> usize {
        self.col_to_row.len() - 1
    }

    /// Row index of the nonzero in each column `1..=n`.
    pub fn rows(&self) -> &[usize] {
        &self.col_to_row[1..]
    }

    pub fn is_zero(&self) -> bool {
        self.rows().iter().all(|&r| r == 0)
    }

    /// Image of `e_x`: `M e_x = e_{phi_n(x)}`, 0 for the zero vector.
    pub fn apply_basis(&self, x: usize) -> Result<usize> {
        if x == 0 || x > self.n() {
            return Err(Error::IndexOutOfRange {
                index: x,
                n: self.n(),
            });
        }
        Ok(self.col_to_row[x])
    }

    /// `self * other`: column `j` of the product is `self` applied to the
    /// row of column `j` in `other`.
    pub fn compose(&self, other: &PartialMapMatrix) -> Result<PartialMapMatrix> {
        check_dims(self.n(), other.n())?;
        Ok(PartialMapMatrix {
            col_to_row: other
                .col_to_row
                .iter()
                .map(|&r| self.col_to_row[r])
                .collect(),
        })
    }

    /// `M^k` by repeated squaring; `M^0 = I`.
    pub fn power(&self, k: u64) -> PartialMapMatrix {
        let mut acc = PartialMapMatrix::identity(self.n());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = base.compose(&acc).expect("same dimension");
            }
            k >>= 1;
            if k > 0 {
                if base.is_zero() {
                    return PartialMapMatrix::zero(self.n());
                }
                base = base.compose(&base).expect("same dimension");
            }
        }
        acc
    }

    /// `M, M^2, M^3, ...`, each step `M^{k+1} = M * M^k`, stopping after the
    /// first zero power or after `M^n`.
    pub fn powers(&self) -> Powers<'_> {
        Powers {
            base: self,
            current: None,
            k: 0,
        }
    }

    /// Number of nonzero columns.
    pub fn nnz(&self) -> usize {
        self.rows().iter().filter(|&&r| r != 0).count()
    }

    /// Positions nonzero in both matrices.
    pub fn intersect_count(&self, other: &PartialMapMatrix) -> Result<usize> {
        check_dims(self.n(), other.n())?;
        Ok(self
            .rows()
            .iter()
            .zip(other.rows())
            .filter(|&(&a, &b)| a != 0 && a == b)
            .count())
    }

    /// Least `m` with `M^m = 0`, or `None` when no power up to `n` vanishes.
    pub fn nilpotency_degree(&self) -> Option<usize> {
        if self.is_zero() {
            // M^0 = I is never zero for n >= 1, so M itself is the first.
            return Some(1);
        }
        self.powers()
            .enumerate()
            .find(|(_, p)| p.is_zero())
            .map(|(i, _)| i + 1)
    }
}

fn check_dims(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// Iterator over successive powers of a partial-map matrix.
pub struct Powers<'a> {
    base: &'a PartialMapMatrix,
    current: Option<PartialMapMatrix>,
    k: usize,
}

impl Iterator for Powers<'_> {
    type Item = PartialMapMatrix;

    fn next(&mut self) -> Option<PartialMapMatrix> {
        if self.k >= self.base.n() {
            return None;
        }
        let next = match &self.current {
            None => self.base.clone(),
            Some(p) if p.is_zero() => return None,
            Some(p) => self.base.compose(p).expect("same dimension"),
        };
        self.k += 1;
        self.current = Some(next.clone());
        Some(next)
    }
}

/// `M_n(phi)`: column `j` is `e_{phi_n(j)}`.
pub fn build_m(lf: &LocalFunction) -> PartialMapMatrix {
    PartialMapMatrix {
        col_to_row: lf.raw().to_vec(),
    }
}

/// Square matrix with entries in `{-1, 0, 1}`, stored column-wise with rows
/// ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseSignMatrix {
    n: usize,
    columns: Vec<Vec<(usize, i8)>>,
}

impl SparseSignMatrix {
    /// Columns are indexed `0..n` for matrix columns `1..=n`; each must hold
    /// strictly ascending rows in `1..=n` with values `+1` or `-1`.
    pub fn from_columns(columns: Vec<Vec<(usize, i8)>>) -> Result<Self> {
        let n = columns.len();
        for col in &columns {
            for w in col.windows(2) {
                if w[0].0 >= w[1].0 {
                    return Err(Error::Internal("column rows must ascend".into()));
                }
            }
            for &(r, v) in col {
                if r == 0 || r > n {
                    return Err(Error::IndexOutOfRange { index: r, n });
                }
                if v != 1 && v != -1 {
                    return Err(Error::Internal(format!("entry {v} is not a sign")));
                }
            }
        }
        Ok(SparseSignMatrix { n, columns })
    }

    pub fn identity(n: usize) -> Self {
        SparseSignMatrix {
            n,
            columns: (1..=n).map(|j| vec![(j, 1)]).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entries of column `j` (1-based).
    pub fn column(&self, j: usize) -> &[(usize, i8)] {
        &self.columns[j - 1]
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.column(col)
            .binary_search_by_key(&row, |&(r, _)| r)
            .map_or(0, |i| self.columns[col - 1][i].1)
    }

    /// `(row, col, value)` in column-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, i8)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |&(r, v)| (r, j + 1, v)))
    }
}

/// `I - M_n(phi)`.
pub fn build_ihat(lf: &LocalFunction) -> SparseSignMatrix {
    let columns = (1..=lf.n())
        .map(|j| {
            let r = lf.image(j);
            let mut col = vec![(j, 1i8)];
            if r != 0 {
                col.push((r, -1));
                col.sort_unstable_by_key(|&(row, _)| row);
            }
            col
        })
        .collect();
    SparseSignMatrix { n: lf.n(), columns }
}

/// Inverse of `I - M` with column `j` carrying ones on the orbit of `j`.
pub fn inverse_via_orbits(lf: &LocalFunction, hp: &HeightProfile) -> Result<SparseSignMatrix> {
    if hp.n() != lf.n() {
        return Err(Error::DimensionMismatch {
            left: lf.n(),
            right: hp.n(),
        });
    }
    let columns = (1..=lf.n())
        .map(|j| {
            let h = hp.height(j);
            let mut col = Vec::with_capacity(h);
            let mut y = j;
            while y != 0 {
                if col.len() == h {
                    return Err(Error::CyclePresent);
                }
                col.push((y, 1i8));
                y = lf.image(y);
            }
            col.sort_unstable_by_key(|&(r, _)| r);
            Ok(col)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseSignMatrix { n: lf.n(), columns })
}

/// Inverse of `I - M` as the finite sum `I + M + ... + M^{n-1}`.
pub fn inverse_via_neumann(m: &PartialMapMatrix) -> Result<SparseSignMatrix> {
    let n = m.n();
    let mut columns: Vec<Vec<(usize, i8)>> = (1..=n).map(|j| vec![(j, 1)]).collect();
    let mut last_zero = m.is_zero();
    for p in m.powers() {
        last_zero = p.is_zero();
        if last_zero {
            break;
        }
        for (j, &r) in p.rows().iter().enumerate() {
            if r != 0 {
                columns[j].push((r, 1));
            }
        }
    }
    if !last_zero {
        return Err(Error::NotNilpotent);
    }
    for col in &mut columns {
        col.sort_unstable_by_key(|&(r, _)| r);
        if col.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Internal("powers of a nilpotent map overlap".into()));
        }
    }
    Ok(SparseSignMatrix { n, columns })
}

/// Number of nonzeros of the inverse without materializing it.
pub fn inverse_nnz(hp: &HeightProfile) -> u64 {
    hp.height_sum()
}

/// Indicator vector of a cycle, certified to satisfy `M v = v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenvectorCertificate {
    /// Indices where `v` is 1, ascending.
    pub support: Vec<usize>,
}

/// Builds `v = sum_{y in cycle} e_y` and checks `M v = v` entrywise.
pub fn cycle_eigenvector(
    m: &PartialMapMatrix,
    cycle: &CycleReport,
) -> Result<EigenvectorCertificate> {
    if !cycle.found || cycle.elements.is_empty() {
        return Err(Error::NotACycle);
    }
    let n = m.n();
    let support = cycle.support();
    if support.windows(2).any(|w| w[0] == w[1]) || support.iter().any(|&y| y == 0 || y > n) {
        return Err(Error::NotACycle);
    }
    let mut v = vec![0u32; n + 1];
    for &y in &support {
        v[y] = 1;
    }
    // (M v)_i counts columns j with v_j = 1 and row i.
    let mut mv = vec![0u32; n + 1];
    for &j in &support {
        mv[m.col_to_row[j]] += 1;
    }
    if mv[1..] != v[1..] {
        return Err(Error::NotACycle);
    }
    Ok(EigenvectorCertificate { support })
}
