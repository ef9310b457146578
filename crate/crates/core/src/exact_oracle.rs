//! Dense exact-integer linear algebra for cross-checking the sparse engine.
//!
//! Everything here works on [`BigInt`] entries and shares no code with the
//! partial-map machinery it verifies.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix_engine::{PartialMapMatrix, SparseSignMatrix};

/// Default dimension cap for dense verification.
pub const DEFAULT_ORACLE_LIMIT: usize = 512;

#[derive(Clone, PartialEq, Eq)]
pub struct DenseIntMatrix {
    n: usize,
    entries: Vec<BigInt>,
}

impl fmt::Debug for DenseIntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (1..=self.n)
            .map(|r| (1..=self.n).map(|c| self.get(r, c).to_string()).collect())
            .collect();
        f.debug_struct("DenseIntMatrix")
            .field("n", &self.n)
            .field("rows", &rows)
            .finish()
    }
}

impl DenseIntMatrix {
    pub fn zero(n: usize) -> Self {
        DenseIntMatrix {
            n,
            entries: vec![BigInt::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 1..=n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Row-major rows; all rows must have length `rows.len()`.
    pub fn from_rows<T: Into<BigInt> + Copy>(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                left: n,
                right: bad.len(),
            });
        }
        Ok(DenseIntMatrix {
            n,
            entries: rows.iter().flatten().map(|&v| v.into()).collect(),
        })
    }

    /// The unit matrix `E_n(a, b)` with a single 1 at `(a, b)`.
    pub fn unit(n: usize, a: usize, b: usize) -> Result<Self> {
        for idx in [a, b] {
            if idx == 0 || idx > n {
                return Err(Error::IndexOutOfRange { index: idx, n });
            }
        }
        let mut m = Self::zero(n);
        m.set(a, b, BigInt::one());
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry at 1-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        &self.entries[(row - 1) * self.n + (col - 1)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: BigInt) {
        self.entries[(row - 1) * self.n + (col - 1)] = value;
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }
}

impl From<&PartialMapMatrix> for DenseIntMatrix {
    fn from(m: &PartialMapMatrix) -> Self {
        let mut d = DenseIntMatrix::zero(m.n());
        for (j, &r) in m.rows().iter().enumerate() {
            if r != 0 {
                d.set(r, j + 1, BigInt::one());
            }
        }
        d
    }
}

impl From<&SparseSignMatrix> for DenseIntMatrix {
    fn from(s: &SparseSignMatrix) -> Self {
        let mut d = DenseIntMatrix::zero(s.n());
        for (r, c, v) in s.entries() {
            d.set(r, c, BigInt::from(v));
        }
        d
    }
}

pub fn dense_from_sparse<'a, S>(s: &'a S) -> DenseIntMatrix
where
    DenseIntMatrix: From<&'a S>,
{
    DenseIntMatrix::from(s)
}

/// Exact product `a * b`.
pub fn dense_mul(a: &DenseIntMatrix, b: &DenseIntMatrix) -> Result<DenseIntMatrix> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            left: a.n,
            right: b.n,
        });
    }
    let n = a.n;
    let mut out = DenseIntMatrix::zero(n);
    for i in 0..n {
        for k in 0..n {
            let aik = &a.entries[i * n + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                let bkj = &b.entries[k * n + j];
                if !bkj.is_zero() {
                    out.entries[i * n + j] += aik * bkj;
                }
            }
        }
    }
    Ok(out)
}

/// `a^k` by repeated multiplication; `a^0 = I`.
pub fn dense_pow(a: &DenseIntMatrix, k: usize) -> DenseIntMatrix {
    let mut acc = DenseIntMatrix::identity(a.n);
    for _ in 0..k {
        acc = dense_mul(a, &acc).expect("same dimension");
    }
    acc
}

/// Determinant by fraction-free (Bareiss) elimination. Every division is
/// exact, so intermediates stay integral.
pub fn bareiss_det(a: &DenseIntMatrix) -> BigInt {
    let n = a.n;
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = (0..n)
        .map(|i| a.entries[i * n..(i + 1) * n].to_vec())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Largest dimension accepted by [`cofactor_det`].
pub const COFACTOR_LIMIT: usize = 6;

/// Determinant by Laplace expansion along the first row. Exponential; an
/// independent check of [`bareiss_det`] on small matrices.
pub fn cofactor_det(a: &DenseIntMatrix) -> Result<BigInt> {
    if a.n > COFACTOR_LIMIT {
        return Err(Error::SizeLimitExceeded {
            size: a.n,
            limit: COFACTOR_LIMIT,
        });
    }
    let rows: Vec<usize> = (0..a.n).collect();
    Ok(laplace(a, &rows, 0))
}

fn laplace(a: &DenseIntMatrix, cols: &[usize], row: usize) -> BigInt {
    if cols.is_empty() {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for (idx, &c) in cols.iter().enumerate() {
        let entry = &a.entries[row * a.n + c];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = laplace(a, &rest, row + 1);
        if idx % 2 == 0 {
            total += entry * minor;
        } else {
            total -= entry * minor;
        }
    }
    total
}

/// Determinant of `I - M`, which the theory pins to 0 or 1. Any other value
/// is reported as an internal error.
pub fn det_indicator(ihat: &SparseSignMatrix, limit: usize) -> Result<u8> {
    if ihat.n() > limit {
        return Err(Error::SizeLimitExceeded {
            size: ihat.n(),
            limit,
        });
    }
    let det = bareiss_det(&DenseIntMatrix::from(ihat));
    if det.is_zero() {
        Ok(0)
    } else if det.is_one() {
        Ok(1)
    } else {
        Err(Error::Internal(format!(
            "det(I - M) = {det}, expected 0 or 1"
        )))
    }
}

/// True iff `ihat * inv = I` exactly.
pub fn verify_inverse(
    ihat: &SparseSignMatrix,
    inv: &SparseSignMatrix,
    limit: usize,
) -> Result<bool> {
    if ihat.n() != inv.n() {
        return Err(Error::DimensionMismatch {
            left: ihat.n(),
            right: inv.n(),
        });
    }
    if ihat.n() > limit {
        return Err(Error::SizeLimitExceeded {
            size: ihat.n(),
            limit,
        });
    }
    let product = dense_mul(&DenseIntMatrix::from(ihat), &DenseIntMatrix::from(inv))?;
    Ok(product.is_identity())
}

/// `E_n(a, b) * E_n(c, d)`.
pub fn en_product(n: usize, a: usize, b: usize, c: usize, d: usize) -> Result<DenseIntMatrix> {
    let left = DenseIntMatrix::unit(n, a, b)?;
    let right = DenseIntMatrix::unit(n, c, d)?;
    dense_mul(&left, &right)
}
