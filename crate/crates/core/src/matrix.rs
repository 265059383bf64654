//! Dense matrices over `F_q` with exact elimination.
//!
//! Every routine pivots on the first nonzero entry found scanning columns
//! left to right (rows top to bottom within a column), so kernels,
//! factorizations and completions are reproducible bit for bit.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};
use crate::gf2::BitMatrix;

#[derive(Clone, PartialEq, Eq)]
pub struct MatrixFq {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    entries: Vec<FieldElem>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: MatrixFq,
    pub pivots: Vec<usize>,
}

impl MatrixFq {
    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Self {
        MatrixFq {
            field: field.clone(),
            rows,
            cols,
            entries: vec![FieldElem::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        let mut m = MatrixFq::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, FieldElem::ONE);
        }
        m
    }

    pub fn from_entries(
        field: &FieldSpec,
        rows: usize,
        cols: usize,
        entries: Vec<FieldElem>,
    ) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        for e in &entries {
            field.elem(e.value())?;
        }
        Ok(MatrixFq {
            field: field.clone(),
            rows,
            cols,
            entries,
        })
    }

    /// Convenience constructor from raw indices, mainly for tests and docs.
    pub fn from_u32(field: &FieldSpec, rows: usize, cols: usize, values: &[u32]) -> Result<Self> {
        let entries = values.iter().map(|&v| FieldElem::from_index(v)).collect();
        MatrixFq::from_entries(field, rows, cols, entries)
    }

    /// Stacks equal-length row vectors; `width` fixes the column count when
    /// `rows` is empty.
    pub fn from_rows(field: &FieldSpec, width: usize, rows: &[Vec<FieldElem>]) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len() * width);
        for r in rows {
            if r.len() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    got: r.len(),
                });
            }
            entries.extend_from_slice(r);
        }
        MatrixFq::from_entries(field, rows.len(), width, entries)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[FieldElem] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<FieldElem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<FieldElem> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> MatrixFq {
        let mut t = MatrixFq::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, rhs: &MatrixFq) -> Result<MatrixFq> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: rhs.rows,
            });
        }
        let f = &self.field;
        let mut out = MatrixFq::zeros(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = f.mul_add(a, rhs.get(k, j), out.get(i, j));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &MatrixFq) -> Result<MatrixFq> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                got: rhs.rows * rhs.cols,
            });
        }
        let f = &self.field;
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(MatrixFq {
            entries,
            ..self.clone()
        })
    }

    /// Row vector times matrix, `x M`.
    pub fn left_mul_vec(&self, x: &[FieldElem]) -> Result<Vec<FieldElem>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: x.len(),
            });
        }
        let f = &self.field;
        let mut out = vec![FieldElem::ZERO; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.row(i)) {
                *o = f.mul_add(xi, m, *o);
            }
        }
        Ok(out)
    }

    /// Bilinear evaluation `x^T M y`.
    pub fn bilinear(&self, x: &[FieldElem], y: &[FieldElem]) -> Result<FieldElem> {
        if y.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: y.len(),
            });
        }
        let xm = self.left_mul_vec(x)?;
        Ok(dot(&self.field, &xm, y))
    }

    pub fn echelon(&self) -> Echelon {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut prow = 0;
        for col in 0..m.cols {
            if prow == m.rows {
                break;
            }
            let Some(pivot) = (prow..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(pivot, prow);
            let inv = f.inv(m.get(prow, col)).expect("pivot is nonzero");
            for j in col..m.cols {
                let v = f.mul(inv, m.get(prow, j));
                m.set(prow, j, v);
            }
            for r in 0..m.rows {
                let factor = m.get(r, col);
                if r == prow || factor.is_zero() {
                    continue;
                }
                let neg = f.neg(factor);
                for j in col..m.cols {
                    let v = f.mul_add(neg, m.get(prow, j), m.get(r, j));
                    m.set(r, j, v);
                }
            }
            pivots.push(col);
            prow += 1;
        }
        Echelon { reduced: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Rank by Gaussian elimination; `F_2` takes the bit-packed path.
    pub fn rank(&self) -> usize {
        if self.field.q() == 2 {
            BitMatrix::from_entries(self.rows, self.cols, &self.entries).rank()
        } else {
            self.echelon().pivots.len()
        }
    }

    /// Basis of `{x : x M = 0}` in reduced row echelon form. Its size is
    /// `rows - rank`.
    pub fn left_kernel(&self) -> Vec<Vec<FieldElem>> {
        let f = &self.field;
        // x M = 0  <=>  M^T x^T = 0: read the null space off rref(M^T).
        let Echelon { reduced, pivots } = self.transpose().echelon();
        let n = self.rows;
        let mut is_pivot = vec![false; n];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..n).filter(|&c| !is_pivot[c]) {
            let mut x = vec![FieldElem::ZERO; n];
            x[free] = FieldElem::ONE;
            for (r, &c) in pivots.iter().enumerate() {
                x[c] = f.neg(reduced.get(r, free));
            }
            basis.push(x);
        }
        if basis.is_empty() {
            return basis;
        }
        let canon = MatrixFq::from_rows(f, n, &basis)
            .expect("rows have ambient length")
            .echelon()
            .reduced;
        canon.row_vecs()
    }

    /// `M = C R` with `C` of shape `rows x t` and `R` of shape `t x cols`,
    /// `t = rank(M)`. `R` is the nonzero part of rref(M) and `C` collects the
    /// pivot columns of `M`.
    pub fn rank_factorization(&self) -> (MatrixFq, MatrixFq) {
        let Echelon { reduced, pivots } = self.echelon();
        let t = pivots.len();
        let mut c = MatrixFq::zeros(&self.field, self.rows, t);
        for (k, &p) in pivots.iter().enumerate() {
            for i in 0..self.rows {
                c.set(i, k, self.get(i, p));
            }
        }
        let r = MatrixFq {
            field: self.field.clone(),
            rows: t,
            cols: self.cols,
            entries: reduced.entries[..t * self.cols].to_vec(),
        };
        (c, r)
    }

    pub fn inverse(&self) -> Result<MatrixFq> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = MatrixFq::zeros(&self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, FieldElem::ONE);
        }
        let Echelon { reduced, pivots } = aug.echelon();
        if pivots.len() < n || pivots.iter().any(|&p| p >= n) {
            return Err(Error::SingularMatrix);
        }
        let mut inv = MatrixFq::zeros(&self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, reduced.get(i, n + j));
            }
        }
        Ok(inv)
    }

    /// Columns `range` of the matrix.
    pub fn select_columns(&self, range: std::ops::Range<usize>) -> MatrixFq {
        let mut out = MatrixFq::zeros(&self.field, self.rows, range.len());
        for i in 0..self.rows {
            for (k, j) in range.clone().enumerate() {
                out.set(i, k, self.get(i, j));
            }
        }
        out
    }

    /// Rows `range` of the matrix.
    pub fn select_rows(&self, range: std::ops::Range<usize>) -> MatrixFq {
        MatrixFq {
            field: self.field.clone(),
            rows: range.len(),
            cols: self.cols,
            entries: self.entries[range.start * self.cols..range.end * self.cols].to_vec(),
        }
    }
}

impl fmt::Debug for MatrixFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixFq<F_{}>{}x{} [", self.field.q(), self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<u32> = self.row(i).iter().map(|e| e.value()).collect();
            write!(f, "{row:?}")?;
        }
        write!(f, "]")
    }
}

pub fn dot(field: &FieldSpec, a: &[FieldElem], b: &[FieldElem]) -> FieldElem {
    a.iter()
        .zip(b)
        .fold(FieldElem::ZERO, |acc, (&x, &y)| field.mul_add(x, y, acc))
}

/// Extends independent rows `vs` of length `n` to an invertible `n x n`
/// matrix whose first rows are `vs`, appending standard basis vectors at the
/// non-pivot positions of rref(vs) in increasing order.
pub fn complete_to_basis(field: &FieldSpec, n: usize, vs: &[Vec<FieldElem>]) -> Result<MatrixFq> {
    let stacked = MatrixFq::from_rows(field, n, vs)?;
    let pivots = stacked.echelon().pivots;
    if pivots.len() < vs.len() {
        return Err(Error::DependentVectors);
    }
    let mut rows = vs.to_vec();
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    for j in (0..n).filter(|&j| !is_pivot[j]) {
        let mut e = vec![FieldElem::ZERO; n];
        e[j] = FieldElem::ONE;
        rows.push(e);
    }
    MatrixFq::from_rows(field, n, &rows)
}
