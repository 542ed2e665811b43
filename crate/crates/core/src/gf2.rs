//! Dense matrices over Z_2 with bit-packed rows.

use std::fmt;

use crate::bits::BitVec;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    n_cols: usize,
    rows: Vec<BitVec>,
}

/// Reduced row echelon form together with the pivot column of each nonzero row.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<BitVec>,
    pub pivots: Vec<usize>,
}

impl Gf2Matrix {
    pub fn new(n_cols: usize) -> Self {
        Gf2Matrix { n_cols, rows: Vec::new() }
    }

    pub fn from_rows(n_cols: usize, rows: Vec<BitVec>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != n_cols) {
            return Err(Error::WidthMismatch { expected: n_cols, found: r.len() });
        }
        Ok(Gf2Matrix { n_cols, rows })
    }

    pub fn identity(n: usize) -> Self {
        Gf2Matrix { n_cols: n, rows: (0..n).map(|k| BitVec::unit(n, k)).collect() }
    }

    pub fn push(&mut self, row: BitVec) -> Result<()> {
        if row.len() != self.n_cols {
            return Err(Error::WidthMismatch { expected: self.n_cols, found: row.len() });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVec> {
        self.rows
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut cols = vec![BitVec::zeros(self.rows.len()); self.n_cols];
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.iter_ones() {
                cols[j].set(i, true);
            }
        }
        Gf2Matrix { n_cols: self.rows.len(), rows: cols }
    }

    /// Gauss-Jordan elimination; zero rows are dropped.
    pub fn echelon(&self) -> Echelon {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut top = 0;
        for col in 0..self.n_cols {
            let Some(found) = (top..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(top, found);
            let pivot_row = rows[top].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != top && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            top += 1;
            if top == rows.len() {
                break;
            }
        }
        rows.truncate(top);
        Echelon { rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of the right null space `{v : M v = 0}`, one basis vector per row.
    pub fn kernel(&self) -> Gf2Matrix {
        let ech = self.echelon();
        let mut is_pivot = vec![false; self.n_cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.n_cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVec::unit(self.n_cols, free);
            for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                if row.get(free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        Gf2Matrix { n_cols: self.n_cols, rows: basis }
    }

    /// Basis of the left null space: coefficient vectors `c` with
    /// `sum_i c_i row_i = 0`. Its dimension is `n_rows - rank`.
    pub fn left_kernel(&self) -> Gf2Matrix {
        self.transpose().kernel()
    }

    /// `M v` as a bit vector indexed by row.
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        BitVec::from_bools(self.rows.iter().map(|r| r.dot(v)))
    }

    /// `sum_i c_i row_i`.
    pub fn combine(&self, coeffs: &BitVec) -> BitVec {
        let mut acc = BitVec::zeros(self.n_cols);
        for i in coeffs.iter_ones() {
            acc.xor_assign(&self.rows[i]);
        }
        acc
    }

    /// Whether `v` lies in the row space.
    pub fn spans(&self, v: &BitVec) -> bool {
        let mut stacked = self.clone();
        let before = stacked.rank();
        stacked.rows.push(v.clone());
        stacked.rank() == before
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{} [", self.rows.len(), self.n_cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

/// Rank of the matrix whose rows are given.
pub fn gf2_rank(m: &Gf2Matrix) -> usize {
    m.rank()
}

/// Left-kernel basis; see [`Gf2Matrix::left_kernel`].
pub fn gf2_kernel(m: &Gf2Matrix) -> Gf2Matrix {
    m.left_kernel()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&str]) -> Gf2Matrix {
        let rows: Vec<BitVec> = rows.iter().map(|r| r.parse().unwrap()).collect();
        Gf2Matrix::from_rows(rows[0].len(), rows).unwrap()
    }

    #[test]
    fn rank_of_dependent_triple() {
        assert_eq!(mat(&["110", "011", "101"]).rank(), 2);
    }

    #[test]
    fn empty_matrix_has_rank_zero() {
        let m = Gf2Matrix::new(7);
        assert_eq!(m.rank(), 0);
        assert_eq!(m.kernel().n_rows(), 7);
        assert_eq!(m.left_kernel().n_rows(), 0);
    }

    #[test]
    fn five_qubit_code_pair_vectors_span_w4() {
        let m = mat(&["01010", "00110", "11000", "00011"]);
        assert_eq!(m.rank(), 4);
    }

    #[test]
    fn kernels_are_annihilated() {
        let m = mat(&["1101", "0111", "1010", "0000"]);
        let r = m.rank();
        let right = m.kernel();
        assert_eq!(r + right.n_rows(), m.n_cols());
        for v in right.rows() {
            assert!(m.mul_vec(v).is_zero());
        }
        let left = m.left_kernel();
        assert_eq!(r + left.n_rows(), m.n_rows());
        for c in left.rows() {
            assert!(m.combine(c).is_zero());
        }
    }

    #[test]
    fn width_mismatch_rejected() {
        let mut m = Gf2Matrix::new(3);
        assert!(m.push("1010".parse().unwrap()).is_err());
    }
}
