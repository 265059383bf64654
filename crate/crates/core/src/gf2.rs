//! Bit-packed rows over `F_2`, for the rank computations that dominate
//! every enumeration.

use crate::field::FieldElem;

/// A dense `F_2` matrix with each row packed into little-endian `u64` words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    /// Packs a row-major slice of `F_2` elements (values 0 or 1).
    pub fn from_entries(rows: usize, cols: usize, entries: &[FieldElem]) -> Self {
        let mut m = BitMatrix::zeros(rows, cols);
        for (i, row) in entries.chunks(cols.max(1)).take(rows).enumerate() {
            for (j, e) in row.iter().enumerate() {
                if e.value() & 1 == 1 {
                    m.data[i * m.words + j / 64] |= 1 << (j % 64);
                }
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let w = self.words;
        for k in 0..w {
            let v = self.data[src * w + k];
            self.data[dst * w + k] ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            let w = self.words;
            for k in 0..w {
                self.data.swap(a * w + k, b * w + k);
            }
        }
    }

    /// Rank by forward XOR elimination, pivoting on the first set bit in
    /// column order. Consumes the matrix since it is destroyed anyway.
    pub fn rank(mut self) -> usize {
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(pivot) = (rank..self.rows).find(|&r| self.get(r, col)) else {
                continue;
            };
            self.swap_rows(pivot, rank);
            for r in rank + 1..self.rows {
                if self.get(r, col) {
                    self.xor_row_into(rank, r);
                }
            }
            rank += 1;
        }
        rank
    }
}
