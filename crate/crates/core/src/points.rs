//! Enumeration of `F_q^n` in index order.
//!
//! Point `x` has index `sum_i x_i q^i`: the first coordinate is the least
//! significant digit, matching the base-`p` encoding of field elements.
//! Every "first point such that" rule in this crate means first in this
//! order, so the standard basis vector `e_1` precedes `e_2`.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};

/// Size limit for exhaustive enumerations, as a power of two.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub log2: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { log2: 24 }
    }
}

impl Budget {
    pub fn new(log2: u32) -> Self {
        Budget { log2 }
    }

    /// Number of points in `F_q^n`, or `BudgetExceeded` if it is larger than
    /// `2^log2`.
    pub fn check(&self, field: &FieldSpec, n: usize, what: &'static str) -> Result<usize> {
        let limit = 1u64.checked_shl(self.log2).unwrap_or(u64::MAX);
        match field.checked_power(n) {
            Some(count) if count <= limit && usize::try_from(count).is_ok() => Ok(count as usize),
            _ => Err(Error::BudgetExceeded {
                what,
                needed: format!("{}^{}", field.q(), n),
                budget_log2: self.log2,
            }),
        }
    }
}

/// `q^n` as a big integer.
pub fn big_power(q: u32, n: usize) -> BigUint {
    num_traits::pow::pow(BigUint::from(q), n)
}

pub fn point_at(field: &FieldSpec, n: usize, mut index: usize) -> Vec<FieldElem> {
    let q = field.q() as usize;
    let mut x = vec![FieldElem::ZERO; n];
    for slot in x.iter_mut() {
        *slot = FieldElem::from_index((index % q) as u32);
        index /= q;
    }
    x
}

pub fn point_index(field: &FieldSpec, x: &[FieldElem]) -> usize {
    let q = field.q() as usize;
    x.iter().rev().fold(0, |acc, e| acc * q + e.value() as usize)
}

/// Iterator over all of `F_q^n`, starting at the zero vector.
pub struct Points {
    q: u32,
    current: Vec<FieldElem>,
    done: bool,
}

impl Points {
    pub fn new(field: &FieldSpec, n: usize) -> Self {
        Points {
            q: field.q(),
            current: vec![FieldElem::ZERO; n],
            done: false,
        }
    }
}

impl Iterator for Points {
    type Item = Vec<FieldElem>;

    fn next(&mut self) -> Option<Vec<FieldElem>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        // Odometer increment, first coordinate fastest.
        self.done = true;
        for slot in self.current.iter_mut() {
            let v = slot.value() + 1;
            if v < self.q {
                *slot = FieldElem::from_index(v);
                self.done = false;
                break;
            }
            *slot = FieldElem::ZERO;
        }
        Some(out)
    }
}

/// All linear combinations of `basis` rows, in index order of the
/// coefficient vectors.
pub fn span(field: &FieldSpec, ambient: usize, basis: &[Vec<FieldElem>]) -> Vec<Vec<FieldElem>> {
    Points::new(field, basis.len())
        .map(|coeffs| combine(field, ambient, &coeffs, basis))
        .collect()
}

pub fn combine(
    field: &FieldSpec,
    ambient: usize,
    coeffs: &[FieldElem],
    basis: &[Vec<FieldElem>],
) -> Vec<FieldElem> {
    let mut x = vec![FieldElem::ZERO; ambient];
    for (&c, b) in coeffs.iter().zip(basis) {
        if c.is_zero() {
            continue;
        }
        for (xi, &bi) in x.iter_mut().zip(b) {
            *xi = field.mul_add(c, bi, *xi);
        }
    }
    x
}

pub fn add_vectors(field: &FieldSpec, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    a.iter().zip(b).map(|(&x, &y)| field.add(x, y)).collect()
}

pub fn unit_vector(n: usize, i: usize) -> Vec<FieldElem> {
    let mut e = vec![FieldElem::ZERO; n];
    e[i] = FieldElem::ONE;
    e
}

/// Projective representatives of the nonzero vectors of `F_q^n`: the first
/// nonzero coordinate is 1. There are `(q^n - 1) / (q - 1)` of them.
pub fn projective_points(field: &FieldSpec, n: usize) -> impl Iterator<Item = Vec<FieldElem>> {
    Points::new(field, n).filter(|x| x.iter().find(|e| !e.is_zero()) == Some(&FieldElem::ONE))
}
