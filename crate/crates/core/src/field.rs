//! Finite fields `F_q`, `q = p^k`, with table-driven arithmetic.
//!
//! Elements are encoded as integers in `[0, q)`: the element
//! `c_0 + c_1 x + ... + c_{k-1} x^{k-1}` of `F_p[x] / (m(x))` is stored as
//! `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`. The reduction polynomial `m` is the
//! lexicographically smallest monic irreducible polynomial of degree `k`,
//! where polynomials are compared by the same base-`p` encoding. For `k = 1`
//! that polynomial is `x` and arithmetic is plain arithmetic mod `p`.
//!
//! Multiplication goes through exp/log tables over a primitive element, so a
//! field costs `O(q)` memory. Addition uses a full table for `q <= 256` and
//! digit-wise arithmetic otherwise.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order accepted by [`make_field`].
pub const DEFAULT_FIELD_CAP: u64 = 1 << 16;

const ADD_TABLE_LIMIT: u32 = 256;

/// An element of some `F_q`, stored as its polynomial-basis index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    /// Wraps a raw index without range checking; see [`FieldSpec::elem`].
    pub const fn from_index(value: u32) -> Self {
        FieldElem(value)
    }

    pub const fn value(self) -> u32 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The four primitive operations, for callers that dispatch dynamically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Inv,
    Neg,
}

struct Tables {
    p: u32,
    k: u32,
    q: u32,
    /// Coefficients of the reduction polynomial, lowest degree first, monic.
    reduction: Vec<u32>,
    /// `exp[i] = g^i` for `i < 2(q-1)`, so products of logs need no reduction.
    exp: Vec<u32>,
    /// `log[a]` for `a != 0`; `log[0]` is unused.
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
}

/// Description of `F_q` together with its arithmetic tables.
///
/// Cloning is cheap (the tables are shared) and the value is immutable, so a
/// `FieldSpec` can be used from any number of threads.
#[derive(Clone)]
pub struct FieldSpec {
    tables: Arc<Tables>,
}

/// Builds `F_{p^k}` with the default order cap of `2^16`.
pub fn make_field(p: u64, k: u32) -> Result<FieldSpec> {
    FieldSpec::with_cap(p, k, DEFAULT_FIELD_CAP)
}

impl FieldSpec {
    /// Builds `F_{p^k}`, rejecting orders above `cap`.
    pub fn with_cap(p: u64, k: u32, cap: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::ZeroDegree);
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= cap && q <= u64::from(u32::MAX))
            .ok_or(Error::FieldTooLarge { p, k, cap })?;
        let (p, q) = (p as u32, q as u32);

        let reduction = smallest_irreducible(p, k);
        let mul = |a: u32, b: u32| poly_mul_mod(a, b, p, &reduction);
        let (exp, log) = build_exp_log(q, mul);

        let neg = (0..q).map(|a| digitwise(a, 0, p, k, |x, _| (p - x) % p)).collect();
        let add = (q <= ADD_TABLE_LIMIT).then(|| {
            let mut table = Vec::with_capacity((q * q) as usize);
            for a in 0..q {
                for b in 0..q {
                    table.push(digitwise(a, b, p, k, |x, y| (x + y) % p));
                }
            }
            table
        });

        Ok(FieldSpec {
            tables: Arc::new(Tables {
                p,
                k,
                q,
                reduction,
                exp,
                log,
                neg,
                add,
            }),
        })
    }

    pub fn p(&self) -> u32 {
        self.tables.p
    }

    pub fn k(&self) -> u32 {
        self.tables.k
    }

    pub fn q(&self) -> u32 {
        self.tables.q
    }

    /// Reduction polynomial coefficients, constant term first (length `k + 1`).
    pub fn reduction_poly(&self) -> &[u32] {
        &self.tables.reduction
    }

    /// Checked conversion from a raw index.
    pub fn elem(&self, value: u32) -> Result<FieldElem> {
        if value < self.q() {
            Ok(FieldElem(value))
        } else {
            Err(Error::ElementOutOfRange {
                value,
                q: u64::from(self.q()),
            })
        }
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q()).map(FieldElem)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let t = &*self.tables;
        let v = if t.p == 2 {
            a.0 ^ b.0
        } else if t.k == 1 {
            (a.0 + b.0) % t.p
        } else if let Some(add) = &t.add {
            add[(a.0 * t.q + b.0) as usize]
        } else {
            digitwise(a.0, b.0, t.p, t.k, |x, y| (x + y) % t.p)
        };
        FieldElem(v)
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.tables.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        let t = &*self.tables;
        FieldElem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::InverseOfZero);
        }
        let t = &*self.tables;
        let order = t.q - 1;
        Ok(FieldElem(t.exp[((order - t.log[a.0 as usize]) % order) as usize]))
    }

    /// `a * b + c`, the inner step of every elimination loop.
    #[inline]
    pub fn mul_add(&self, a: FieldElem, b: FieldElem, c: FieldElem) -> FieldElem {
        self.add(self.mul(a, b), c)
    }

    /// Dispatches one of the primitive operations. `b` is ignored by the
    /// unary operations.
    pub fn apply(&self, op: FieldOp, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        let q = u64::from(self.q());
        for x in [a, b] {
            if u64::from(x.0) >= q {
                return Err(Error::ElementOutOfRange { value: x.0, q });
            }
        }
        match op {
            FieldOp::Add => Ok(self.add(a, b)),
            FieldOp::Mul => Ok(self.mul(a, b)),
            FieldOp::Inv => self.inv(a),
            FieldOp::Neg => Ok(self.neg(a)),
        }
    }

    /// `q^n` as an exact u64, if it fits.
    pub fn checked_power(&self, n: usize) -> Option<u64> {
        u64::from(self.q()).checked_pow(u32::try_from(n).ok()?)
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p() == other.p() && self.k() == other.k()
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p())
            .field("k", &self.k())
            .field("reduction", &self.tables.reduction)
            .finish()
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn digitwise(mut a: u32, mut b: u32, p: u32, k: u32, op: impl Fn(u32, u32) -> u32) -> u32 {
    let mut out = 0;
    let mut place = 1;
    for _ in 0..k {
        out += op(a % p, b % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

fn decode(mut a: u32, p: u32, len: usize) -> Vec<u32> {
    let mut digits = vec![0; len];
    for d in digits.iter_mut() {
        *d = a % p;
        a /= p;
    }
    digits
}

fn encode(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Remainder of `a` modulo the monic polynomial `m`, coefficients mod `p`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let deg_m = m.len() - 1;
    let mut r = a.to_vec();
    while r.len() > deg_m {
        let lead = r.pop().unwrap_or(0);
        if lead != 0 {
            let shift = r.len() - deg_m;
            for (i, &c) in m[..deg_m].iter().enumerate() {
                let idx = shift + i;
                r[idx] = ((u64::from(r[idx]) + u64::from(p - c) * u64::from(lead)) % u64::from(p)) as u32;
            }
        }
    }
    r
}

fn poly_mul_mod(a: u32, b: u32, p: u32, m: &[u32]) -> u32 {
    let k = m.len() - 1;
    let (da, db) = (decode(a, p, k), decode(b, p, k));
    let mut prod = vec![0u32; 2 * k];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = ((u64::from(prod[i + j]) + u64::from(x) * u64::from(y)) % u64::from(p)) as u32;
        }
    }
    encode(&poly_rem(&prod, m, p), p)
}

fn is_irreducible(m: &[u32], p: u32) -> bool {
    let k = (m.len() - 1) as u32;
    for d in 1..=k / 2 {
        // Monic divisors of degree d: the low d coefficients range over p^d values.
        for low in 0..p.pow(d) {
            let mut divisor = decode(low, p, d as usize);
            divisor.push(1);
            if poly_rem(m, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    (0..p.pow(k))
        .map(|low| {
            let mut m = decode(low, p, k as usize);
            m.push(1);
            m
        })
        .find(|m| is_irreducible(m, p))
        .expect("an irreducible polynomial of every degree exists over F_p")
}

fn build_exp_log(q: u32, mul: impl Fn(u32, u32) -> u32) -> (Vec<u32>, Vec<u32>) {
    let order = (q - 1) as usize;
    for g in 1..q {
        let mut exp = Vec::with_capacity(2 * order);
        let mut x = 1;
        for _ in 0..order {
            exp.push(x);
            x = mul(x, g);
            if x == 1 {
                break;
            }
        }
        if exp.len() != order {
            continue;
        }
        let mut log = vec![0u32; q as usize];
        for (i, &v) in exp.iter().enumerate() {
            log[v as usize] = i as u32;
        }
        exp.extend_from_within(..);
        return (exp, log);
    }
    unreachable!("the multiplicative group of a finite field is cyclic")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_fields() -> Vec<FieldSpec> {
        [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (13, 1)]
            .into_iter()
            .map(|(p, k)| make_field(p, k).unwrap())
            .collect()
    }

    #[test]
    fn prime_field_f2() {
        let f = make_field(2, 1).unwrap();
        assert_eq!(f.q(), 2);
        // x, i.e. coefficients (0, 1)
        assert_eq!(f.reduction_poly(), &[0, 1]);
        assert_eq!(f.add(FieldElem::ONE, FieldElem::ONE), FieldElem::ZERO);
    }

    #[test]
    fn f4_uses_x2_x_1() {
        let f = make_field(2, 2).unwrap();
        assert_eq!(f.reduction_poly(), &[1, 1, 1]);
        // x * x = x + 1, encoded 2 * 2 = 3
        let x = f.elem(2).unwrap();
        assert_eq!(f.mul(x, x), f.elem(3).unwrap());
    }

    #[test]
    fn smallest_irreducible_by_enumeration() {
        // Independent check: an irreducible polynomial of degree <= 3 has no
        // roots, so for these degrees the first rootless monic is the answer.
        for (p, k) in [(2u32, 2u32), (2, 3), (3, 2), (3, 3), (5, 2)] {
            let first_rootless = (0..p.pow(k))
                .map(|low| {
                    let mut m = decode(low, p, k as usize);
                    m.push(1);
                    m
                })
                .find(|m| {
                    (0..p).all(|x| {
                        m.iter().rev().fold(0, |acc, &c| (acc * x + c) % p) != 0
                    })
                })
                .unwrap();
            assert_eq!(smallest_irreducible(p, k), first_rootless, "p={p} k={k}");
        }
        assert_eq!(smallest_irreducible(2, 3), vec![1, 1, 0, 1]);
    }

    #[test]
    fn degree_four_over_f2_skips_reducible_rootless() {
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2 has no roots but is reducible;
        // x^4 + x + 1 is the first irreducible.
        assert_eq!(smallest_irreducible(2, 4), vec![1, 1, 0, 0, 1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(make_field(4, 1).unwrap_err(), Error::NotPrime(4));
        assert_eq!(make_field(1, 1).unwrap_err(), Error::NotPrime(1));
        assert_eq!(make_field(2, 0).unwrap_err(), Error::ZeroDegree);
        assert!(matches!(
            make_field(2, 17),
            Err(Error::FieldTooLarge { .. })
        ));
        assert!(make_field(2, 16).is_ok());
    }

    #[test]
    fn inverse_of_zero_is_an_error() {
        let f = make_field(3, 1).unwrap();
        assert_eq!(f.inv(FieldElem::ZERO), Err(Error::InverseOfZero));
        assert_eq!(
            f.apply(FieldOp::Inv, FieldElem::ZERO, FieldElem::ZERO),
            Err(Error::InverseOfZero)
        );
        assert!(f.apply(FieldOp::Add, FieldElem::from_index(3), FieldElem::ONE).is_err());
    }

    #[test]
    fn axioms_exhaustive_small_fields() {
        for f in all_fields().into_iter().filter(|f| f.q() <= 16) {
            let el: Vec<_> = f.elements().collect();
            for &a in &el {
                assert_eq!(f.add(a, FieldElem::ZERO), a);
                assert_eq!(f.mul(a, FieldElem::ONE), a);
                assert_eq!(f.add(a, f.neg(a)), FieldElem::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElem::ONE);
                }
                for &b in &el {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &el {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn table_mul_agrees_with_polynomial_mul() {
        for f in all_fields() {
            for a in 0..f.q() {
                for b in 0..f.q() {
                    let expected = poly_mul_mod(a, b, f.p(), f.reduction_poly());
                    assert_eq!(f.mul(FieldElem(a), FieldElem(b)).value(), expected);
                }
            }
        }
    }

    #[test]
    fn large_field_digitwise_add() {
        // q = 625 > 256 exercises the non-table addition path.
        let f = make_field(5, 4).unwrap();
        for a in (0..f.q()).step_by(7) {
            let a = FieldElem(a);
            assert_eq!(f.sub(a, a), FieldElem::ZERO);
            let b = FieldElem(123);
            assert_eq!(f.sub(f.add(a, b), b), a);
        }
    }
}
