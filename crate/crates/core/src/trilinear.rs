//! Trilinear forms `f : U x V x W -> F_q` as dense coefficient tensors.
//!
//! `f(u, v, w) = sum T[i][j][l] u_i v_j w_l`, stored row-major in `(i, j, l)`.
//! Any axis may have dimension zero, in which case the form is identically
//! zero; every operation here accepts that case.
//!
//! Substitutions follow one convention throughout. For a matrix `P` whose
//! rows are vectors of the old space, [`Trilinear::substitute`] produces
//! `g(x, ., .) = f(x P, ., .)`. Restriction to a subspace is substitution by
//! its basis, and a change of basis is substitution by an invertible `P`
//! whose rows are the new basis vectors written in old coordinates, so that
//! `g(u P^-1, v, w) = f(u, v, w)`.

use std::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};
use crate::matrix::MatrixFq;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axis {
    U,
    V,
    W,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::U, Axis::V, Axis::W];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }

    /// The two remaining axes in canonical order; these index the rows and
    /// columns of a slice.
    pub fn others(self) -> (Axis, Axis) {
        match self {
            Axis::U => (Axis::V, Axis::W),
            Axis::V => (Axis::U, Axis::W),
            Axis::W => (Axis::U, Axis::V),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axis::U => "U",
            Axis::V => "V",
            Axis::W => "W",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Axis> {
        match s {
            "U" | "u" => Ok(Axis::U),
            "V" | "v" => Ok(Axis::V),
            "W" | "w" => Ok(Axis::W),
            other => Err(Error::Malformed(format!("unknown axis {other:?}"))),
        }
    }
}

/// A basis of a subspace of `F_q^ambient_dim`, one vector per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    vectors: Vec<Vec<FieldElem>>,
}

impl SubspaceBasis {
    pub fn new(field: &FieldSpec, ambient_dim: usize, vectors: Vec<Vec<FieldElem>>) -> Result<Self> {
        let m = MatrixFq::from_rows(field, ambient_dim, &vectors)?;
        if m.rank() < vectors.len() {
            return Err(Error::DependentVectors);
        }
        Ok(SubspaceBasis {
            ambient_dim,
            vectors,
        })
    }

    pub fn full(n: usize) -> Self {
        SubspaceBasis {
            ambient_dim: n,
            vectors: (0..n).map(|i| crate::points::unit_vector(n, i)).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim - self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<FieldElem>] {
        &self.vectors
    }

    /// The `dim x ambient_dim` embedding matrix (rows are basis vectors).
    pub fn embedding(&self, field: &FieldSpec) -> MatrixFq {
        MatrixFq::from_rows(field, self.ambient_dim, &self.vectors).expect("validated at construction")
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Trilinear {
    field: FieldSpec,
    dims: [usize; 3],
    coeffs: Vec<FieldElem>,
}

impl Trilinear {
    pub fn zeros(field: &FieldSpec, dims: [usize; 3]) -> Self {
        Trilinear {
            field: field.clone(),
            dims,
            coeffs: vec![FieldElem::ZERO; dims.iter().product()],
        }
    }

    pub fn from_coeffs(field: &FieldSpec, dims: [usize; 3], coeffs: Vec<FieldElem>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if coeffs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: coeffs.len(),
            });
        }
        for c in &coeffs {
            field.elem(c.value())?;
        }
        Ok(Trilinear {
            field: field.clone(),
            dims,
            coeffs,
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn dim(&self, axis: Axis) -> usize {
        self.dims[axis.index()]
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, l: usize) -> FieldElem {
        self.coeffs[self.offset(i, j, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, l: usize, v: FieldElem) {
        let o = self.offset(i, j, l);
        self.coeffs[o] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Number of nonzero coefficients.
    pub fn support_size(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    fn check_len(&self, axis: Axis, len: usize) -> Result<()> {
        let expected = self.dim(axis);
        if expected == len {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, got: len })
        }
    }

    pub fn eval(&self, u: &[FieldElem], v: &[FieldElem], w: &[FieldElem]) -> Result<FieldElem> {
        let s = self.slice(Axis::U, u)?;
        s.bilinear(v, w)
    }

    /// The bilinear form obtained by fixing `axis` at `point`. Rows and
    /// columns follow [`Axis::others`]: `f[u]` is `n_v x n_w`, `f<v>` is
    /// `n_u x n_w`, and the `W`-slice is `n_u x n_v`.
    pub fn slice(&self, axis: Axis, point: &[FieldElem]) -> Result<MatrixFq> {
        self.check_len(axis, point.len())?;
        let f = &self.field;
        let [nu, nv, nw] = self.dims;
        let (ra, ca) = axis.others();
        let mut m = MatrixFq::zeros(f, self.dim(ra), self.dim(ca));
        for i in 0..nu {
            for j in 0..nv {
                for l in 0..nw {
                    let c = self.get(i, j, l);
                    if c.is_zero() {
                        continue;
                    }
                    let (x, r, col) = match axis {
                        Axis::U => (point[i], j, l),
                        Axis::V => (point[j], i, l),
                        Axis::W => (point[l], i, j),
                    };
                    if x.is_zero() {
                        continue;
                    }
                    let v = f.mul_add(x, c, m.get(r, col));
                    m.set(r, col, v);
                }
            }
        }
        Ok(m)
    }

    /// `g(.., x, ..) = f(.., x P, ..)` on `axis`, where `P` has one row per
    /// new coordinate and one column per old coordinate.
    pub fn substitute(&self, axis: Axis, p: &MatrixFq) -> Result<Trilinear> {
        self.check_len(axis, p.cols())?;
        let f = &self.field;
        let mut dims = self.dims;
        dims[axis.index()] = p.rows();
        let mut out = Trilinear::zeros(f, dims);
        let [nu, nv, nw] = self.dims;
        for i in 0..nu {
            for j in 0..nv {
                for l in 0..nw {
                    let c = self.get(i, j, l);
                    if c.is_zero() {
                        continue;
                    }
                    let old = [i, j, l][axis.index()];
                    for a in 0..p.rows() {
                        let coef = p.get(a, old);
                        if coef.is_zero() {
                            continue;
                        }
                        let mut idx = [i, j, l];
                        idx[axis.index()] = a;
                        let o = out.offset(idx[0], idx[1], idx[2]);
                        out.coeffs[o] = f.mul_add(coef, c, out.coeffs[o]);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Restriction of `axis` to the subspace spanned by `basis`; the result's
    /// coordinates on that axis are coefficients with respect to the basis.
    pub fn restrict(&self, axis: Axis, basis: &SubspaceBasis) -> Result<Trilinear> {
        self.check_len(axis, basis.ambient_dim())?;
        self.substitute(axis, &basis.embedding(&self.field))
    }

    /// Re-coordinatizes `axis` so that the rows of the invertible `p` become
    /// the standard basis.
    pub fn change_basis(&self, axis: Axis, p: &MatrixFq) -> Result<Trilinear> {
        if p.rows() != p.cols() {
            return Err(Error::DimensionMismatch {
                expected: p.cols(),
                got: p.rows(),
            });
        }
        self.check_len(axis, p.cols())?;
        if p.rank() < p.rows() {
            return Err(Error::SingularMatrix);
        }
        self.substitute(axis, p)
    }

    /// Relabels axes: axis `k` of the result is axis `order[k]` of `self`.
    pub fn permute_axes(&self, order: [Axis; 3]) -> Result<Trilinear> {
        let mut seen = [false; 3];
        for a in order {
            seen[a.index()] = true;
        }
        if seen.contains(&false) {
            return Err(Error::Malformed(format!("{order:?} is not a permutation")));
        }
        let dims = order.map(|a| self.dim(a));
        let mut out = Trilinear::zeros(&self.field, dims);
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for l in 0..dims[2] {
                    let mut old = [0; 3];
                    old[order[0].index()] = i;
                    old[order[1].index()] = j;
                    old[order[2].index()] = l;
                    out.set(i, j, l, self.get(old[0], old[1], old[2]));
                }
            }
        }
        Ok(out)
    }

    /// The form `alpha(x_axis) * B(x_rows, x_cols)` with `B` indexed by
    /// [`Axis::others`].
    pub fn outer(
        field: &FieldSpec,
        dims: [usize; 3],
        axis: Axis,
        linear: &[FieldElem],
        bilinear: &MatrixFq,
    ) -> Result<Trilinear> {
        let (ra, ca) = axis.others();
        let mut out = Trilinear::zeros(field, dims);
        out.check_len(axis, linear.len())?;
        out.check_len(ra, bilinear.rows())?;
        out.check_len(ca, bilinear.cols())?;
        out.add_outer(axis, linear, bilinear);
        Ok(out)
    }

    /// Adds `alpha (x) B` in place; shapes must already match.
    pub(crate) fn add_outer(&mut self, axis: Axis, linear: &[FieldElem], bilinear: &MatrixFq) {
        let f = self.field.clone();
        for (a, &alpha) in linear.iter().enumerate() {
            if alpha.is_zero() {
                continue;
            }
            for r in 0..bilinear.rows() {
                for c in 0..bilinear.cols() {
                    let b = bilinear.get(r, c);
                    if b.is_zero() {
                        continue;
                    }
                    let (i, j, l) = match axis {
                        Axis::U => (a, r, c),
                        Axis::V => (r, a, c),
                        Axis::W => (r, c, a),
                    };
                    let o = self.offset(i, j, l);
                    self.coeffs[o] = f.mul_add(alpha, b, self.coeffs[o]);
                }
            }
        }
    }

    pub fn add(&self, other: &Trilinear) -> Result<Trilinear> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.q().into(),
                right: other.field.q().into(),
            });
        }
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.coeffs.len(),
                got: other.coeffs.len(),
            });
        }
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(Trilinear {
            coeffs,
            ..self.clone()
        })
    }

    /// `f(u, v, .)` as a vector indexed by the `W` coordinate.
    pub fn contract_uv(&self, u: &[FieldElem], v: &[FieldElem]) -> Result<Vec<FieldElem>> {
        self.slice(Axis::U, u)?.left_mul_vec(v)
    }
}

impl fmt::Debug for Trilinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Trilinear<F_{}>{:?} {{", self.field.q(), self.dims)?;
        let [nu, nv, nw] = self.dims;
        for i in 0..nu {
            for j in 0..nv {
                for l in 0..nw {
                    let c = self.get(i, j, l);
                    if !c.is_zero() {
                        write!(f, " ({i},{j},{l})={c}")?;
                    }
                }
            }
        }
        write!(f, " }}")
    }
}

/// The diagonal form `sum_i u_i v_i w_i` on `F_q^n` cubed.
pub fn diagonal(field: &FieldSpec, n: usize) -> Trilinear {
    let mut t = Trilinear::zeros(field, [n; 3]);
    for i in 0..n {
        t.set(i, i, i, FieldElem::ONE);
    }
    t
}

/// Uniform random coefficients from a seeded ChaCha8 stream.
///
/// The generator is `ChaCha8Rng::from_seed(s)` where `s` is the 32-byte seed
/// holding `seed` in little-endian order in its first eight bytes and zeros
/// elsewhere. Coefficients are drawn in row-major `(i, j, l)` order; each one
/// takes successive `next_u32` outputs `x`, rejects those with
/// `x >= floor(2^32 / q) * q`, and keeps `x mod q`.
pub fn random_form(field: &FieldSpec, dims: [usize; 3], seed: u64) -> Trilinear {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(bytes);
    let q = u64::from(field.q());
    let zone = (1u64 << 32) / q * q;
    let n: usize = dims.iter().product();
    let coeffs = (0..n)
        .map(|_| loop {
            let x = u64::from(rng.next_u32());
            if x < zone {
                break FieldElem::from_index((x % q) as u32);
            }
        })
        .collect();
    Trilinear {
        field: field.clone(),
        dims,
        coeffs,
    }
}
