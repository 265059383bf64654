use num_bigint::BigUint;

use crate::analytic::slice_ranks;
use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::points::{big_power, point_index, span, Budget, Points};
use crate::trilinear::{Axis, SubspaceBasis, Trilinear};

/// A point `v0` and the subspace `U' = {u : f(u, v0, .) = 0}` it cuts out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodSubspace {
    pub v0: Vec<FieldElem>,
    pub basis: SubspaceBasis,
    pub codim: usize,
    /// Independent forms `u -> f(u, v0, e_l)` whose common zero set is `U'`.
    pub cutting_forms: Vec<Vec<FieldElem>>,
    /// `|Z| |Z(v0)| q^codim + |Z| sum_{u in Z(v0)} q^(rk f[u])`.
    pub lhs: BigUint,
    /// `q |U| |V| |Z(v0)|`.
    pub rhs: BigUint,
    /// Number of `v0` examined, including the one returned.
    pub candidates_tried: u64,
}

/// The first `v0` in enumeration order with
/// `q^(rk f<v0>) + E_{u in Z(v0)} q^(rk f[u]) <= q^(ark + 1)`, tested on
/// integers with denominators cleared.
pub fn find_good_subspace(f: &Trilinear, budget: Budget) -> Result<GoodSubspace> {
    let ranks = slice_ranks(f, Axis::U, budget)?;
    let z = zero_set_size(f, &ranks);
    search(f, &ranks, &z, budget)
}

pub(crate) fn zero_set_size(f: &Trilinear, u_ranks: &[usize]) -> BigUint {
    let q = f.field().q();
    let nv = f.dim(Axis::V);
    u_ranks.iter().map(|&rk| big_power(q, nv - rk)).sum()
}

pub(crate) fn search(
    f: &Trilinear,
    u_ranks: &[usize],
    z: &BigUint,
    budget: Budget,
) -> Result<GoodSubspace> {
    let field = f.field();
    let q = field.q();
    let [nu, nv, _] = f.dims();
    budget.check(field, nv, "points of V")?;
    let scale = BigUint::from(q) * big_power(q, nu + nv);
    let mut tried = 0u64;
    for v0 in Points::new(field, nv) {
        tried += 1;
        let slice = f.slice(Axis::V, &v0)?;
        let kernel = slice.left_kernel();
        let codim = nu - kernel.len();
        let kernel_size = big_power(q, kernel.len());
        let rank_sum: BigUint = span(field, nu, &kernel)
            .iter()
            .map(|u| big_power(q, u_ranks[point_index(field, u)]))
            .sum();
        let lhs = z * &kernel_size * big_power(q, codim) + z * rank_sum;
        let rhs = &scale * &kernel_size;
        if lhs <= rhs {
            let (c, _) = slice.rank_factorization();
            return Ok(GoodSubspace {
                basis: SubspaceBasis::new(field, nu, kernel)?,
                v0,
                codim,
                cutting_forms: c.transpose().row_vecs(),
                lhs,
                rhs,
                candidates_tried: tried,
            });
        }
    }
    Err(Error::Invariant(format!(
        "no v0 among {tried} candidates satisfies the averaging inequality"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::matrix::dot;
    use crate::trilinear::{diagonal, random_form};

    #[test]
    fn zero_tensor_takes_everything() {
        let f = make_field(3, 1).unwrap();
        let g = find_good_subspace(&Trilinear::zeros(&f, [2, 2, 2]), Budget::default()).unwrap();
        assert_eq!(g.v0, vec![FieldElem::ZERO; 2]);
        assert_eq!(g.codim, 0);
        assert_eq!(g.basis.dim(), 2);
        assert!(g.cutting_forms.is_empty());
    }

    #[test]
    fn diagonal_two_passes_at_zero() {
        let f = make_field(2, 1).unwrap();
        let g = find_good_subspace(&diagonal(&f, 2), Budget::default()).unwrap();
        assert_eq!(g.v0, vec![FieldElem::ZERO; 2]);
        assert_eq!(g.codim, 0);
        assert_eq!(g.lhs, BigUint::from(117u32));
        assert_eq!(g.rhs, BigUint::from(128u32));
        assert_eq!(g.candidates_tried, 1);
    }

    #[test]
    fn rank_one_passes_at_zero() {
        let f = make_field(2, 1).unwrap();
        let mut t = Trilinear::zeros(&f, [2, 2, 2]);
        t.set(0, 0, 0, FieldElem::ONE);
        let g = find_good_subspace(&t, Budget::default()).unwrap();
        assert_eq!(g.codim, 0);
        assert_eq!(g.lhs, BigUint::from(120u32));
        assert_eq!(g.rhs, BigUint::from(128u32));
    }

    #[test]
    fn cutting_forms_vanish_exactly_on_the_subspace() {
        let f = make_field(3, 1).unwrap();
        for seed in 0..20 {
            let t = random_form(&f, [3, 2, 3], seed);
            let g = find_good_subspace(&t, Budget::default()).unwrap();
            assert_eq!(g.cutting_forms.len(), g.codim);
            let members = span(&f, 3, g.basis.vectors());
            for u in Points::new(&f, 3) {
                let inside = members.contains(&u);
                let cut = g.cutting_forms.iter().all(|l| dot(&f, l, &u).is_zero());
                assert_eq!(inside, cut);
            }
        }
    }
}
