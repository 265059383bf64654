//! Analytic rank, slice-rank search and slice-rank statistics.
//!
//! For `f : U x V x W -> F_q` the zero set is
//! `Z = {(u, v) : f(u, v, .) = 0}` and the analytic rank is
//! `ark(f) = log_q(|U| |V| / |Z|)`. `|Z|` is kept as an exact big integer;
//! the real number `r` only ever appears in reports.
//!
//! Which axis plays the role of `W` is a parameter ([`analytic_rank_on`]);
//! the plain functions distinguish `W`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::json::{bigstr, sig10};
use crate::matrix::MatrixFq;
use crate::points::{big_power, projective_points, Budget, Points};
use crate::trilinear::{Axis, SubspaceBasis, Trilinear};

/// Exact zero-set count and the derived analytic rank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArkReport {
    #[serde(with = "bigstr")]
    pub z_count: BigUint,
    #[serde(with = "bigstr")]
    pub total: BigUint,
    pub q: u32,
    #[serde(serialize_with = "sig10")]
    pub r: f64,
    /// `m` when `total = z_count * q^m` exactly.
    pub exact_power: Option<u64>,
    /// The distinguished axis, the one left free in `f(u, v, .)`.
    pub axis: Axis,
}

impl ArkReport {
    pub fn from_counts(q: u32, z_count: BigUint, total: BigUint, axis: Axis) -> Self {
        let r = log_ratio(q, &total, &z_count);
        let exact_power = exact_log(q, &total, &z_count);
        ArkReport {
            z_count,
            total,
            q,
            r,
            exact_power,
            axis,
        }
    }

    /// `floor(r)`, exactly: the largest `m` with `z_count * q^m <= total`.
    pub fn floor_r(&self) -> u64 {
        floor_log_ratio(self.q, &self.total, &self.z_count)
    }

    /// `true` iff `m <= r`, decided on the integers.
    pub fn r_at_least(&self, m: u64) -> bool {
        &self.z_count * big_power(self.q, m as usize) <= self.total
    }

    /// `ceil(log_q(r + 1))`, exactly: the least `m` with `r + 1 <= q^m`.
    pub fn ceil_log_r_plus_one(&self) -> u64 {
        ceil_log_r_plus_one(self.q, &self.total, &self.z_count)
    }
}

/// Histogram of slice ranks over every point of one axis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankHistogram {
    pub axis: Axis,
    pub counts: BTreeMap<usize, u64>,
}

impl RankHistogram {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn max_rank(&self) -> Option<usize> {
        self.counts.keys().next_back().copied()
    }

    /// `sum_rank count * q^(base - rank)`; with `base = n_v` over `U`-slices
    /// this is `|Z|`.
    fn weighted_kernel_sum(&self, q: u32, base: usize) -> BigUint {
        self.counts
            .iter()
            .map(|(&rk, &c)| BigUint::from(c) * big_power(q, base - rk))
            .sum()
    }
}

/// The axis order that makes `axis` the last (free) coordinate, keeping the
/// other two in canonical order.
pub fn frame_for(axis: Axis) -> [Axis; 3] {
    match axis {
        Axis::U => [Axis::V, Axis::W, Axis::U],
        Axis::V => [Axis::U, Axis::W, Axis::V],
        Axis::W => [Axis::U, Axis::V, Axis::W],
    }
}

/// Rank of `f`'s slice at every point of `axis`, indexed by point index.
pub fn slice_ranks(f: &Trilinear, axis: Axis, budget: Budget) -> Result<Vec<usize>> {
    let n = f.dim(axis);
    budget.check(f.field(), n, "slice points")?;
    Points::new(f.field(), n)
        .map(|x| Ok(f.slice(axis, &x)?.rank()))
        .collect()
}

pub fn rank_distribution(f: &Trilinear, axis: Axis, budget: Budget) -> Result<RankHistogram> {
    let mut counts = BTreeMap::new();
    for rk in slice_ranks(f, axis, budget)? {
        *counts.entry(rk).or_insert(0u64) += 1;
    }
    Ok(RankHistogram { axis, counts })
}

/// `|Z|` for `Z subset U x V`, computed by enumerating `via` (`U` or `V`)
/// and counting left-kernel sizes of the slices.
pub fn zero_set_count(f: &Trilinear, via: Axis, budget: Budget) -> Result<BigUint> {
    let other = match via {
        Axis::U => Axis::V,
        Axis::V => Axis::U,
        Axis::W => {
            return Err(Error::Malformed(
                "the zero set lives in U x V; enumerate U or V".into(),
            ))
        }
    };
    let hist = rank_distribution(f, via, budget)?;
    Ok(hist.weighted_kernel_sum(f.field().q(), f.dim(other)))
}

/// Analytic rank with `W` distinguished, by enumerating `u` and summing
/// `q^(n_v - rk f[u])`.
pub fn analytic_rank(f: &Trilinear, budget: Budget) -> Result<ArkReport> {
    let z = zero_set_count(f, Axis::U, budget)?;
    let total = big_power(f.field().q(), f.dim(Axis::U) + f.dim(Axis::V));
    Ok(ArkReport::from_counts(f.field().q(), z, total, Axis::W))
}

/// Analytic rank with an arbitrary distinguished axis.
pub fn analytic_rank_on(f: &Trilinear, axis: Axis, budget: Budget) -> Result<ArkReport> {
    let g = f.permute_axes(frame_for(axis))?;
    let mut report = analytic_rank(&g, budget)?;
    report.axis = axis;
    Ok(report)
}

/// The literal definition: test every pair `(u, v)` for `f(u, v, e_l) = 0`
/// for all `l`.
pub fn analytic_rank_direct(f: &Trilinear, budget: Budget) -> Result<ArkReport> {
    let field = f.field();
    let [nu, nv, nw] = f.dims();
    budget.check(field, nu + nv, "pairs (u, v)")?;
    let mut z = 0u64;
    for u in Points::new(field, nu) {
        for v in Points::new(field, nv) {
            let zero = (0..nw).all(|l| {
                let mut acc = crate::field::FieldElem::ZERO;
                for (i, &ui) in u.iter().enumerate() {
                    if ui.is_zero() {
                        continue;
                    }
                    for (j, &vj) in v.iter().enumerate() {
                        let t = f.get(i, j, l);
                        acc = field.add(acc, field.mul(field.mul(ui, vj), t));
                    }
                }
                acc.is_zero()
            });
            if zero {
                z += 1;
            }
        }
    }
    let total = big_power(field.q(), nu + nv);
    Ok(ArkReport::from_counts(field.q(), BigUint::from(z), total, Axis::W))
}

/// Both sides of the marginal identity
/// `sum_{(u,v) in Z} q^(rk f[u]) = |U| |V|` (or with `f<v>` for `axis = V`).
///
/// The left side is accumulated point by point as
/// `|{v : (u, v) in Z}| * q^(rk f[u])`, with the fiber size taken from the
/// left kernel of the slice and the rank from elimination, so the identity
/// is a genuine check of rank + nullity.
pub fn lemma1_sum(f: &Trilinear, axis: Axis, budget: Budget) -> Result<(BigUint, BigUint)> {
    if axis == Axis::W {
        return Err(Error::Malformed(
            "the identity is stated for U-slices or V-slices".into(),
        ));
    }
    let field = f.field();
    let q = field.q();
    budget.check(field, f.dim(axis), "slice points")?;
    let mut lhs = BigUint::zero();
    for x in Points::new(field, f.dim(axis)) {
        let s = f.slice(axis, &x)?;
        // For U-slices (n_v x n_w) the fiber is {v : v f[u] = 0}; for
        // V-slices (n_u x n_w) it is {u : u f<v> = 0}.
        let fiber = big_power(q, s.left_kernel().len());
        lhs += fiber * big_power(q, s.rank());
    }
    let rhs = big_power(q, f.dim(Axis::U) + f.dim(Axis::V));
    Ok((lhs, rhs))
}

/// Exact slice rank if it is at most `cap`, by hyperplane search.
///
/// `srk(f) <= m` iff `f = 0`, or some axis carries a nonzero linear form
/// `alpha` such that `f` restricted to `ker alpha` on that axis has slice
/// rank `<= m - 1`. Linear forms are enumerated projectively. Axes are tried
/// smallest dimension first. The only shortcut is the trivial bound
/// `srk(f) <= min(dims)`.
pub fn slice_rank_exact(f: &Trilinear, cap: usize) -> Option<usize> {
    (0..=cap).find(|&m| srk_at_most(f, m))
}

fn srk_at_most(f: &Trilinear, m: usize) -> bool {
    if f.is_zero() {
        return true;
    }
    if m == 0 {
        return false;
    }
    let dims = f.dims();
    if m >= *dims.iter().min().expect("three axes") {
        return true;
    }
    let mut axes = Axis::ALL;
    axes.sort_by_key(|a| (f.dim(*a), a.index()));
    let field = f.field();
    for axis in axes {
        let n = f.dim(axis);
        for alpha in projective_points(field, n) {
            let g = f
                .restrict(axis, &hyperplane(field, &alpha))
                .expect("hyperplane basis matches axis");
            if srk_at_most(&g, m - 1) {
                return true;
            }
        }
    }
    false
}

/// Basis of `ker alpha = {x : sum alpha_i x_i = 0}`.
fn hyperplane(field: &FieldSpec, alpha: &[crate::field::FieldElem]) -> SubspaceBasis {
    let col = MatrixFq::from_entries(field, alpha.len(), 1, alpha.to_vec()).expect("column shape");
    SubspaceBasis::new(field, alpha.len(), col.left_kernel()).expect("kernel basis is independent")
}

fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().expect("below f64 range").log2()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().expect("64-bit mantissa").log2() + shift as f64
    }
}

/// `log_q(total / z)` as a float.
pub fn log_ratio(q: u32, total: &BigUint, z: &BigUint) -> f64 {
    (log2_big(total) - log2_big(z)) / f64::from(q).log2()
}

fn exact_log(q: u32, total: &BigUint, z: &BigUint) -> Option<u64> {
    if z.is_zero() || total % z != BigUint::zero() {
        return None;
    }
    let mut ratio = total / z;
    let qb = BigUint::from(q);
    let mut m = 0;
    while ratio > BigUint::one() {
        if &ratio % &qb != BigUint::zero() {
            return None;
        }
        ratio /= &qb;
        m += 1;
    }
    Some(m)
}

pub(crate) fn floor_log_ratio(q: u32, total: &BigUint, z: &BigUint) -> u64 {
    let mut m = 0u64;
    let mut lhs = z.clone();
    let qb = BigUint::from(q);
    loop {
        lhs *= &qb;
        if lhs > *total {
            return m;
        }
        m += 1;
    }
}

/// Least `m >= 0` with `r + 1 <= q^m`, where `r = log_q(total / z)`.
/// `r + 1 <= q^m` iff `total <= z * q^(q^m - 1)`.
pub(crate) fn ceil_log_r_plus_one(q: u32, total: &BigUint, z: &BigUint) -> u64 {
    let total_exp = floor_log_ratio(q, total, &BigUint::one()) + 1;
    let mut m = 0u32;
    loop {
        let exponent = u64::from(q).checked_pow(m).map(|p| p - 1);
        match exponent {
            // total <= q^total_exp, so any larger exponent trivially passes.
            Some(e) if e < total_exp => {
                if *total <= z * big_power(q, e as usize) {
                    return u64::from(m);
                }
            }
            _ => return u64::from(m),
        }
        m += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, FieldElem};
    use crate::trilinear::{diagonal, random_form};

    fn f2() -> FieldSpec {
        make_field(2, 1).unwrap()
    }

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn zero_tensor_has_rank_zero() {
        let z = Trilinear::zeros(&f2(), [2, 3, 1]);
        let rep = analytic_rank(&z, Budget::default()).unwrap();
        assert_eq!(rep.z_count, rep.total);
        assert_eq!(rep.total, big(32));
        assert_eq!(rep.r, 0.0);
        assert_eq!(rep.exact_power, Some(0));
    }

    #[test]
    fn diagonal_examples() {
        let f = f2();
        let d1 = analytic_rank(&diagonal(&f, 1), Budget::default()).unwrap();
        assert_eq!((d1.z_count.clone(), d1.total.clone()), (big(3), big(4)));
        assert!((d1.r - (2.0 - 3f64.log2())).abs() < 1e-12);
        assert!((d1.r - 0.41504).abs() < 1e-5);

        let d2 = analytic_rank(&diagonal(&f, 2), Budget::default()).unwrap();
        assert_eq!((d2.z_count.clone(), d2.total.clone()), (big(9), big(16)));
        assert!((d2.r - 0.83007).abs() < 1e-5);
        assert_eq!(d2.exact_power, None);
        assert_eq!(analytic_rank_direct(&diagonal(&f, 2), Budget::default()).unwrap().z_count, big(9));
    }

    #[test]
    fn direct_matches_fast_route() {
        let f3 = make_field(3, 1).unwrap();
        for seed in 0..20 {
            let t = random_form(&f3, [2, 3, 2], seed);
            let a = analytic_rank(&t, Budget::default()).unwrap();
            let b = analytic_rank_direct(&t, Budget::default()).unwrap();
            assert_eq!(a, b, "seed {seed}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let t = diagonal(&f2(), 5);
        assert!(matches!(
            analytic_rank(&t, Budget::new(4)),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(matches!(
            analytic_rank_direct(&t, Budget::new(9)),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn lemma1_examples() {
        let f = f2();
        let z = Trilinear::zeros(&f, [2, 2, 2]);
        assert_eq!(lemma1_sum(&z, Axis::U, Budget::default()).unwrap(), (big(16), big(16)));
        let d = diagonal(&f, 2);
        for axis in [Axis::U, Axis::V] {
            assert_eq!(lemma1_sum(&d, axis, Budget::default()).unwrap(), (big(16), big(16)));
        }
        assert!(lemma1_sum(&d, Axis::W, Budget::default()).is_err());
    }

    #[test]
    fn rank_distribution_examples() {
        let f = f2();
        let d = rank_distribution(&diagonal(&f, 2), Axis::U, Budget::default()).unwrap();
        assert_eq!(d.counts, BTreeMap::from([(0, 1), (1, 2), (2, 1)]));
        let z = rank_distribution(&Trilinear::zeros(&f, [3, 1, 1]), Axis::U, Budget::default()).unwrap();
        assert_eq!(z.counts, BTreeMap::from([(0, 8)]));
        assert_eq!(z.total(), 8);
    }

    #[test]
    fn slice_rank_small_cases() {
        let f = f2();
        assert_eq!(slice_rank_exact(&Trilinear::zeros(&f, [2, 2, 2]), 3), Some(0));
        assert_eq!(slice_rank_exact(&diagonal(&f, 2), 3), Some(2));
        assert_eq!(slice_rank_exact(&diagonal(&f, 3), 3), Some(3));
        assert_eq!(slice_rank_exact(&diagonal(&f, 3), 2), None);
        let mut rank_one = Trilinear::zeros(&f, [2, 2, 2]);
        rank_one.set(0, 0, 0, FieldElem::ONE);
        assert_eq!(slice_rank_exact(&rank_one, 3), Some(1));
    }

    #[test]
    fn exact_bounds_on_r() {
        // r = 4 - log2 9 ~ 0.83: floor 0, ceil(log2(1.83)) = 1.
        let rep = ArkReport::from_counts(2, big(9), big(16), Axis::W);
        assert_eq!(rep.floor_r(), 0);
        assert_eq!(rep.ceil_log_r_plus_one(), 1);
        // r = 0: log_q(1) = 0.
        let rep = ArkReport::from_counts(2, big(16), big(16), Axis::W);
        assert_eq!((rep.floor_r(), rep.ceil_log_r_plus_one()), (0, 0));
        // r = 1 exactly: r + 1 = 2 = q^1, so the ceiling is 1, not 2.
        let rep = ArkReport::from_counts(2, big(8), big(16), Axis::W);
        assert_eq!((rep.floor_r(), rep.ceil_log_r_plus_one()), (1, 1));
        assert_eq!(rep.exact_power, Some(1));
        // r = 3 exactly, q = 2: r + 1 = 4 = 2^2.
        let rep = ArkReport::from_counts(2, big(2), big(16), Axis::W);
        assert_eq!((rep.floor_r(), rep.ceil_log_r_plus_one()), (3, 2));
        // r = 2, q = 3: r + 1 = 3 = 3^1.
        let rep = ArkReport::from_counts(3, big(9), big(81), Axis::W);
        assert_eq!((rep.floor_r(), rep.ceil_log_r_plus_one()), (2, 1));
        assert!(rep.r_at_least(2) && !rep.r_at_least(3));
    }

    #[test]
    fn distinguished_axis_is_recorded() {
        let f3 = make_field(3, 1).unwrap();
        let t = random_form(&f3, [1, 2, 3], 5);
        let on_w = analytic_rank_on(&t, Axis::W, Budget::default()).unwrap();
        assert_eq!(on_w, analytic_rank(&t, Budget::default()).unwrap());
        let on_u = analytic_rank_on(&t, Axis::U, Budget::default()).unwrap();
        assert_eq!(on_u.axis, Axis::U);
        assert_eq!(on_u.total, big(3u64.pow(5)));
    }
}
