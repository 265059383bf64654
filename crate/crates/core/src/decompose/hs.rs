use num_bigint::BigUint;

use super::{
    lift_bilinear, BaseCaseCheck, DensityCheck, Frame, LevelRecord, Provenance, RankHalvingCheck,
    SliceTerm, Step,
};
use crate::analytic::slice_ranks;
use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::matrix::{complete_to_basis, MatrixFq};
use crate::points::{add_vectors, big_power, point_at, point_index, unit_vector, Budget};
use crate::trilinear::{Axis, Trilinear};

/// Per-level records of the recursive decomposition.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HsChecks {
    pub levels: Vec<LevelRecord>,
    pub density_checks: Vec<DensityCheck>,
    pub rank_halving_checks: Vec<RankHalvingCheck>,
    pub base_case_checks: Vec<BaseCaseCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HsDecomposition {
    pub terms: Vec<SliceTerm>,
    pub checks: HsChecks,
}

/// Decomposes `g` into at most `4t` terms, given that fewer than a
/// `(q-1)/(2qt)` fraction of its `U`-slices have rank above `t`.
///
/// Fails with `DensityViolated` when that hypothesis does not hold. Terms
/// are in `g`'s coordinates.
pub fn hs_decompose(g: &Trilinear, t: usize, budget: Budget) -> Result<HsDecomposition> {
    let field = g.field();
    let [nu, nv, nw] = g.dims();
    let frames = [
        Frame::identity(field, nu),
        Frame::identity(field, nv),
        Frame::identity(field, nw),
    ];
    run(g, t, frames, None, budget, true)
}

/// `frames` relate `g` to the caller's coordinates on each axis; terms are
/// lifted through them. `u_ranks`, when given, are the ranks of `g[u]`.
pub(crate) fn run(
    g: &Trilinear,
    t: usize,
    frames: [Frame; 3],
    u_ranks: Option<Vec<usize>>,
    budget: Budget,
    public: bool,
) -> Result<HsDecomposition> {
    let [fu, fv, fw] = frames;
    let mut ctx = Ctx {
        budget,
        public,
        fu,
        out: HsDecomposition {
            terms: Vec::new(),
            checks: HsChecks::default(),
        },
    };
    ctx.level(g, t, 0, &fv, &fw, u_ranks)?;
    Ok(ctx.out)
}

struct Ctx {
    budget: Budget,
    public: bool,
    fu: Frame,
    out: HsDecomposition,
}

impl Ctx {
    fn density(&mut self, h: &Trilinear, ranks: &[usize], t: usize, depth: usize) -> Result<()> {
        let q = h.field().q();
        let violating = ranks.iter().filter(|&&rk| rk > t).count();
        let check = DensityCheck {
            level: depth,
            t,
            threshold_num: u64::from(q) - 1,
            threshold_den: 2 * u64::from(q) * t as u64,
            violating_num: BigUint::from(violating),
            violating_den: big_power(q, h.dim(Axis::U)),
        };
        let holds = check.holds();
        let (num, den) = (check.violating_num.to_string(), check.violating_den.to_string());
        self.out.checks.density_checks.push(check);
        match (holds, self.public && depth == 0) {
            (true, _) => Ok(()),
            (false, true) => Err(Error::DensityViolated {
                t,
                violating: num,
                total: den,
            }),
            (false, false) => Err(Error::Invariant(format!(
                "density condition fails at depth {depth}, t = {t}: {num}/{den} slices above t"
            ))),
        }
    }

    fn level(
        &mut self,
        h: &Trilinear,
        t_nominal: usize,
        depth: usize,
        fv: &Frame,
        fw: &Frame,
        ranks: Option<Vec<usize>>,
    ) -> Result<()> {
        let field = h.field().clone();
        let [nu, nv, nw] = h.dims();
        if h.is_zero() {
            self.out.checks.levels.push(LevelRecord {
                depth,
                t: t_nominal,
                t_effective: 0,
                u0: None,
                terms_emitted: 0,
            });
            return Ok(());
        }
        if t_nominal == 0 {
            return Err(Error::Invariant(format!(
                "nonzero form reached depth {depth} with t = 0"
            )));
        }
        let ranks = match ranks {
            Some(r) => r,
            None => slice_ranks(h, Axis::U, self.budget)?,
        };
        self.density(h, &ranks, t_nominal, depth)?;

        let t = ranks.iter().copied().filter(|&rk| rk <= t_nominal).max().unwrap_or(0);
        if t == 0 {
            return Err(Error::Invariant(format!(
                "nonzero form has only zero slices on a dense set at depth {depth}"
            )));
        }
        if t < t_nominal {
            self.density(h, &ranks, t, depth)?;
        }
        let u0_index = ranks.iter().position(|&rk| rk == t).expect("t is attained");
        let u0 = point_at(&field, nu, u0_index);
        let u0_orig = self.fu.lift_point(&u0);
        let start = self.out.terms.len();

        // Coordinates in which h[u0] = v_1 w_1 + ... + v_t w_t.
        let (c, r) = h.slice(Axis::U, &u0)?.rank_factorization();
        let to_new_v = complete_to_basis(&field, nv, &c.transpose().row_vecs())?.transpose();
        let to_new_w = complete_to_basis(&field, nw, &r.row_vecs())?.transpose();
        let from_new_v = to_new_v.inverse()?;
        let from_new_w = to_new_w.inverse()?;
        let h1 = h
            .change_basis(Axis::V, &from_new_v)?
            .change_basis(Axis::W, &from_new_w)?;
        let fv1 = fv.then(&to_new_v, &from_new_v)?;
        let fw1 = fw.then(&to_new_w, &from_new_w)?;
        let mut normal = MatrixFq::zeros(&field, nv, nw);
        for i in 0..t {
            normal.set(i, i, FieldElem::ONE);
        }
        if h1.slice(Axis::U, &u0)? != normal {
            return Err(Error::Invariant(format!(
                "slice at u0 is not in normal form at depth {depth}"
            )));
        }

        let row_map = self.fu.projector();
        for i in 0..t {
            let e = unit_vector(nv, i);
            let b = lift_bilinear(&self.fu, &h1.slice(Axis::V, &e)?, &fw1);
            self.emit(Axis::V, fv1.lift_form(&e), b, &u0_orig, i, depth, fv1.lift_point(&e), &row_map, fw1.projector());
        }
        let fv_tail = fv1.tail(t);
        for i in 0..t {
            let e = unit_vector(nw, i);
            let s = h1.slice(Axis::W, &e)?.select_columns(t..nv);
            let b = lift_bilinear(&self.fu, &s, &fv_tail);
            self.emit(Axis::W, fw1.lift_form(&e), b, &u0_orig, i, depth, fw1.lift_point(&e), &row_map, fv_tail.projector());
        }
        let emitted = self.out.terms.len() - start;
        self.out.checks.levels.push(LevelRecord {
            depth,
            t: t_nominal,
            t_effective: t,
            u0: Some(u0_orig.clone()),
            terms_emitted: emitted,
        });

        let keep_v = MatrixFq::identity(&field, nv).select_rows(t..nv);
        let keep_w = MatrixFq::identity(&field, nw).select_rows(t..nw);
        let h2 = h1.substitute(Axis::V, &keep_v)?.substitute(Axis::W, &keep_w)?;

        let allowed = t / 2;
        let ranks2 = slice_ranks(&h2, Axis::U, self.budget)?;
        let mut checked = 0u64;
        let mut observed = 0;
        for (idx, &rk) in ranks.iter().enumerate() {
            if rk > t {
                continue;
            }
            let shifted = add_vectors(&field, &point_at(&field, nu, idx), &u0);
            if ranks[point_index(&field, &shifted)] > t {
                continue;
            }
            checked += 1;
            observed = observed.max(ranks2[idx]);
        }
        self.out.checks.rank_halving_checks.push(RankHalvingCheck {
            level: depth,
            t,
            u0: u0_orig,
            points_checked: checked,
            observed_max: observed,
            allowed,
        });
        if observed > allowed {
            return Err(Error::Invariant(format!(
                "restricted slice of rank {observed} exceeds {allowed} at depth {depth}"
            )));
        }

        if t == 1 {
            let residual = h2.support_size();
            self.out.checks.base_case_checks.push(BaseCaseCheck {
                level: depth,
                residual_support: residual,
            });
            if residual != 0 {
                return Err(Error::Invariant(format!(
                    "base case leaves {residual} nonzero coefficients at depth {depth}"
                )));
            }
        } else {
            self.level(&h2, allowed, depth + 1, &fv_tail, &fw1.tail(t), Some(ranks2))?;
        }

        let total = self.out.terms.len() - start;
        if total > 4 * t {
            return Err(Error::Invariant(format!(
                "{total} terms from depth {depth} exceed 4t = {}",
                4 * t
            )));
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn emit(
        &mut self,
        axis: Axis,
        linear_form: Vec<FieldElem>,
        bilinear: MatrixFq,
        u0: &[FieldElem],
        factor: usize,
        depth: usize,
        point: Vec<FieldElem>,
        row_map: &MatrixFq,
        col_map: MatrixFq,
    ) {
        if bilinear.is_zero() {
            return;
        }
        self.out.terms.push(SliceTerm {
            axis,
            linear_form,
            bilinear,
            provenance: Provenance {
                step: Step::Lemma3Factor {
                    u0: u0.to_vec(),
                    factor,
                    depth,
                    side: axis,
                },
                point,
                row_map: row_map.clone(),
                col_map,
            },
        });
    }
}
