use super::subspace::{search, zero_set_size};
use super::{hs, recompose, Decomposition, Frame, Provenance, SliceTerm, Step, Transcript};
use crate::analytic::{frame_for, slice_ranks, ArkReport};
use crate::error::{Error, Result};
use crate::matrix::{complete_to_basis, MatrixFq};
use crate::points::{big_power, point_index, Budget, Points};
use crate::trilinear::{Axis, Trilinear};

/// `5r + 4 log_q(r + 1) + 29`.
pub fn certified_bound(r: f64, q: u32) -> f64 {
    5.0 * r + 4.0 * (r + 1.0).ln() / f64::from(q).ln() + 29.0
}

/// Slice-rank decomposition with `W` as the distinguished axis.
pub fn theorem_decompose(f: &Trilinear, budget: Budget) -> Result<Decomposition> {
    theorem_decompose_on(f, Axis::W, budget)
}

/// Slice-rank decomposition with `axis` playing the role of `W`. The
/// transcript's `U`/`V` quantities then refer to the other two axes in
/// canonical order.
pub fn theorem_decompose_on(f: &Trilinear, axis: Axis, budget: Budget) -> Result<Decomposition> {
    if axis == Axis::W {
        return decompose_w(f, budget);
    }
    let order = frame_for(axis);
    let mut d = decompose_w(&f.permute_axes(order)?, budget)?;
    d.dims = f.dims();
    d.transcript.ark_axis = axis;
    for term in &mut d.terms {
        relabel(term, order);
    }
    if recompose(&d.terms, &d.field, d.dims)? != *f {
        return Err(Error::Invariant("relabelled terms do not recompose".into()));
    }
    Ok(d)
}

/// Maps a term stated in permuted axes back to the original ones.
fn relabel(term: &mut SliceTerm, order: [Axis; 3]) {
    let (ra, _) = term.axis.others();
    term.axis = order[term.axis.index()];
    if order[ra.index()] != term.axis.others().0 {
        term.bilinear = term.bilinear.transpose();
        let p = &mut term.provenance;
        std::mem::swap(&mut p.row_map, &mut p.col_map);
    }
    if let Step::Lemma3Factor { side, .. } = &mut term.provenance.step {
        *side = order[side.index()];
    }
}

fn decompose_w(f: &Trilinear, budget: Budget) -> Result<Decomposition> {
    let field = f.field().clone();
    let q = field.q();
    let [nu, nv, nw] = f.dims();

    let u_ranks = slice_ranks(f, Axis::U, budget)?;
    let z = zero_set_size(f, &u_ranks);
    let ark = ArkReport::from_counts(q, z.clone(), big_power(q, nu + nv), Axis::W);
    let floor_r = ark.floor_r();
    let s = ark.ceil_log_r_plus_one() + 6;
    let t = floor_r + s;

    let good = search(f, &u_ranks, &z, budget)?;
    if good.codim as u64 > floor_r + 1 {
        return Err(Error::Invariant(format!(
            "codimension {} exceeds floor(r) + 1 = {}",
            good.codim,
            floor_r + 1
        )));
    }

    // Rows d.. of `complete` are the complement e'_j; column d + j of its
    // inverse is the dual coordinate l_j.
    let d = good.basis.dim();
    let embed_u = good.basis.embedding(&field);
    let complete = complete_to_basis(&field, nu, good.basis.vectors())?;
    let coords = complete.inverse()?;
    let mut terms = Vec::new();
    for j in 0..good.codim {
        let e = complete.row(d + j).to_vec();
        let bilinear = f.slice(Axis::U, &e)?;
        if bilinear.is_zero() {
            continue;
        }
        terms.push(SliceTerm {
            axis: Axis::U,
            linear_form: coords.column(d + j),
            bilinear,
            provenance: Provenance {
                step: Step::Lemma2Slice {
                    v0: good.v0.clone(),
                    index: j,
                },
                point: e,
                row_map: MatrixFq::identity(&field, nv),
                col_map: MatrixFq::identity(&field, nw),
            },
        });
    }

    let g = f.restrict(Axis::U, &good.basis)?;
    let fu = Frame {
        pullback: coords.select_columns(0..d),
        embed: embed_u,
    };
    let g_ranks = Points::new(&field, d)
        .map(|x| u_ranks[point_index(&field, &fu.lift_point(&x))])
        .collect();
    let frames = [fu, Frame::identity(&field, nv), Frame::identity(&field, nw)];
    let inner = hs::run(&g, t as usize, frames, Some(g_ranks), budget, false)?;
    terms.extend(inner.terms);

    if recompose(&terms, &field, f.dims())? != *f {
        return Err(Error::Invariant("terms do not recompose to the input".into()));
    }
    let bound = certified_bound(ark.r, q);
    let budgeted = good.codim as u64 + 4 * t;
    if terms.len() as u64 > budgeted || budgeted as f64 > bound + 1e-9 {
        return Err(Error::Invariant(format!(
            "{} terms, codim + 4t = {budgeted}, bound {bound}",
            terms.len()
        )));
    }

    let checks = inner.checks;
    let transcript = Transcript {
        q,
        ark_axis: Axis::W,
        z_count: z,
        total: ark.total.clone(),
        r: ark.r,
        floor_r,
        s,
        t,
        v0: good.v0,
        codim: good.codim,
        cutting_forms: good.cutting_forms,
        lemma2_lhs: good.lhs,
        lemma2_rhs: good.rhs,
        levels: checks.levels,
        density_checks: checks.density_checks,
        rank_halving_checks: checks.rank_halving_checks,
        base_case_checks: checks.base_case_checks,
        term_count: terms.len(),
        certified_bound: bound,
    };
    Ok(Decomposition {
        field,
        dims: f.dims(),
        terms,
        transcript,
    })
}
