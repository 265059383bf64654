use serde::Serialize;

use super::subspace::zero_set_size;
use super::{certified_bound, recompose, Decomposition, Step};
use crate::analytic::{ceil_log_r_plus_one, floor_log_ratio, frame_for, log_ratio, slice_ranks};
use crate::matrix::MatrixFq;
use crate::points::{big_power, point_index, span, Budget};
use crate::trilinear::{Axis, Trilinear};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Set when the check needed an enumeration larger than the budget.
    pub skipped: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

const TOL: f64 = 1e-9;

pub fn verify(f: &Trilinear, d: &Decomposition) -> VerificationReport {
    verify_with_budget(f, d, Budget::default())
}

/// Checks a decomposition against `f` without trusting anything it says
/// about itself.
pub fn verify_with_budget(f: &Trilinear, d: &Decomposition, budget: Budget) -> VerificationReport {
    let mut checks = Vec::new();
    let push = |checks: &mut Vec<CheckResult>, name, problems: Vec<String>| {
        checks.push(CheckResult {
            name,
            passed: problems.is_empty(),
            skipped: false,
            detail: problems.join("; "),
        })
    };

    let shape_ok = d.field == *f.field() && d.dims == f.dims();
    push(
        &mut checks,
        "field_and_dims",
        if shape_ok {
            vec![]
        } else {
            vec![format!(
                "certificate is F_{} {:?}, tensor is F_{} {:?}",
                d.field.q(),
                d.dims,
                f.field().q(),
                f.dims()
            )]
        },
    );
    if !shape_ok {
        return finish(checks);
    }

    push(
        &mut checks,
        "recomposition",
        match recompose(&d.terms, &d.field, d.dims) {
            Ok(g) if g == *f => vec![],
            Ok(g) => {
                let diff = g.add(&negate(f)).map(|x| x.support_size()).unwrap_or(0);
                vec![format!("differs from the tensor in {diff} coefficients")]
            }
            Err(e) => vec![e.to_string()],
        },
    );

    push(
        &mut checks,
        "nonzero_linear_forms",
        d.terms
            .iter()
            .enumerate()
            .filter(|(_, t)| t.linear_form.iter().all(|e| e.is_zero()))
            .map(|(i, _)| format!("term {i} has a zero linear form"))
            .collect(),
    );

    let tr = &d.transcript;
    let mut count = vec![];
    if d.terms.len() != tr.term_count {
        count.push(format!("{} terms but transcript says {}", d.terms.len(), tr.term_count));
    }
    if d.terms.len() as f64 > tr.certified_bound {
        count.push(format!("{} terms exceed bound {}", d.terms.len(), tr.certified_bound));
    }
    push(&mut checks, "term_count_bound", count);

    push(&mut checks, "transcript", transcript_problems(f, d));

    let tensor = tensor_problems(f, d, budget);
    let skipped = tensor.is_none();
    push(&mut checks, "tensor_counts", tensor.unwrap_or_default());
    if skipped {
        let last = checks.last_mut().expect("just pushed");
        last.skipped = true;
        last.detail = "enumeration exceeds budget".into();
    }

    push(&mut checks, "provenance", provenance_problems(f, d));
    finish(checks)
}

fn finish(checks: Vec<CheckResult>) -> VerificationReport {
    VerificationReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn negate(f: &Trilinear) -> Trilinear {
    let field = f.field();
    let coeffs = f.coeffs().iter().map(|&c| field.neg(c)).collect();
    Trilinear::from_coeffs(field, f.dims(), coeffs).expect("same shape")
}

/// The transcript's `(n_u, n_v)` in the frame where its ark axis is last.
fn uv_dims(d: &Decomposition) -> (usize, usize) {
    let [a, b, _] = frame_for(d.transcript.ark_axis);
    (d.dims[a.index()], d.dims[b.index()])
}

fn transcript_problems(f: &Trilinear, d: &Decomposition) -> Vec<String> {
    let tr = &d.transcript;
    let q = f.field().q();
    let mut bad = vec![];
    let mut need = |ok: bool, msg: String| {
        if !ok {
            bad.push(msg)
        }
    };
    need(tr.q == q, format!("q = {} but field has q = {q}", tr.q));
    let (nu, nv) = uv_dims(d);
    need(
        tr.total == big_power(q, nu + nv),
        format!("total {} is not q^{}", tr.total, nu + nv),
    );
    need(
        tr.z_count >= big_power(q, nv) && tr.z_count <= tr.total,
        format!("z_count {} out of range", tr.z_count),
    );
    if !bad.is_empty() {
        return bad;
    }
    let mut need = |ok: bool, msg: String| {
        if !ok {
            bad.push(msg)
        }
    };

    let r = log_ratio(q, &tr.total, &tr.z_count);
    need((r - tr.r).abs() <= TOL, format!("r = {} but counts give {r}", tr.r));
    let floor_r = floor_log_ratio(q, &tr.total, &tr.z_count);
    need(tr.floor_r == floor_r, format!("floor(r) = {} but counts give {floor_r}", tr.floor_r));
    let s = ceil_log_r_plus_one(q, &tr.total, &tr.z_count) + 6;
    need(tr.s == s, format!("s = {} but counts give {s}", tr.s));
    need(tr.t == floor_r + s, format!("t = {} is not floor(r) + s = {}", tr.t, floor_r + s));
    let bound = certified_bound(r, q);
    need(
        (bound - tr.certified_bound).abs() <= TOL,
        format!("bound {} but counts give {bound}", tr.certified_bound),
    );
    need(
        tr.codim as u64 <= floor_r + 1,
        format!("codim {} exceeds floor(r) + 1", tr.codim),
    );
    need(
        tr.cutting_forms.len() == tr.codim,
        format!("{} cutting forms for codim {}", tr.cutting_forms.len(), tr.codim),
    );
    let budgeted = tr.codim as u64 + 4 * tr.t;
    need(
        d.terms.len() as u64 <= budgeted,
        format!("{} terms exceed codim + 4t = {budgeted}", d.terms.len()),
    );
    need(
        budgeted as f64 <= bound + TOL,
        format!("codim + 4t = {budgeted} exceeds bound {bound}"),
    );
    need(
        tr.lemma2_lhs <= tr.lemma2_rhs,
        format!("averaging inequality {} > {}", tr.lemma2_lhs, tr.lemma2_rhs),
    );
    for c in &tr.density_checks {
        need(
            c.threshold_num == u64::from(q) - 1 && c.threshold_den == 2 * u64::from(q) * c.t as u64,
            format!("density threshold at level {} is not (q-1)/(2qt)", c.level),
        );
        need(c.holds(), format!("density condition fails at level {}", c.level));
    }
    for c in &tr.rank_halving_checks {
        need(c.allowed == c.t / 2, format!("rank allowance at level {} is not t/2", c.level));
        need(
            c.observed_max <= c.allowed,
            format!("rank {} above {} at level {}", c.observed_max, c.allowed, c.level),
        );
    }
    for c in &tr.base_case_checks {
        need(
            c.residual_support == 0,
            format!("base case at level {} leaves {} coefficients", c.level, c.residual_support),
        );
    }
    for lv in &tr.levels {
        need(
            lv.terms_emitted <= 2 * lv.t_effective,
            format!("level {} emitted {} terms", lv.depth, lv.terms_emitted),
        );
    }
    bad
}

/// Recomputes `|Z|` and the averaging inequality at `v0`; `None` when the
/// enumeration is over budget.
fn tensor_problems(f: &Trilinear, d: &Decomposition, budget: Budget) -> Option<Vec<String>> {
    let tr = &d.transcript;
    let g = f.permute_axes(frame_for(tr.ark_axis)).ok()?;
    let ranks = slice_ranks(&g, Axis::U, budget).ok()?;
    let field = g.field();
    let q = field.q();
    let [nu, nv, _] = g.dims();
    let mut bad = vec![];
    let z = zero_set_size(&g, &ranks);
    if z != tr.z_count {
        bad.push(format!("z_count {} but the tensor gives {z}", tr.z_count));
    }
    if tr.v0.len() != nv || tr.v0.iter().any(|e| e.value() >= q) {
        bad.push("v0 is not a point of V".into());
        return Some(bad);
    }
    let slice = g.slice(Axis::V, &tr.v0).ok()?;
    let kernel = slice.left_kernel();
    let codim = nu - kernel.len();
    if codim != tr.codim {
        bad.push(format!("codim {} but rk f<v0> = {codim}", tr.codim));
    }
    let kernel_size = big_power(q, kernel.len());
    let rank_sum: num_bigint::BigUint = span(field, nu, &kernel)
        .iter()
        .map(|u| big_power(q, ranks[point_index(field, u)]))
        .sum();
    let lhs = &z * &kernel_size * big_power(q, codim) + &z * rank_sum;
    let rhs = big_power(q, nu + nv + 1) * kernel_size;
    if lhs != tr.lemma2_lhs || rhs != tr.lemma2_rhs {
        bad.push(format!("averaging record is ({lhs}, {rhs}) for this tensor"));
    }
    if lhs > rhs {
        bad.push(format!("averaging inequality fails at v0: {lhs} > {rhs}"));
    }
    Some(bad)
}

fn provenance_problems(f: &Trilinear, d: &Decomposition) -> Vec<String> {
    let mut bad = vec![];
    let field = f.field();
    let ark_frame = frame_for(d.transcript.ark_axis);
    let cutting = f
        .permute_axes(ark_frame)
        .ok()
        .filter(|g| d.transcript.v0.len() == g.dim(Axis::V))
        .and_then(|g| g.slice(Axis::V, &d.transcript.v0).ok());
    for (i, term) in d.terms.iter().enumerate() {
        let p = &term.provenance;
        let rederived = f
            .slice(term.axis, &p.point)
            .and_then(|s| p.row_map.mul(&s))
            .and_then(|m| m.mul(&p.col_map.transpose()));
        match rederived {
            Ok(b) if b == term.bilinear => {}
            Ok(_) => bad.push(format!("term {i}: bilinear part is not the recorded slice")),
            Err(e) => bad.push(format!("term {i}: {e}")),
        }
        if let Step::Lemma2Slice { v0, .. } = &p.step {
            if *v0 != d.transcript.v0 || term.axis != ark_frame[0] {
                bad.push(format!("term {i}: not attached to the recorded v0"));
                continue;
            }
            // l_j must vanish on U', i.e. lie in the column span of f<v0>.
            let in_span = cutting.as_ref().is_some_and(|m| {
                let mut rows = m.transpose().row_vecs();
                let before = rank_of(field, m.rows(), &rows);
                rows.push(term.linear_form.clone());
                rank_of(field, m.rows(), &rows) == before
            });
            if !in_span {
                bad.push(format!("term {i}: linear form does not vanish on U'"));
            }
        }
    }
    bad
}

fn rank_of(field: &crate::field::FieldSpec, width: usize, rows: &[Vec<crate::field::FieldElem>]) -> usize {
    MatrixFq::from_rows(field, width, rows).map_or(usize::MAX, |m| m.rank())
}
