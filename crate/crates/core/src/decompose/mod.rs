//! Constructive slice-rank decompositions with a checkable transcript.
//!
//! [`theorem_decompose`] writes a trilinear form as a sum of terms
//! `alpha(x_a) * B(x_b, x_c)` and records every inequality it relied on:
//!
//! 1. pick `v0` so that `U' = {u : f(u, v0, .) = 0}` has codimension at most
//!    `ark + 1` and small average slice rank ([`find_good_subspace`]);
//! 2. peel off one term per complement direction of `U'`;
//! 3. decompose `f` restricted to `U'` with [`hs_decompose`], which
//!    factorizes a maximal-rank slice, splits off `2t` terms and recurses on
//!    a restriction whose slices have at most half the rank.
//!
//! Terms are reported in the coordinates of the input. Each term also
//! carries a provenance record from which a verifier can re-derive its
//! bilinear part as a slice of the input form at a fixed point.

mod hs;
mod subspace;
mod theorem;
mod verify;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};
use crate::json::{bigstr, FieldJson, MatrixJson};
use crate::matrix::MatrixFq;
use crate::trilinear::{Axis, Trilinear};

pub use hs::{hs_decompose, HsChecks, HsDecomposition};
pub use subspace::{find_good_subspace, GoodSubspace};
pub use theorem::{certified_bound, theorem_decompose, theorem_decompose_on};
pub use verify::{verify, verify_with_budget, CheckResult, VerificationReport};

use num_bigint::BigUint;

/// How a term was produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    /// `l_j(u) * f(e'_j, v, w)`: the `index`-th complement direction of
    /// `U' = {u : f(u, v0, .) = 0}`.
    Lemma2Slice { v0: Vec<FieldElem>, index: usize },
    /// Factor `factor` of the rank factorization of the slice at `u0`
    /// (given in input coordinates), at recursion depth `depth`. `side` is
    /// `V` for the `alpha_i` terms and `W` for the `beta_i` terms.
    Lemma3Factor {
        u0: Vec<FieldElem>,
        factor: usize,
        depth: usize,
        side: Axis,
    },
}

/// The bilinear part of a term equals `row_map * S * col_map^T`, where `S`
/// is the slice of the input at `point` on the term's axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub step: Step,
    pub point: Vec<FieldElem>,
    pub row_map: MatrixFq,
    pub col_map: MatrixFq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceTerm {
    pub axis: Axis,
    pub linear_form: Vec<FieldElem>,
    /// Indexed by `axis.others()`.
    pub bilinear: MatrixFq,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityCheck {
    pub level: usize,
    pub t: usize,
    pub threshold_num: u64,
    pub threshold_den: u64,
    #[serde(with = "bigstr")]
    pub violating_num: BigUint,
    #[serde(with = "bigstr")]
    pub violating_den: BigUint,
}

impl DensityCheck {
    /// `violating_num / violating_den < threshold_num / threshold_den`.
    pub fn holds(&self) -> bool {
        &self.violating_num * self.threshold_den < BigUint::from(self.threshold_num) * &self.violating_den
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankHalvingCheck {
    pub level: usize,
    pub t: usize,
    pub u0: Vec<FieldElem>,
    pub points_checked: u64,
    pub observed_max: usize,
    pub allowed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseCaseCheck {
    pub level: usize,
    /// Nonzero coefficients of the restricted form; must be 0.
    pub residual_support: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub depth: usize,
    pub t: usize,
    pub t_effective: usize,
    pub u0: Option<Vec<FieldElem>>,
    pub terms_emitted: usize,
}

/// Everything the construction asserted, in exact integers where possible.
/// The two floats are stored at full precision so they can be re-derived to
/// within `1e-9`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub q: u32,
    pub ark_axis: Axis,
    #[serde(with = "bigstr")]
    pub z_count: BigUint,
    #[serde(with = "bigstr")]
    pub total: BigUint,
    pub r: f64,
    pub floor_r: u64,
    pub s: u64,
    pub t: u64,
    pub v0: Vec<FieldElem>,
    pub codim: usize,
    /// Linear forms `u -> f(u, v0, e_l)` spanning the annihilator of `U'`.
    pub cutting_forms: Vec<Vec<FieldElem>>,
    #[serde(with = "bigstr")]
    pub lemma2_lhs: BigUint,
    #[serde(with = "bigstr")]
    pub lemma2_rhs: BigUint,
    pub levels: Vec<LevelRecord>,
    pub density_checks: Vec<DensityCheck>,
    pub rank_halving_checks: Vec<RankHalvingCheck>,
    pub base_case_checks: Vec<BaseCaseCheck>,
    pub term_count: usize,
    pub certified_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub field: FieldSpec,
    pub dims: [usize; 3],
    pub terms: Vec<SliceTerm>,
    pub transcript: Transcript,
}

/// Sum of the outer products of `terms`.
pub fn recompose(terms: &[SliceTerm], field: &FieldSpec, dims: [usize; 3]) -> Result<Trilinear> {
    let mut out = Trilinear::zeros(field, dims);
    for term in terms {
        let (ra, ca) = term.axis.others();
        let shapes = [
            (dims[term.axis.index()], term.linear_form.len()),
            (dims[ra.index()], term.bilinear.rows()),
            (dims[ca.index()], term.bilinear.cols()),
        ];
        for (expected, got) in shapes {
            if expected != got {
                return Err(Error::DimensionMismatch { expected, got });
            }
        }
        if term.bilinear.field() != field {
            return Err(Error::FieldMismatch {
                left: field.q().into(),
                right: term.bilinear.field().q().into(),
            });
        }
        out.add_outer(term.axis, &term.linear_form, &term.bilinear);
    }
    Ok(out)
}

/// Coordinates of one axis at some stage of the construction, relative to
/// the input's coordinates on that axis. A stage vector `x` corresponds to
/// the input vector `x * embed`, and an input vector `u` is sent to the
/// stage vector `u * pullback`.
#[derive(Clone, Debug)]
pub(crate) struct Frame {
    pub pullback: MatrixFq,
    pub embed: MatrixFq,
}

impl Frame {
    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        Frame {
            pullback: MatrixFq::identity(field, n),
            embed: MatrixFq::identity(field, n),
        }
    }

    /// Composes with a further change of coordinates on the stage space.
    pub fn then(&self, pullback: &MatrixFq, embed: &MatrixFq) -> Result<Frame> {
        Ok(Frame {
            pullback: self.pullback.mul(pullback)?,
            embed: embed.mul(&self.embed)?,
        })
    }

    /// Keeps stage coordinates `from..`.
    pub fn tail(&self, from: usize) -> Frame {
        Frame {
            pullback: self.pullback.select_columns(from..self.pullback.cols()),
            embed: self.embed.select_rows(from..self.embed.rows()),
        }
    }

    /// `pullback * embed`, an operator on input coordinates.
    pub fn projector(&self) -> MatrixFq {
        self.pullback.mul(&self.embed).expect("frame shapes agree")
    }

    /// A stage-coordinate linear form as an input-coordinate linear form.
    pub fn lift_form(&self, form: &[FieldElem]) -> Vec<FieldElem> {
        self.pullback
            .transpose()
            .left_mul_vec(form)
            .expect("form has stage length")
    }

    /// A stage vector as an input vector.
    pub fn lift_point(&self, x: &[FieldElem]) -> Vec<FieldElem> {
        self.embed.left_mul_vec(x).expect("point has stage length")
    }
}

/// Lifts a stage bilinear matrix with rows on `rows` and columns on `cols`.
pub(crate) fn lift_bilinear(rows: &Frame, b: &MatrixFq, cols: &Frame) -> MatrixFq {
    rows.pullback
        .mul(b)
        .and_then(|m| m.mul(&cols.pullback.transpose()))
        .expect("frame shapes agree")
}

// ---- certificate serialization ------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProvenanceJson {
    step: Step,
    point: Vec<FieldElem>,
    row_map: MatrixJson,
    col_map: MatrixJson,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    axis: Axis,
    linear_form: Vec<FieldElem>,
    bilinear: MatrixJson,
    provenance: ProvenanceJson,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateJson {
    field: FieldJson,
    dims: [usize; 3],
    terms: Vec<TermJson>,
    transcript: Transcript,
}

impl Decomposition {
    /// Pretty-printed certificate JSON; byte-identical for identical inputs.
    pub fn to_json(&self) -> String {
        let wire = CertificateJson {
            field: FieldJson::of(&self.field),
            dims: self.dims,
            terms: self
                .terms
                .iter()
                .map(|t| TermJson {
                    axis: t.axis,
                    linear_form: t.linear_form.clone(),
                    bilinear: MatrixJson::of(&t.bilinear),
                    provenance: ProvenanceJson {
                        step: t.provenance.step.clone(),
                        point: t.provenance.point.clone(),
                        row_map: MatrixJson::of(&t.provenance.row_map),
                        col_map: MatrixJson::of(&t.provenance.col_map),
                    },
                })
                .collect(),
            transcript: self.transcript.clone(),
        };
        let mut s = serde_json::to_string_pretty(&wire).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Decomposition> {
        let wire: CertificateJson =
            serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        let field = wire.field.build()?;
        let check = |v: &[FieldElem]| crate::json::check_vector(&field, v);
        let mut terms = Vec::with_capacity(wire.terms.len());
        for t in wire.terms {
            check(&t.linear_form)?;
            check(&t.provenance.point)?;
            terms.push(SliceTerm {
                axis: t.axis,
                linear_form: t.linear_form,
                bilinear: t.bilinear.build(&field)?,
                provenance: Provenance {
                    step: t.provenance.step,
                    point: t.provenance.point,
                    row_map: t.provenance.row_map.build(&field)?,
                    col_map: t.provenance.col_map.build(&field)?,
                },
            });
        }
        Ok(Decomposition {
            field,
            dims: wire.dims,
            terms,
            transcript: wire.transcript,
        })
    }
}
