//! JSON wire formats.
//!
//! Tensors use a sparse, canonical layout:
//!
//! ```json
//! {"field":{"p":2,"k":1},"dims":[2,2,2],"entries":[[0,0,0,1],[1,1,1,1]]}
//! ```
//!
//! Entries are `[i, j, l, value]` with `value` an element index; omitted
//! positions are zero. Output lists nonzero entries sorted by `(i, j, l)`.
//! Input may list them in any order but must not repeat a position.
//!
//! Big integers travel as decimal strings, and human-facing floats are
//! rounded to 10 significant digits.

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{make_field, FieldElem, FieldSpec};
use crate::matrix::MatrixFq;
use crate::trilinear::Trilinear;

/// Serde adapter: `BigUint` as a decimal string.
pub mod bigstr {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        BigUint::parse_bytes(s.as_bytes(), 10)
            .ok_or_else(|| serde::de::Error::custom(format!("not a decimal integer: {s:?}")))
    }
}

/// Rounds to 10 significant digits on the way out.
pub fn sig10<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig10(*x))
}

pub fn round_sig10(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.9e}").parse().unwrap_or(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldJson {
    pub p: u64,
    pub k: u32,
}

impl FieldJson {
    pub fn of(field: &FieldSpec) -> Self {
        FieldJson {
            p: field.p().into(),
            k: field.k(),
        }
    }

    pub fn build(self) -> Result<FieldSpec> {
        make_field(self.p, self.k)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorJson {
    pub field: FieldJson,
    pub dims: [usize; 3],
    pub entries: Vec<[u64; 4]>,
}

impl TensorJson {
    pub fn of(t: &Trilinear) -> Self {
        let [nu, nv, nw] = t.dims();
        let mut entries = Vec::new();
        for i in 0..nu {
            for j in 0..nv {
                for l in 0..nw {
                    let c = t.get(i, j, l);
                    if !c.is_zero() {
                        entries.push([i as u64, j as u64, l as u64, c.value().into()]);
                    }
                }
            }
        }
        TensorJson {
            field: FieldJson::of(t.field()),
            dims: t.dims(),
            entries,
        }
    }

    pub fn build(&self) -> Result<Trilinear> {
        let field = self.field.build()?;
        let [nu, nv, nw] = self.dims;
        let mut t = Trilinear::zeros(&field, self.dims);
        let mut seen = vec![false; nu * nv * nw];
        for &[i, j, l, value] in &self.entries {
            let (i, j, l) = (i as usize, j as usize, l as usize);
            if i >= nu || j >= nv || l >= nw {
                return Err(Error::Malformed(format!(
                    "entry ({i},{j},{l}) outside dims {:?}",
                    self.dims
                )));
            }
            let o = (i * nv + j) * nw + l;
            if std::mem::replace(&mut seen[o], true) {
                return Err(Error::Malformed(format!("duplicate entry ({i},{j},{l})")));
            }
            let value = u32::try_from(value)
                .map_err(|_| Error::Malformed(format!("value {value} out of range")))
                .and_then(|v| field.elem(v))?;
            t.set(i, j, l, value);
        }
        Ok(t)
    }
}

pub fn tensor_to_json(t: &Trilinear) -> String {
    serde_json::to_string(&TensorJson::of(t)).expect("plain data serializes")
}

pub fn tensor_from_json(s: &str) -> Result<Trilinear> {
    let wire: TensorJson = serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
    wire.build()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<u32>,
}

impl MatrixJson {
    pub fn of(m: &MatrixFq) -> Self {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(|e| e.value()).collect(),
        }
    }

    pub fn build(&self, field: &FieldSpec) -> Result<MatrixFq> {
        MatrixFq::from_u32(field, self.rows, self.cols, &self.entries)
    }
}

pub(crate) fn check_vector(field: &FieldSpec, v: &[FieldElem]) -> Result<()> {
    for e in v {
        field.elem(e.value())?;
    }
    Ok(())
}
