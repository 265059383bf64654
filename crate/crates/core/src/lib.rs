//! Exact analytic rank and certified slice-rank decompositions of
//! trilinear forms over finite fields.
//!
//! ```
//! use slicerank::decompose::{theorem_decompose, verify};
//! use slicerank::field::make_field;
//! use slicerank::points::Budget;
//! use slicerank::trilinear::diagonal;
//!
//! let f = make_field(2, 1)?;
//! let t = diagonal(&f, 2);
//! let d = theorem_decompose(&t, Budget::default())?;
//! assert_eq!(d.terms.len(), 2);
//! assert!(verify(&t, &d).passed);
//! # Ok::<(), slicerank::Error>(())
//! ```

pub mod analytic;
pub mod decompose;
pub mod error;
pub mod field;
pub mod gf2;
pub mod json;
pub mod matrix;
pub mod points;
pub mod trilinear;

pub use error::{Error, Result};
