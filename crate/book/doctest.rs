// mdbook cannot resolve crate dependencies when it tests code listings, so
// each chapter is pulled in here and checked by `cargo test --doc` instead.
// One module per chapter keeps failures traceable to a file.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("src/fields.md")]
pub mod fields {}
#[doc = include_str!("src/trilinear.md")]
pub mod trilinear {}
#[doc = include_str!("src/analytic-rank.md")]
pub mod analytic_rank {}
#[doc = include_str!("src/decomposition.md")]
pub mod decomposition {}
#[doc = include_str!("src/certificates.md")]
pub mod certificates {}
#[doc = include_str!("src/cli.md")]
pub mod cli {}
