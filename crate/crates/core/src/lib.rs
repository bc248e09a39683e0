// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod counterexamples;
pub mod error;
pub mod experiments;
pub mod field;
pub mod grid;
pub mod halfplane;
pub mod norms;
pub mod poisson;
