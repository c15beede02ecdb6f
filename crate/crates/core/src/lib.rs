// `!(x >= 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod cli;
pub mod converse;
pub mod entropy;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod special;
pub mod symplectic;

pub use error::{Error, Result};
