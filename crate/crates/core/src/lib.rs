#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cases;
pub mod error;
pub mod expr;
pub mod flow;
pub mod geometry;
pub mod maps;
pub mod mesh;
pub mod models;
pub mod oracle;
pub mod reduce;
pub mod scalar;
pub mod variational;

pub use error::{Error, Result};
