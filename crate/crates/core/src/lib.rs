#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod cases;
pub mod config;
pub mod constitutive;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod problem;
pub mod schemes;
pub mod studies;

pub use error::{DivergenceKind, Error, Result};
