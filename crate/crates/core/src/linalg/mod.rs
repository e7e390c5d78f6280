//! Sparse storage, restarted GMRES and dense diagnostics.

mod dense;
mod gmres;
mod sparse;

pub use dense::{condition_number_dense, Conditioning, DENSE_LIMIT};
pub use gmres::{gmres, GmresOptions, GmresStats};
pub use sparse::{CsrMatrix, TripletMatrix};
