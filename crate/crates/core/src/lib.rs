//! Exact Weil representations of `Mp2(Z)` attached to integer lattices.
//!
//! The crate computes the representation `ρ_M` on the group ring of the
//! discriminant form `M*/M` in three independent ways: by a closed formula
//! assembled from p-adic Jordan data, by multiplying generator matrices along
//! a word in `T` and `S`, and by direct finite sums. All arithmetic is exact
//! in cyclotomic fields.

pub mod error;
pub mod exact;
pub mod jordan;
pub mod lattice;
pub mod metaplectic;
pub mod batch;
pub mod numth;
pub mod weilrep;

pub use error::{Error, Result};
