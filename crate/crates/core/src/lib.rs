//! Exact computations on coinvariant lattices of the Leech lattice and the
//! finite quadratic modules attached to them.

pub mod error;
pub mod fqm;
pub mod glue;
pub mod irr;
pub mod isometry;
pub mod lattice;
pub mod linalg;
pub mod shape;

pub use error::CoreError;
