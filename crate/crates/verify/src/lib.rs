//! Verification pipeline for the coinvariant-lattice orbifold computations:
//! expected values, cached stage runs, subgroup identification and reports.

pub mod cache;
pub mod error;
pub mod expect;
pub mod pipeline;
pub mod report;
pub mod subgroups;

pub use error::VerifyError;
