//! Permutation-group machinery over generic actions: stabilizer chains,
//! orbits, backtrack searches and small subgroup enumerations.

pub mod action;
pub mod backtrack;
pub mod chain;
pub mod derived;
pub mod goursat;
pub mod index2;
pub mod orbit;

pub use action::{Action, Perm, PermAction};
pub use chain::StabChain;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("point {point} leaves the set under the group")]
    NotInvariant { point: usize },
}
