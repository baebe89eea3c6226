//! Finite-group computation engine: dense Cayley-table groups, a coset
//! enumerator for finitely presented groups, non-abelian tensor and exterior
//! constructions with their towers and connecting homomorphisms, and a
//! verification harness that checks structural identities across a catalog
//! of small groups.

pub mod catalog;
pub mod error;
pub mod fp;
pub mod group;
pub mod harness;
pub mod oracle;
pub mod snf;
pub mod tensor;

pub use error::{Error, Result};
pub use group::{ActionTable, Elem, FiniteGroup, GroupHom, Limits, SeriesChain, Subgroup};
