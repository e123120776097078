//! Exact computation of Toda brackets in pre-n-angulated categories.
//!
//! The crate is layered bottom-up:
//!
//! - [`exactlin`]: linear algebra over `Z/N` (Howell forms, subgroups, cosets).
//! - [`angcat`]: objects, hom spaces, morphisms and n-Σ-sequences over an
//!   abstract [`angcat::Backend`].
//! - [`freelocal`]: free modules over `Z/p²` with the exotic 4-angulation.
//! - [`quiverhom`]: bound quiver algebras, projective complexes and the
//!   4-angulated cluster tilting subcategory of the homotopy category.
//! - [`todabrackets`]: the bracket flavors, indeterminacy, Heller's criterion
//!   and the structural property checks.

pub mod angcat;
pub mod error;
pub mod exactlin;
pub mod freelocal;
pub mod quiverhom;
pub mod todabrackets;

pub use error::{Error, Result};
