//! Bound quiver algebras and the 4-angulated cluster tilting subcategory of
//! their homotopy category of projective complexes.
//!
//! Modules enter through minimal projective resolutions, morphisms are chain
//! maps up to homotopy with a pinned basis, and `Σ` is the shift by `n - 2`.
//! Extensions of morphisms come from the cone-and-approximate staircase.
//!
//! Conventions: complexes are graded cohomologically, `X[1]` negates the
//! differential, chain maps shift without sign, and the cone of `f: X -> Y`
//! is `X[1] ⊕ Y` with differential `[[-d_X, 0], [f, d_Y]]`.

mod algebra;
mod backend;
mod complex;
mod filtered;
mod homotopy;
mod rep;
mod resolution;

pub use algebra::{Arrow, Path, QuiverAlgebra, QuiverSpec, RelationTerm};
pub use backend::{describe_chain_map, extend_gko, CTSubcat, QuiverBackend, Summand};
pub use complex::{cone, ChainMap, Cone, LMat, ProjComplex};
pub use filtered::{ss_bracket_4, ss_compare, SsComparison};
pub use homotopy::{describe, HomData};
pub use rep::{ModuleMap, Rep};
pub use resolution::{lift_module_map, projective_resolution, vertex_matrix, Resolution, RESOLUTION_CAP};
