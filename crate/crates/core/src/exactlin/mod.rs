//! Exact linear algebra over `Z/N` and prime fields.
//!
//! Row spans are canonicalized by the Howell normal form, which handles zero
//! divisors in `Z/p²` and degenerates to reduced row echelon form over a field.
//! Subgroups of `(Z/N)^k` are stored by their Howell basis, so equality of
//! subgroups is equality of bases.

mod howell;
mod matrix;
mod ring;

pub use howell::{
    coset_eq, enumerate_quotient, howell_form, kernel, solve_affine, subgroup_sum, Coset,
    Subgroup,
};
pub use matrix::{vec_add, vec_neg, vec_scale, vec_sub, Matrix};
pub use ring::Ring;
