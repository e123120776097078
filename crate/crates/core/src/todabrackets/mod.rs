//! Toda brackets as explicit cosets.
//!
//! Chains are stored in application order `f_1, ..., f_n`, so the bracket
//! written `⟨f_n, ..., f_1⟩` lives in `Hom(ΣX_1, X_{n+1})`. The iterated
//! cofiber and iterated fiber flavors are projections of one joint affine
//! system; the fiber-cofiber and intermediate flavors compose independently
//! chosen fill-ins and are evaluated by [`multilinear_image`].

mod flavors;
mod heller;
mod juggling;
mod multilinear;
mod oracle;
mod sampling;

use serde::{Deserialize, Serialize};

use crate::angcat::{
    compose, postcompose_matrix, precompose_matrix, suspend, Backend, Morphism, NSeq, ObjRef,
};
use crate::error::{Error, Result};
use crate::exactlin::{subgroup_sum, Coset, Subgroup};

pub use flavors::{rotated_extension, saturated_extension, toda, toda_cc, toda_fc, toda_ff, toda_mid};
pub use heller::{heller_is_n_angle, yoneda_exact, yoneda_report, HellerVerdict, SpotFailure};
pub use juggling::{juggling_law, JugglingLaw, LawReport};
pub use multilinear::{multilinear_image, Factor, DEFAULT_CAP};
pub use oracle::{oracle_bracket, oracle_cc_with, OracleFlavor};
pub use sampling::random_zero_chain;

/// Composable morphisms `f_1, ..., f_n` in application order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramChain {
    pub maps: Vec<Morphism>,
}

impl DiagramChain {
    pub fn new(b: &dyn Backend, maps: Vec<Morphism>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::Shape("empty chain".into()));
        }
        for (i, w) in maps.windows(2).enumerate() {
            if !b.obj_eq(w[0].tgt, w[1].src) {
                return Err(Error::Shape(format!("f{} and f{} are not composable", i + 1, i + 2)));
            }
        }
        Ok(DiagramChain { maps })
    }

    pub fn n(&self) -> usize {
        self.maps.len()
    }

    /// `f_i`, 1-based.
    pub fn f(&self, i: usize) -> &Morphism {
        &self.maps[i - 1]
    }

    /// `X_i`, 1-based, for `1 <= i <= n + 1`.
    pub fn x(&self, i: usize) -> ObjRef {
        if i <= self.n() {
            self.maps[i - 1].src
        } else {
            self.maps[self.n() - 1].tgt
        }
    }

    /// The hom space `(ΣX_1, X_{n+1})` containing the bracket.
    pub fn target(&self) -> (ObjRef, ObjRef) {
        (self.x(1).suspend(1), self.x(self.n() + 1))
    }

    /// Copy with `f_i` (1-based) replaced.
    pub fn with_map(&self, i: usize, f: Morphism) -> DiagramChain {
        let mut maps = self.maps.clone();
        maps[i - 1] = f;
        DiagramChain { maps }
    }

    pub(crate) fn require_n(&self, b: &dyn Backend) -> Result<()> {
        if self.n() != b.n() {
            return Err(Error::Unsupported(format!(
                "chain of {} maps in a {}-angulated backend",
                self.n(),
                b.n()
            )));
        }
        Ok(())
    }
}

/// Which bracket construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// Iterated cofiber.
    Cc,
    /// Iterated fiber.
    Ff,
    /// Fiber-cofiber.
    Fc,
    /// Intermediate at position `i`.
    Mid(usize),
}

impl std::fmt::Display for Flavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Flavor::Cc => write!(f, "cc"),
            Flavor::Ff => write!(f, "ff"),
            Flavor::Fc => write!(f, "fc"),
            Flavor::Mid(i) => write!(f, "mid({i})"),
        }
    }
}

/// A computed bracket together with the data that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TodaResult {
    pub flavor: Flavor,
    /// `(ΣX_1, X_{n+1})`.
    pub hom: (ObjRef, ObjRef),
    pub bracket: Coset,
    pub extensions_used: Vec<NSeq>,
    /// One fill-in, by component name (e.g. `phi3`, `psi`).
    pub witness: Vec<(String, Morphism)>,
}

impl TodaResult {
    pub fn witness_map(&self, name: &str) -> Option<&Morphism> {
        self.witness.iter().find(|(k, _)| k == name).map(|(_, m)| m)
    }
}

/// Whether each consecutive composite `f_{i+1} f_i` vanishes.
pub fn composable_zero_check(b: &dyn Backend, d: &DiagramChain) -> Result<Vec<bool>> {
    d.maps.windows(2).map(|w| Ok(compose(b, &w[1], &w[0])?.is_zero())).collect()
}

pub(crate) fn require_zero_composites(b: &dyn Backend, maps: &[Morphism]) -> Result<()> {
    for (i, w) in maps.windows(2).enumerate() {
        if !compose(b, &w[1], &w[0])?.is_zero() {
            return Err(Error::HypothesisViolated(i + 1));
        }
    }
    Ok(())
}

/// `(f_n)_* Hom(ΣX_1, X_n) + (Σf_1)^* Hom(ΣX_2, X_{n+1})`.
pub fn indeterminacy(b: &dyn Backend, f1: &Morphism, fn_: &Morphism) -> Result<Subgroup> {
    let ring = b.ring();
    let sx1 = f1.src.suspend(1);
    let post = postcompose_matrix(b, fn_, sx1)?;
    let left = Subgroup::full(ring, post.cols()).image(&post)?;
    let sf1 = suspend(b, f1, 1)?;
    let pre = precompose_matrix(b, &sf1, fn_.tgt)?;
    let right = Subgroup::full(ring, pre.cols()).image(&pre)?;
    subgroup_sum(&left, &right)
}

/// Applies `Σ^k` to every element of a coset in `Hom(x, y)`.
pub(crate) fn suspend_coset(b: &dyn Backend, x: ObjRef, y: ObjRef, k: i64, c: &Coset) -> Result<Coset> {
    if k == 0 {
        return Ok(c.clone());
    }
    let ring = b.ring();
    let out = b.hom_rank(x.suspend(k), y.suspend(k))?;
    let gens = c
        .subgroup()
        .basis()
        .iter()
        .map(|g| b.suspend_coords(x, y, k, g))
        .collect::<Result<Vec<_>>>()?;
    let h = Subgroup::span(ring, out, &gens);
    Ok(match c.representative() {
        None => Coset::empty(ring, out),
        Some(r) => Coset::new(b.suspend_coords(x, y, k, r)?, h),
    })
}
