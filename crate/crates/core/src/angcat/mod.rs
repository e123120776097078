//! Backend-independent language of pre-n-angulated categories.
//!
//! Every hom space carries a pinned basis, so morphisms are coordinate vectors
//! and composition is a bilinear tensor supplied by the [`Backend`]. Categorical
//! equations then become linear systems handled by [`crate::exactlin`].

mod ops;
mod system;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{vec_add, vec_neg, vec_scale, vec_sub, Ring};

pub use ops::{
    complete_morphism, compose, direct_sum, identity, is_morphism_of_nseqs, postcompose_matrix,
    precompose_matrix, rotate, suspend, trivial, zero_morphism, Completions, Direction,
};
pub use system::{BlockId, LinearSystem, Term};

/// Object handle: a backend object with a formal power of Σ applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObjRef {
    pub id: usize,
    pub grade: i64,
}

impl ObjRef {
    pub fn new(id: usize, grade: i64) -> Self {
        ObjRef { id, grade }
    }

    pub fn suspend(self, k: i64) -> Self {
        ObjRef { id: self.id, grade: self.grade + k }
    }
}

impl fmt::Display for ObjRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.grade {
            0 => write!(f, "#{}", self.id),
            1 => write!(f, "Σ#{}", self.id),
            g => write!(f, "Σ^{}#{}", g, self.id),
        }
    }
}

/// A hom space with its pinned basis description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomSpace {
    pub src: ObjRef,
    pub tgt: ObjRef,
    pub rank: usize,
    pub ring: Ring,
    /// Human-readable basis elements, in coordinate order.
    pub basis_tag: Vec<String>,
}

/// A morphism given by coordinates in the pinned basis of `Hom(src, tgt)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Morphism {
    pub src: ObjRef,
    pub tgt: ObjRef,
    pub ring: Ring,
    pub coords: Vec<u64>,
}

impl Morphism {
    pub fn new(src: ObjRef, tgt: ObjRef, ring: Ring, coords: Vec<u64>) -> Self {
        let n = ring.modulus();
        Morphism { src, tgt, ring, coords: coords.into_iter().map(|x| x % n).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&x| x == 0)
    }

    fn check_parallel(&self, other: &Morphism) -> Result<()> {
        if self.coords.len() != other.coords.len() {
            return Err(Error::Shape(format!(
                "morphisms {}→{} and {}→{} are not parallel",
                self.src, self.tgt, other.src, other.tgt
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Morphism) -> Result<Morphism> {
        self.check_parallel(other)?;
        Ok(Morphism { coords: vec_add(self.ring, &self.coords, &other.coords), ..self.clone() })
    }

    pub fn sub(&self, other: &Morphism) -> Result<Morphism> {
        self.check_parallel(other)?;
        Ok(Morphism { coords: vec_sub(self.ring, &self.coords, &other.coords), ..self.clone() })
    }

    pub fn neg(&self) -> Morphism {
        Morphism { coords: vec_neg(self.ring, &self.coords), ..self.clone() }
    }

    pub fn scale(&self, s: u64) -> Morphism {
        Morphism { coords: vec_scale(self.ring, &self.coords, s), ..self.clone() }
    }

    /// `(-1)^k f`.
    pub fn signed(&self, k: i64) -> Morphism {
        if k.rem_euclid(2) == 0 {
            self.clone()
        } else {
            self.neg()
        }
    }
}

/// Structure constants of composition `Hom(y,z) x Hom(x,y) -> Hom(x,z)`.
///
/// `entry(k, j)` holds the coordinates of `g_k ∘ f_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tensor {
    pub left: usize,
    pub right: usize,
    pub out: usize,
    pub data: Vec<u64>,
}

impl Tensor {
    pub fn entry(&self, k: usize, j: usize) -> &[u64] {
        let start = (k * self.right + j) * self.out;
        &self.data[start..start + self.out]
    }
}

/// A direct sum with its structure maps.
#[derive(Debug, Clone)]
pub struct DirectSum {
    pub object: ObjRef,
    pub injections: Vec<Morphism>,
    pub projections: Vec<Morphism>,
}

/// A concrete pre-n-angulated category with pinned hom bases.
pub trait Backend: Send + Sync {
    /// The `n` of the n-angulation.
    fn n(&self) -> usize;

    fn ring(&self) -> Ring;

    fn name(&self) -> &'static str;

    fn hom_rank(&self, x: ObjRef, y: ObjRef) -> Result<usize>;

    /// Basis descriptions for `Hom(x, y)`.
    fn hom_basis(&self, x: ObjRef, y: ObjRef) -> Result<Vec<String>>;

    fn compose_tensor(&self, x: ObjRef, y: ObjRef, z: ObjRef) -> Result<Arc<Tensor>>;

    /// The linear isomorphism `Hom(x, y) -> Hom(Σ^k x, Σ^k y)` on coordinates.
    fn suspend_coords(&self, x: ObjRef, y: ObjRef, k: i64, coords: &[u64]) -> Result<Vec<u64>>;

    fn identity_coords(&self, x: ObjRef) -> Result<Vec<u64>>;

    /// An n-angle whose first morphism is `f`.
    fn extend(&self, f: &Morphism) -> Result<NSeq>;

    /// Objects `A` whose suspensions test Yoneda exactness.
    fn generators(&self) -> Vec<ObjRef>;

    /// Range of `k` outside of which `Hom(Σ^k a, x) = 0`.
    fn hom_window(&self, a: ObjRef, x: ObjRef) -> Result<(i64, i64)>;

    fn direct_sum(&self, objs: &[ObjRef]) -> Result<DirectSum>;

    fn zero_object(&self) -> ObjRef;

    /// Object equality up to the backend's identifications (e.g. `Σ = Id`).
    fn obj_eq(&self, x: ObjRef, y: ObjRef) -> bool {
        x == y
    }

    fn describe_object(&self, x: ObjRef) -> String {
        x.to_string()
    }

    fn hom(&self, x: ObjRef, y: ObjRef) -> Result<HomSpace> {
        let basis_tag = self.hom_basis(x, y)?;
        Ok(HomSpace { src: x, tgt: y, rank: basis_tag.len(), ring: self.ring(), basis_tag })
    }
}

/// An n-Σ-sequence `X_1 -> X_2 -> ... -> X_n -> ΣX_1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NSeq {
    /// `X_1, ..., X_n, ΣX_1`.
    pub objects: Vec<ObjRef>,
    /// `f_1, ..., f_n`.
    pub maps: Vec<Morphism>,
}

impl NSeq {
    /// Checks the shape against a backend before building.
    pub fn new(backend: &dyn Backend, maps: Vec<Morphism>) -> Result<NSeq> {
        if maps.len() < 3 {
            return Err(Error::Shape("an n-Σ-sequence needs n >= 3 maps".into()));
        }
        for (i, w) in maps.windows(2).enumerate() {
            if !backend.obj_eq(w[0].tgt, w[1].src) {
                return Err(Error::Shape(format!("f{} and f{} are not composable", i + 1, i + 2)));
            }
        }
        let first = maps[0].src;
        let last = maps.last().unwrap().tgt;
        if !backend.obj_eq(last, first.suspend(1)) {
            return Err(Error::Shape("last map must end at ΣX1".into()));
        }
        let mut objects: Vec<ObjRef> = maps.iter().map(|m| m.src).collect();
        objects.push(last);
        Ok(NSeq { objects, maps })
    }

    pub fn n(&self) -> usize {
        self.maps.len()
    }
}
