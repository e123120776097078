//! Free modules over `R = Z/p²` with `Σ = Id`, carrying the exotic
//! 4-angulation.
//!
//! Objects are `R^rank` (the object id is the rank). `Hom(R^a, R^b)` is the
//! module of `b × a` matrices with the matrix-unit basis in row-major order, so
//! the coordinates of a morphism are its matrix entries read row by row.
//! Extensions are built from a normal form `U f V = diag(1.., p.., 0..)` by
//! summing three kinds of building blocks and conjugating back.

use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::angcat::{Backend, DirectSum, Morphism, NSeq, ObjRef, Tensor};
use crate::error::{Error, Result};
use crate::exactlin::{Matrix, Ring};

/// Normal form data for a matrix over `Z/p²`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FLDecomposition {
    pub u: Matrix,
    pub v: Matrix,
    pub units: usize,
    pub ps: usize,
    pub zeros: usize,
}

/// Finds invertible `U`, `V` with `U f V = diag(1,…,1, p,…,p, 0,…,0)`.
///
/// Unit entries are used as pivots first, taking the smallest row-major index.
pub fn local_normal_form(f: &Matrix, p: u64) -> FLDecomposition {
    let ring = f.ring();
    let (rows, cols) = (f.rows(), f.cols());
    let mut m = f.clone();
    let mut u = Matrix::identity(ring, rows);
    let mut v = Matrix::identity(ring, cols);
    let swap_rows = |m: &mut Matrix, i: usize, j: usize| {
        for c in 0..m.cols() {
            let (a, b) = (m.get(i, c), m.get(j, c));
            m.set(i, c, b);
            m.set(j, c, a);
        }
    };
    let swap_cols = |m: &mut Matrix, i: usize, j: usize| {
        for r in 0..m.rows() {
            let (a, b) = (m.get(r, i), m.get(r, j));
            m.set(r, i, b);
            m.set(r, j, a);
        }
    };
    let add_row = |m: &mut Matrix, dst: usize, src: usize, s: u64| {
        for c in 0..m.cols() {
            let val = ring.mul_add(m.get(dst, c), s, m.get(src, c));
            m.set(dst, c, val);
        }
    };
    let add_col = |m: &mut Matrix, dst: usize, src: usize, s: u64| {
        for r in 0..m.rows() {
            let val = ring.mul_add(m.get(r, dst), s, m.get(r, src));
            m.set(r, dst, val);
        }
    };
    let scale_row = |m: &mut Matrix, i: usize, s: u64| {
        for c in 0..m.cols() {
            let val = ring.mul(m.get(i, c), s);
            m.set(i, c, val);
        }
    };
    let mut k = 0;
    let mut units = 0;
    let mut ps = 0;
    for phase in 0..2 {
        while k < rows.min(cols) {
            let pick = (k..rows)
                .flat_map(|r| (k..cols).map(move |c| (r, c)))
                .find(|&(r, c)| {
                    let e = m.get(r, c);
                    if phase == 0 {
                        ring.is_unit(e)
                    } else {
                        e != 0
                    }
                });
            let Some((r, c)) = pick else { break };
            if r != k {
                swap_rows(&mut m, r, k);
                swap_rows(&mut u, r, k);
            }
            if c != k {
                swap_cols(&mut m, c, k);
                swap_cols(&mut v, c, k);
            }
            let e = m.get(k, k);
            let (unit, pivot) = if phase == 0 { (e, 1) } else { (e / p, p) };
            let s = ring.inv(unit).expect("pivot cofactor is a unit");
            scale_row(&mut m, k, s);
            scale_row(&mut u, k, s);
            for r in 0..rows {
                if r != k && m.get(r, k) != 0 {
                    let q = ring.neg(m.get(r, k) / pivot);
                    add_row(&mut m, r, k, q);
                    add_row(&mut u, r, k, q);
                }
            }
            for c in 0..cols {
                if c != k && m.get(k, c) != 0 {
                    let q = ring.neg(m.get(k, c) / pivot);
                    add_col(&mut m, c, k, q);
                    add_col(&mut v, c, k, q);
                }
            }
            if phase == 0 {
                units += 1;
            } else {
                ps += 1;
            }
            k += 1;
        }
    }
    FLDecomposition { u, v, units, ps, zeros: rows.min(cols) - units - ps }
}

/// The category of finitely generated free `Z/p²`-modules.
pub struct FreeLocal {
    p: u64,
    ring: Ring,
    tensors: RwLock<HashMap<(usize, usize, usize), Arc<Tensor>>>,
}

impl FreeLocal {
    pub fn new(p: u64) -> Result<Self> {
        Ring::prime_field(p)?;
        let ring = Ring::modular(p * p)?;
        Ok(FreeLocal { p, ring, tensors: RwLock::new(HashMap::new()) })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn obj(&self, rank: usize) -> ObjRef {
        ObjRef::new(rank, 0)
    }

    /// Morphism with the given `b × a` matrix.
    pub fn morphism(&self, m: &Matrix) -> Morphism {
        Morphism::new(self.obj(m.cols()), self.obj(m.rows()), self.ring, m.data().to_vec())
    }

    pub fn morphism_i64(&self, rows: &[Vec<i64>]) -> Result<Morphism> {
        Ok(self.morphism(&Matrix::from_i64(self.ring, rows)?))
    }

    /// Scalar endomorphism of `R`.
    pub fn scalar(&self, x: i64) -> Morphism {
        Morphism::new(self.obj(1), self.obj(1), self.ring, vec![self.ring.reduce(x)])
    }

    pub fn matrix(&self, f: &Morphism) -> Matrix {
        Matrix::from_rows(self.ring, f.tgt.id, f.src.id, f.coords.clone())
            .expect("coordinates match the matrix shape")
    }

    fn seq(&self, maps: [Matrix; 4]) -> Result<NSeq> {
        NSeq::new(self, maps.iter().map(|m| self.morphism(m)).collect())
    }
}

impl Backend for FreeLocal {
    fn n(&self) -> usize {
        4
    }

    fn ring(&self) -> Ring {
        self.ring
    }

    fn name(&self) -> &'static str {
        "free_local"
    }

    fn hom_rank(&self, x: ObjRef, y: ObjRef) -> Result<usize> {
        Ok(x.id * y.id)
    }

    fn hom_basis(&self, x: ObjRef, y: ObjRef) -> Result<Vec<String>> {
        Ok((0..y.id).flat_map(|r| (0..x.id).map(move |c| format!("E[{r},{c}]"))).collect())
    }

    fn compose_tensor(&self, x: ObjRef, y: ObjRef, z: ObjRef) -> Result<Arc<Tensor>> {
        let key = (x.id, y.id, z.id);
        if let Some(t) = self.tensors.read().get(&key) {
            return Ok(t.clone());
        }
        let (a, b, c) = key;
        let (left, right, out) = (b * c, a * b, a * c);
        let mut data = vec![0; left * right * out];
        for r in 0..c {
            for s in 0..b {
                for t in 0..a {
                    let k = r * b + s;
                    let j = s * a + t;
                    data[(k * right + j) * out + r * a + t] = 1;
                }
            }
        }
        let t = Arc::new(Tensor { left, right, out, data });
        self.tensors.write().insert(key, t.clone());
        Ok(t)
    }

    fn suspend_coords(&self, _x: ObjRef, _y: ObjRef, _k: i64, coords: &[u64]) -> Result<Vec<u64>> {
        Ok(coords.to_vec())
    }

    fn identity_coords(&self, x: ObjRef) -> Result<Vec<u64>> {
        Ok(Matrix::identity(self.ring, x.id).data().to_vec())
    }

    fn extend(&self, f: &Morphism) -> Result<NSeq> {
        extend_freelocal(self, f)
    }

    fn generators(&self) -> Vec<ObjRef> {
        vec![self.obj(1)]
    }

    fn hom_window(&self, _a: ObjRef, _x: ObjRef) -> Result<(i64, i64)> {
        Ok((0, 0))
    }

    fn direct_sum(&self, objs: &[ObjRef]) -> Result<DirectSum> {
        let total: usize = objs.iter().map(|o| o.id).sum();
        let mut injections = Vec::new();
        let mut projections = Vec::new();
        let mut off = 0;
        for o in objs {
            let mut inj = Matrix::zeros(self.ring, total, o.id);
            let mut proj = Matrix::zeros(self.ring, o.id, total);
            for i in 0..o.id {
                inj.set(off + i, i, 1);
                proj.set(i, off + i, 1);
            }
            injections.push(self.morphism(&inj));
            projections.push(self.morphism(&proj));
            off += o.id;
        }
        Ok(DirectSum { object: self.obj(total), injections, projections })
    }

    fn zero_object(&self) -> ObjRef {
        self.obj(0)
    }

    fn obj_eq(&self, x: ObjRef, y: ObjRef) -> bool {
        x.id == y.id
    }

    fn describe_object(&self, x: ObjRef) -> String {
        format!("R^{}", x.id)
    }
}

/// A 4-angle starting with `f`.
///
/// Unit diagonal entries contribute trivial sequences, `p` entries the
/// sequence with every map `p`, and the remaining rows and columns the
/// rotated trivial sequences `R -> 0 -> 0 -> R -> R` and `0 -> R -> R -> 0 -> 0`.
pub fn extend_freelocal(fl: &FreeLocal, f: &Morphism) -> Result<NSeq> {
    if f.coords.len() != f.src.id * f.tgt.id {
        return Err(Error::Shape("morphism does not match its objects".into()));
    }
    let ring = fl.ring;
    let p = fl.p;
    let fm = fl.matrix(f);
    let d = local_normal_form(&fm, p);
    let (a, b, u, q) = (f.src.id, f.tgt.id, d.units, d.ps);
    let mut e2 = Matrix::zeros(ring, b - u, b);
    for j in 0..q {
        e2.set(j, u + j, p);
    }
    for k in 0..b - u - q {
        e2.set(q + k, u + q + k, 1);
    }
    let mut e3 = Matrix::zeros(ring, a - u, b - u);
    for j in 0..q {
        e3.set(j, j, p);
    }
    let mut e4 = Matrix::zeros(ring, a, a - u);
    for j in 0..q {
        e4.set(u + j, j, p);
    }
    for k in 0..a - u - q {
        e4.set(u + q + k, q + k, 1);
    }
    // (D, e2, e3, e4) is a sum of building blocks; conjugating by f = U^{-1} D V^{-1}
    // gives (f, e2 U, e3, V e4).
    let e2u = e2.mul(&d.u)?;
    let ve4 = d.v.mul(&e4)?;
    fl.seq([fm, e2u, e3, ve4])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_form_profiles() {
        let fl = FreeLocal::new(2).unwrap();
        let r = fl.ring();
        for (rows, profile) in [
            (vec![vec![3]], (1, 0, 0)),
            (vec![vec![2]], (0, 1, 0)),
            (vec![vec![2, 2], vec![2, 2]], (0, 1, 1)),
            (vec![vec![0, 1, 2], vec![2, 0, 0]], (1, 1, 0)),
        ] {
            let f = Matrix::from_i64(r, &rows).unwrap();
            let d = local_normal_form(&f, 2);
            assert_eq!((d.units, d.ps, d.zeros), profile);
            let diag = d.u.mul(&f).unwrap().mul(&d.v).unwrap();
            for i in 0..diag.rows() {
                for j in 0..diag.cols() {
                    let want = if i != j {
                        0
                    } else if i < d.units {
                        1
                    } else if i < d.units + d.ps {
                        2
                    } else {
                        0
                    };
                    assert_eq!(diag.get(i, j), want);
                }
            }
            assert!(d.u.inverse().is_some() && d.v.inverse().is_some());
        }
    }

    #[test]
    fn extension_of_p_is_all_p() {
        let fl = FreeLocal::new(3).unwrap();
        let s = fl.extend(&fl.scalar(3)).unwrap();
        assert_eq!(s.objects.iter().map(|o| o.id).collect::<Vec<_>>(), vec![1; 5]);
        assert!(s.maps.iter().all(|m| m.coords == vec![3]));
    }

    #[test]
    fn extension_of_unit_is_trivial() {
        let fl = FreeLocal::new(3).unwrap();
        let s = fl.extend(&fl.scalar(1)).unwrap();
        assert_eq!(s.objects.iter().map(|o| o.id).collect::<Vec<_>>(), vec![1, 1, 0, 0, 1]);
    }
}
