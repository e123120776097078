use crate::error::{Error, Result};
use crate::exactlin::{Coset, Matrix};

use super::{Backend, LinearSystem, Morphism, NSeq, ObjRef, Term};

/// `g ∘ f`.
pub fn compose(b: &dyn Backend, g: &Morphism, f: &Morphism) -> Result<Morphism> {
    if !b.obj_eq(f.tgt, g.src) {
        return Err(Error::Shape(format!(
            "cannot compose {}→{} after {}→{}",
            g.src, g.tgt, f.src, f.tgt
        )));
    }
    let t = b.compose_tensor(f.src, f.tgt, g.tgt)?;
    let ring = b.ring();
    let mut out = vec![0; t.out];
    for (k, &gk) in g.coords.iter().enumerate() {
        if gk == 0 {
            continue;
        }
        for (j, &fj) in f.coords.iter().enumerate() {
            if fj == 0 {
                continue;
            }
            let s = ring.mul(gk, fj);
            for (o, &e) in out.iter_mut().zip(t.entry(k, j)) {
                *o = ring.mul_add(*o, s, e);
            }
        }
    }
    Ok(Morphism::new(f.src, g.tgt, ring, out))
}

/// `Σ^k f`.
pub fn suspend(b: &dyn Backend, f: &Morphism, k: i64) -> Result<Morphism> {
    if k == 0 {
        return Ok(f.clone());
    }
    let coords = b.suspend_coords(f.src, f.tgt, k, &f.coords)?;
    Ok(Morphism::new(f.src.suspend(k), f.tgt.suspend(k), b.ring(), coords))
}

pub fn identity(b: &dyn Backend, x: ObjRef) -> Result<Morphism> {
    Ok(Morphism::new(x, x, b.ring(), b.identity_coords(x)?))
}

pub fn zero_morphism(b: &dyn Backend, x: ObjRef, y: ObjRef) -> Result<Morphism> {
    Ok(Morphism::new(x, y, b.ring(), vec![0; b.hom_rank(x, y)?]))
}

/// Matrix of `u -> g ∘ u` from `Hom(a, g.src)` to `Hom(a, g.tgt)`.
pub fn postcompose_matrix(b: &dyn Backend, g: &Morphism, a: ObjRef) -> Result<Matrix> {
    let t = b.compose_tensor(a, g.src, g.tgt)?;
    let ring = b.ring();
    let mut m = Matrix::zeros(ring, t.out, t.right);
    for j in 0..t.right {
        let mut col = vec![0; t.out];
        for (k, &gk) in g.coords.iter().enumerate() {
            if gk != 0 {
                for (c, &e) in col.iter_mut().zip(t.entry(k, j)) {
                    *c = ring.mul_add(*c, gk, e);
                }
            }
        }
        for (i, v) in col.into_iter().enumerate() {
            m.set(i, j, v);
        }
    }
    Ok(m)
}

/// Matrix of `u -> u ∘ h` from `Hom(h.tgt, z)` to `Hom(h.src, z)`.
pub fn precompose_matrix(b: &dyn Backend, h: &Morphism, z: ObjRef) -> Result<Matrix> {
    let t = b.compose_tensor(h.src, h.tgt, z)?;
    let ring = b.ring();
    let mut m = Matrix::zeros(ring, t.out, t.left);
    for k in 0..t.left {
        let mut col = vec![0; t.out];
        for (j, &hj) in h.coords.iter().enumerate() {
            if hj != 0 {
                for (c, &e) in col.iter_mut().zip(t.entry(k, j)) {
                    *c = ring.mul_add(*c, hj, e);
                }
            }
        }
        for (i, v) in col.into_iter().enumerate() {
            m.set(i, k, v);
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

/// Left rotation `(X_2, ..., X_n, ΣX_1)` ending in `(-1)^n Σf_1`; right
/// rotation `(Σ^{-1}X_n, X_1, ..., X_n)` starting with `(-1)^n Σ^{-1}f_n`.
pub fn rotate(b: &dyn Backend, s: &NSeq, dir: Direction) -> Result<NSeq> {
    let n = s.n() as i64;
    let mut maps = s.maps.clone();
    match dir {
        Direction::Left => {
            let f1 = maps.remove(0);
            maps.push(suspend(b, &f1, 1)?.signed(n));
        }
        Direction::Right => {
            let fnn = maps.pop().unwrap();
            maps.insert(0, suspend(b, &fnn, -1)?.signed(n));
        }
    }
    NSeq::new(b, maps)
}

/// The trivial sequence `X -> X -> 0 -> ... -> 0 -> ΣX` starting with `1_X`.
pub fn trivial(b: &dyn Backend, x: ObjRef, n: usize) -> Result<NSeq> {
    let zero = b.zero_object();
    let mut maps = vec![identity(b, x)?, zero_morphism(b, x, zero)?];
    for _ in 2..n - 1 {
        maps.push(zero_morphism(b, zero, zero)?);
    }
    maps.push(zero_morphism(b, zero, x.suspend(1))?);
    NSeq::new(b, maps)
}

/// Componentwise direct sum with block-diagonal maps.
pub fn direct_sum(b: &dyn Backend, s1: &NSeq, s2: &NSeq) -> Result<NSeq> {
    if s1.n() != s2.n() {
        return Err(Error::BackendMismatch("direct sum of sequences of different length".into()));
    }
    let sums = s1
        .objects
        .iter()
        .zip(&s2.objects)
        .map(|(&x, &y)| b.direct_sum(&[x, y]))
        .collect::<Result<Vec<_>>>()?;
    let mut maps = Vec::with_capacity(s1.n());
    for i in 0..s1.n() {
        let (src, tgt) = (&sums[i], &sums[i + 1]);
        let a = compose(b, &compose(b, &tgt.injections[0], &s1.maps[i])?, &src.projections[0])?;
        let c = compose(b, &compose(b, &tgt.injections[1], &s2.maps[i])?, &src.projections[1])?;
        maps.push(a.add(&c)?);
    }
    NSeq::new(b, maps)
}

/// True iff `comps` is a morphism of sequences `a -> b`, the last square
/// being checked against `Σφ_1`.
pub fn is_morphism_of_nseqs(bk: &dyn Backend, a: &NSeq, b: &NSeq, comps: &[Morphism]) -> bool {
    let check = || -> Result<bool> {
        let n = a.n();
        if comps.len() != n || b.n() != n {
            return Ok(false);
        }
        let last = suspend(bk, &comps[0], 1)?;
        for j in 0..n {
            let next = if j + 1 == n { &last } else { &comps[j + 1] };
            let lhs = compose(bk, &b.maps[j], &comps[j])?;
            let rhs = compose(bk, next, &a.maps[j])?;
            if lhs.coords != rhs.coords {
                return Ok(false);
            }
        }
        Ok(true)
    };
    check().unwrap_or(false)
}

/// All completions of a partial morphism of sequences.
#[derive(Debug, Clone)]
pub struct Completions {
    /// Coset over the concatenated coordinates of `φ_1, ..., φ_n`.
    pub coset: Coset,
    /// `(src, tgt, offset, len)` of each component.
    pub layout: Vec<(ObjRef, ObjRef, usize, usize)>,
}

impl Completions {
    /// Components at a point of the coset.
    pub fn components(&self, point: &[u64]) -> Vec<Morphism> {
        let ring = self.coset.ring();
        self.layout
            .iter()
            .map(|&(s, t, off, len)| Morphism::new(s, t, ring, point[off..off + len].to_vec()))
            .collect()
    }

    /// The canonical completion.
    pub fn witness(&self) -> Option<Vec<Morphism>> {
        self.coset.representative().map(|p| self.components(p))
    }
}

/// Solves for every morphism of sequences `a -> b` with prescribed components
/// at positions `pos` and `pos + 1` (0-based).
pub fn complete_morphism(
    bk: &dyn Backend,
    a: &NSeq,
    b: &NSeq,
    pos: usize,
    given: (&Morphism, &Morphism),
) -> Result<Completions> {
    let n = a.n();
    if b.n() != n || pos + 1 >= n {
        return Err(Error::Shape("completion positions out of range".into()));
    }
    let square = compose(bk, &b.maps[pos], given.0)?;
    if square.coords != compose(bk, given.1, &a.maps[pos])?.coords {
        return Err(Error::NotCommutingInput(pos + 1));
    }
    let mut sys = LinearSystem::new(bk);
    let blocks = (0..n)
        .map(|j| sys.add_unknown(a.objects[j], b.objects[j]))
        .collect::<Result<Vec<_>>>()?;
    sys.add_equation(a.objects[pos], b.objects[pos], &[Term::plain(blocks[pos])], Some(given.0))?;
    sys.add_equation(
        a.objects[pos + 1],
        b.objects[pos + 1],
        &[Term::plain(blocks[pos + 1])],
        Some(given.1),
    )?;
    for j in 0..n {
        let next = if j + 1 == n {
            Term::plain(blocks[0]).suspended(1)
        } else {
            Term::plain(blocks[j + 1])
        };
        let minus = bk.ring().modulus() - 1;
        sys.add_equation(
            a.objects[j],
            b.objects[j + 1],
            &[Term::plain(blocks[j]).post(&b.maps[j]), next.pre(&a.maps[j]).coef(minus)],
            None,
        )?;
    }
    let coset = sys.solve()?;
    if coset.is_empty() {
        return Err(Error::InconsistentBackend(
            "no completion of the partial morphism exists".into(),
        ));
    }
    let layout = (0..n)
        .map(|j| {
            let idx = sys.indices(&[blocks[j]]);
            (a.objects[j], b.objects[j], idx.first().copied().unwrap_or(0), idx.len())
        })
        .collect();
    Ok(Completions { coset, layout })
}
