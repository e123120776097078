use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{solve_affine, Matrix, Ring, Subgroup};

use super::{ChainMap, LMat, ModuleMap, ProjComplex, QuiverAlgebra, Rep};

/// Steps allowed before a resolution is abandoned.
pub const RESOLUTION_CAP: usize = 32;

/// A minimal projective resolution `P_r -> ... -> P_0 -> M`, with `P_k` in
/// degree `-k`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Resolution {
    pub complex: ProjComplex,
    /// Generators of `M` hit by the summands of `P_0`: `(vertex, vector in M(vertex))`.
    pub top: Vec<(usize, Vec<u64>)>,
}

impl Resolution {
    /// Projective dimension (length of the resolution).
    pub fn length(&self) -> usize {
        self.complex.support().map_or(0, |(lo, _)| (-lo) as usize)
    }
}

/// Matrix of an [`LMat`] acting on the vertex-`y` spaces of the projectives.
pub fn vertex_matrix(alg: &QuiverAlgebra, d: &LMat, y: usize) -> Matrix {
    let ring = alg.ring();
    let row_off = offsets(alg, &d.rows, y);
    let col_off = offsets(alg, &d.cols, y);
    let mut m = Matrix::zeros(ring, *row_off.last().unwrap(), *col_off.last().unwrap());
    for (i, &c) in d.cols.iter().enumerate() {
        let n = alg.between_dim(c, y);
        for q in 0..n {
            let mut e = vec![0u64; n];
            e[q] = 1;
            for (j, &r) in d.rows.iter().enumerate() {
                let img = alg.mul(r, c, y, &d.entries[j][i], &e);
                for (t, &x) in img.iter().enumerate() {
                    m.set(row_off[j] + t, col_off[i] + q, x);
                }
            }
        }
    }
    m
}

fn offsets(alg: &QuiverAlgebra, verts: &[usize], y: usize) -> Vec<usize> {
    let mut out = vec![0];
    for &v in verts {
        out.push(out.last().unwrap() + alg.between_dim(v, y));
    }
    out
}

/// Coordinates of `v` in an echelon basis, if it lies in the span.
fn echelon_coords(ring: Ring, basis: &[Vec<u64>], v: &[u64]) -> Option<Vec<u64>> {
    let mut v = v.to_vec();
    let mut out = Vec::with_capacity(basis.len());
    for row in basis {
        let p = row.iter().position(|&x| x != 0)?;
        let c = ring.mul(v[p], ring.inv(row[p])?);
        for (a, &b) in v.iter_mut().zip(row) {
            *a = ring.sub(*a, ring.mul(c, b));
        }
        out.push(c);
    }
    v.iter().all(|&x| x == 0).then_some(out)
}

/// Top generators: per vertex, standard vectors completing a basis of the radical.
fn top_generators(alg: &QuiverAlgebra, m: &Rep) -> Vec<(usize, Vec<u64>)> {
    let ring = alg.ring();
    let mut out = Vec::new();
    for x in 0..alg.num_vertices() {
        let d = m.dims[x];
        if d == 0 {
            continue;
        }
        let mut gens: Vec<Vec<u64>> = Vec::new();
        for a in 0..alg.num_arrows() {
            let (s, t) = alg.arrow_ends(a);
            if t == x {
                gens.extend(m.maps[a].transpose().row_vecs().into_iter().take(m.dims[s]));
            }
        }
        let mut span = Subgroup::span(ring, d, &gens);
        for j in 0..d {
            let mut e = vec![0u64; d];
            e[j] = 1;
            if !span.contains(&e) {
                out.push((x, e.clone()));
                gens.push(e);
                span = Subgroup::span(ring, d, &gens);
            }
        }
    }
    out
}

/// Columns `M(q) m` for every generator and basis path `q` out of its vertex.
fn cover_matrix(alg: &QuiverAlgebra, m: &Rep, gens: &[(usize, Vec<u64>)], y: usize) -> Matrix {
    let ring = alg.ring();
    let mut cols: Vec<Vec<u64>> = Vec::new();
    for (x, v) in gens {
        for &q in alg.between(*x, y) {
            cols.push(m.path_matrix(alg, q).mul_vec(v).expect("shapes agree"));
        }
    }
    Matrix::from_vectors(ring, m.dims[y], &cols).transpose()
}

/// Kernel of a map from `⊕ P_{verts}` as a representation, with its embedding.
fn kernel_rep(alg: &QuiverAlgebra, verts: &[usize], maps: &[Matrix]) -> (Rep, Vec<Vec<Vec<u64>>>) {
    let ring = alg.ring();
    let nv = alg.num_vertices();
    let bases: Vec<Vec<Vec<u64>>> = (0..nv)
        .map(|y| {
            let width: usize = verts.iter().map(|&v| alg.between_dim(v, y)).sum();
            Subgroup::full(ring, width).kernel_within(&maps[y]).expect("shapes agree").basis().to_vec()
        })
        .collect();
    let ident = LMat::identity(alg, verts);
    let arrows = (0..alg.num_arrows())
        .map(|a| {
            let (s, t) = alg.arrow_ends(a);
            let act = arrow_action(alg, &ident, a);
            let cols: Vec<Vec<u64>> = bases[s]
                .iter()
                .map(|b| {
                    let img = act.mul_vec(b).expect("shapes agree");
                    echelon_coords(ring, &bases[t], &img).expect("kernel is a submodule")
                })
                .collect();
            if cols.is_empty() {
                Matrix::zeros(ring, bases[t].len(), 0)
            } else {
                Matrix::from_vectors(ring, bases[t].len(), &cols).transpose()
            }
        })
        .collect();
    let dims = bases.iter().map(|b| b.len()).collect();
    (Rep { dims, maps: arrows }, bases)
}

/// Action of arrow `a: s -> t` from `P(s)` to `P(t)` for `P = ⊕ P_{rows}`.
fn arrow_action(alg: &QuiverAlgebra, ident: &LMat, a: usize) -> Matrix {
    let ring = alg.ring();
    let (s, t) = alg.arrow_ends(a);
    let arrow = alg.arrow_element(a);
    let src_off = offsets(alg, &ident.rows, s);
    let tgt_off = offsets(alg, &ident.rows, t);
    let mut m = Matrix::zeros(ring, *tgt_off.last().unwrap(), *src_off.last().unwrap());
    for (j, &r) in ident.rows.iter().enumerate() {
        let n = alg.between_dim(r, s);
        for q in 0..n {
            let mut e = vec![0u64; n];
            e[q] = 1;
            let img = alg.mul(r, s, t, &e, &arrow);
            for (k, &x) in img.iter().enumerate() {
                m.set(tgt_off[j] + k, src_off[j] + q, x);
            }
        }
    }
    m
}

/// Minimal projective resolution via iterated projective covers.
pub fn projective_resolution(alg: &QuiverAlgebra, m: &Rep) -> Result<Resolution> {
    let nv = alg.num_vertices();
    let top = top_generators(alg, m);
    let mut terms: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    if top.is_empty() {
        return Ok(Resolution { complex: ProjComplex::zero(), top });
    }
    let mut verts: Vec<usize> = top.iter().map(|g| g.0).collect();
    terms.insert(0, verts.clone());
    let mut maps: Vec<Matrix> = (0..nv).map(|y| cover_matrix(alg, m, &top, y)).collect();
    let mut degree = 0i64;
    loop {
        let (k, embed) = kernel_rep(alg, &verts, &maps);
        if k.total_dim() == 0 {
            break;
        }
        if (-degree) as usize >= RESOLUTION_CAP {
            return Err(Error::ResolutionTooLong(RESOLUTION_CAP));
        }
        let gens = top_generators(alg, &k);
        let next: Vec<usize> = gens.iter().map(|g| g.0).collect();
        let mut d = LMat::zero(alg, &verts, &next);
        for (i, (y, v)) in gens.iter().enumerate() {
            // the generator as a vector of P(y), split by summand
            let full = Matrix::from_vectors(alg.ring(), embed[*y].first().map_or(0, |r| r.len()), &embed[*y])
                .transpose()
                .mul_vec(v)?;
            let off = offsets(alg, &verts, *y);
            for j in 0..verts.len() {
                d.entries[j][i] = full[off[j]..off[j + 1]].to_vec();
            }
        }
        degree -= 1;
        terms.insert(degree, next.clone());
        maps = (0..nv).map(|y| vertex_matrix(alg, &d, y)).collect();
        diffs.insert(degree, d);
        verts = next;
    }
    let complex = ProjComplex { terms, diffs };
    complex.check(alg)?;
    Ok(Resolution { complex, top })
}

/// Lifts a module map to a chain map between the resolutions.
pub fn lift_module_map(
    alg: &QuiverAlgebra,
    g: &ModuleMap,
    rm: &Resolution,
    (n, rn): (&Rep, &Resolution),
) -> Result<ChainMap> {
    let mut comps = BTreeMap::new();
    let p0m = rm.complex.term(0).to_vec();
    let p0n = rn.complex.term(0).to_vec();
    if p0m.is_empty() || p0n.is_empty() {
        return Ok(ChainMap::zero());
    }
    let mut phi = LMat::zero(alg, &p0n, &p0m);
    for (i, (x, v)) in rm.top.iter().enumerate() {
        let target = g.blocks[*x].mul_vec(v)?;
        let cover = cover_matrix(alg, n, &rn.top, *x);
        let sol = solve_affine(&cover, &target)?;
        let u = sol.representative().ok_or_else(|| Error::Invalid("module map does not lift".into()))?;
        let off = offsets(alg, &p0n, *x);
        for j in 0..p0n.len() {
            phi.entries[j][i] = u[off[j]..off[j + 1]].to_vec();
        }
    }
    comps.insert(0, phi);
    let lo = rm.complex.support().map_or(0, |s| s.0);
    for k in (lo..0).rev() {
        let src = rm.complex.term(k).to_vec();
        let tgt = rn.complex.term(k).to_vec();
        let prev = &comps[&(k + 1)];
        let want = LMat::compose(prev, alg, &rm.complex.diff(alg, k));
        let mut phi = LMat::zero(alg, &tgt, &src);
        let dn = rn.complex.diff(alg, k);
        for (i, &y) in src.iter().enumerate() {
            let t: Vec<u64> = want.entries.iter().flat_map(|row| row[i].clone()).collect();
            if t.iter().all(|&x| x == 0) {
                continue;
            }
            if tgt.is_empty() {
                return Err(Error::Invalid("module map does not lift".into()));
            }
            let sol = solve_affine(&vertex_matrix(alg, &dn, y), &t)?;
            let u = sol.representative().ok_or_else(|| Error::Invalid("module map does not lift".into()))?;
            let off = offsets(alg, &tgt, y);
            for j in 0..tgt.len() {
                phi.entries[j][i] = u[off[j]..off[j + 1]].to_vec();
            }
        }
        comps.insert(k, phi);
    }
    Ok(ChainMap { comps })
}
