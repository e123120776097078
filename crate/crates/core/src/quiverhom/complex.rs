use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::Ring;

use super::QuiverAlgebra;

/// A map `⊕_i P_{cols[i]} -> ⊕_j P_{rows[j]}` between sums of indecomposable
/// projectives.
///
/// Entry `(j, i)` lies in `Hom(P_{cols[i]}, P_{rows[j]}) = e_{rows[j]} Λ e_{cols[i]}`:
/// the map sends `e_{cols[i]}` to a combination of paths walking from
/// `rows[j]` to `cols[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LMat {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub entries: Vec<Vec<Vec<u64>>>,
}

impl LMat {
    pub fn zero(alg: &QuiverAlgebra, rows: &[usize], cols: &[usize]) -> LMat {
        let entries = rows
            .iter()
            .map(|&r| cols.iter().map(|&c| vec![0u64; alg.between_dim(r, c)]).collect())
            .collect();
        LMat { rows: rows.to_vec(), cols: cols.to_vec(), entries }
    }

    pub fn identity(alg: &QuiverAlgebra, verts: &[usize]) -> LMat {
        let mut m = LMat::zero(alg, verts, verts);
        for (i, &v) in verts.iter().enumerate() {
            m.entries[i][i] = alg.unit(v);
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().flatten().all(|&x| x == 0)
    }

    /// `self ∘ other`.
    pub fn compose(&self, alg: &QuiverAlgebra, other: &LMat) -> LMat {
        debug_assert_eq!(self.cols, other.rows);
        let ring = alg.ring();
        let mut out = LMat::zero(alg, &self.rows, &other.cols);
        for (k, &u) in self.rows.iter().enumerate() {
            for (i, &v) in other.cols.iter().enumerate() {
                let acc = &mut out.entries[k][i];
                for (j, &w) in self.cols.iter().enumerate() {
                    let x = &self.entries[k][j];
                    let y = &other.entries[j][i];
                    if x.iter().all(|&c| c == 0) || y.iter().all(|&c| c == 0) {
                        continue;
                    }
                    let prod = alg.mul(u, w, v, x, y);
                    for (a, b) in acc.iter_mut().zip(prod) {
                        *a = ring.add(*a, b);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, ring: Ring, other: &LMat) -> LMat {
        let mut out = self.clone();
        for (r, o) in out.entries.iter_mut().zip(&other.entries) {
            for (x, y) in r.iter_mut().zip(o) {
                for (a, &b) in x.iter_mut().zip(y) {
                    *a = ring.add(*a, b);
                }
            }
        }
        out
    }

    pub fn scale(&self, ring: Ring, s: u64) -> LMat {
        let mut out = self.clone();
        for x in out.entries.iter_mut().flatten().flatten() {
            *x = ring.mul(*x, s);
        }
        out
    }

    pub fn neg(&self, ring: Ring) -> LMat {
        self.scale(ring, ring.reduce(-1))
    }

    /// Number of field coordinates.
    pub fn coord_len(&self) -> usize {
        self.entries.iter().flatten().map(|e| e.len()).sum()
    }

    pub fn to_coords(&self) -> Vec<u64> {
        self.entries.iter().flatten().flatten().copied().collect()
    }

    pub fn from_coords(alg: &QuiverAlgebra, rows: &[usize], cols: &[usize], coords: &[u64]) -> LMat {
        let mut m = LMat::zero(alg, rows, cols);
        let mut off = 0;
        for x in m.entries.iter_mut().flatten() {
            let n = x.len();
            x.copy_from_slice(&coords[off..off + n]);
            off += n;
        }
        m
    }

    /// Block matrix from a grid of blocks with the given row and column groups.
    pub fn blocks(alg: &QuiverAlgebra, row_groups: &[Vec<usize>], col_groups: &[Vec<usize>], grid: &[Vec<Option<LMat>>]) -> LMat {
        let rows: Vec<usize> = row_groups.concat();
        let cols: Vec<usize> = col_groups.concat();
        let mut out = LMat::zero(alg, &rows, &cols);
        let mut r0 = 0;
        for (bi, rg) in row_groups.iter().enumerate() {
            let mut c0 = 0;
            for (bj, cg) in col_groups.iter().enumerate() {
                if let Some(b) = &grid[bi][bj] {
                    for r in 0..rg.len() {
                        for c in 0..cg.len() {
                            out.entries[r0 + r][c0 + c] = b.entries[r][c].clone();
                        }
                    }
                }
                c0 += cg.len();
            }
            r0 += rg.len();
        }
        out
    }
}

/// A bounded complex of projectives with cohomological grading.
///
/// `terms[k]` lists the vertices of the indecomposable summands of the degree
/// `k` term and `diffs[k]` is the differential from degree `k` to `k + 1`.
/// Degrees absent from `terms` are zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProjComplex {
    pub terms: BTreeMap<i64, Vec<usize>>,
    pub diffs: BTreeMap<i64, LMat>,
}

fn empty() -> &'static [usize] {
    &[]
}

impl ProjComplex {
    pub fn zero() -> ProjComplex {
        ProjComplex { terms: BTreeMap::new(), diffs: BTreeMap::new() }
    }

    /// `P_v` in degree `deg`.
    pub fn stalk(v: usize, deg: i64) -> ProjComplex {
        ProjComplex { terms: BTreeMap::from([(deg, vec![v])]), diffs: BTreeMap::new() }
    }

    /// Drops empty terms and zero differentials between them.
    pub fn normalized(mut self) -> ProjComplex {
        self.terms.retain(|_, v| !v.is_empty());
        let terms = &self.terms;
        self.diffs.retain(|k, _| terms.contains_key(k) && terms.contains_key(&(k + 1)));
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|v| v.is_empty())
    }

    pub fn term(&self, k: i64) -> &[usize] {
        self.terms.get(&k).map_or(empty(), |v| v.as_slice())
    }

    /// The differential `d^k`, zero when not stored.
    pub fn diff(&self, alg: &QuiverAlgebra, k: i64) -> LMat {
        match self.diffs.get(&k) {
            Some(d) => d.clone(),
            None => LMat::zero(alg, self.term(k + 1), self.term(k)),
        }
    }

    /// `(min, max)` of the nonzero degrees.
    pub fn support(&self) -> Option<(i64, i64)> {
        let mut it = self.terms.iter().filter(|(_, v)| !v.is_empty()).map(|(&k, _)| k);
        let first = it.next()?;
        let last = it.next_back().unwrap_or(first);
        Some((first, last))
    }

    /// `X[s]`: degree `k` holds `X^{k+s}`, differentials negated for odd `s`.
    pub fn shift(&self, ring: Ring, s: i64) -> ProjComplex {
        let terms = self.terms.iter().map(|(&k, v)| (k - s, v.clone())).collect();
        let diffs = self
            .diffs
            .iter()
            .map(|(&k, d)| (k - s, if s.rem_euclid(2) == 1 { d.neg(ring) } else { d.clone() }))
            .collect();
        ProjComplex { terms, diffs }
    }

    pub fn check(&self, alg: &QuiverAlgebra) -> Result<()> {
        for (&k, d) in &self.diffs {
            if d.cols != self.term(k) || d.rows != self.term(k + 1) {
                return Err(Error::Shape(format!("differential in degree {k} has the wrong shape")));
            }
        }
        if let Some((lo, hi)) = self.support() {
            for k in lo..hi {
                if !self.diff(alg, k + 1).compose(alg, &self.diff(alg, k)).is_zero() {
                    return Err(Error::Invalid(format!("d∘d is nonzero in degree {k}")));
                }
            }
        }
        Ok(())
    }

    /// Direct sum with the structure maps (injections, projections).
    pub fn direct_sum(alg: &QuiverAlgebra, parts: &[&ProjComplex]) -> (ProjComplex, Vec<ChainMap>, Vec<ChainMap>) {
        let degrees: std::collections::BTreeSet<i64> = parts.iter().flat_map(|c| c.terms.keys().copied()).collect();
        let mut terms = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        for &k in &degrees {
            terms.insert(k, parts.iter().flat_map(|c| c.term(k).to_vec()).collect::<Vec<_>>());
        }
        for &k in &degrees {
            if !degrees.contains(&(k + 1)) {
                continue;
            }
            let rg: Vec<Vec<usize>> = parts.iter().map(|c| c.term(k + 1).to_vec()).collect();
            let cg: Vec<Vec<usize>> = parts.iter().map(|c| c.term(k).to_vec()).collect();
            let grid: Vec<Vec<Option<LMat>>> = (0..parts.len())
                .map(|i| (0..parts.len()).map(|j| (i == j).then(|| parts[i].diff(alg, k))).collect())
                .collect();
            diffs.insert(k, LMat::blocks(alg, &rg, &cg, &grid));
        }
        let sum = ProjComplex { terms, diffs }.normalized();
        let mut inj = Vec::new();
        let mut proj = Vec::new();
        for (i, part) in parts.iter().enumerate() {
            let mut ic = BTreeMap::new();
            let mut pc = BTreeMap::new();
            for &k in &degrees {
                let groups: Vec<Vec<usize>> = parts.iter().map(|c| c.term(k).to_vec()).collect();
                let mine = vec![part.term(k).to_vec()];
                let col: Vec<Vec<Option<LMat>>> = (0..parts.len())
                    .map(|j| vec![(j == i).then(|| LMat::identity(alg, part.term(k)))])
                    .collect();
                let row: Vec<Vec<Option<LMat>>> =
                    vec![(0..parts.len()).map(|j| (j == i).then(|| LMat::identity(alg, part.term(k)))).collect()];
                ic.insert(k, LMat::blocks(alg, &groups, &mine, &col));
                pc.insert(k, LMat::blocks(alg, &mine, &groups, &row));
            }
            inj.push(ChainMap { comps: ic });
            proj.push(ChainMap { comps: pc });
        }
        (sum, inj, proj)
    }
}

/// A degree-zero chain map, stored by its components `X^k -> Y^k`.
///
/// Missing components are zero; source and target complexes are tracked by
/// the caller.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainMap {
    pub comps: BTreeMap<i64, LMat>,
}

impl ChainMap {
    pub fn zero() -> ChainMap {
        ChainMap { comps: BTreeMap::new() }
    }

    pub fn identity(alg: &QuiverAlgebra, x: &ProjComplex) -> ChainMap {
        ChainMap { comps: x.terms.iter().map(|(&k, v)| (k, LMat::identity(alg, v))).collect() }
    }

    pub fn comp(&self, alg: &QuiverAlgebra, x: &ProjComplex, y: &ProjComplex, k: i64) -> LMat {
        match self.comps.get(&k) {
            Some(m) => m.clone(),
            None => LMat::zero(alg, y.term(k), x.term(k)),
        }
    }

    /// `self ∘ other` for `other: X -> Y`, `self: Y -> Z`.
    pub fn compose(&self, alg: &QuiverAlgebra, other: &ChainMap, x: &ProjComplex, y: &ProjComplex, z: &ProjComplex) -> ChainMap {
        let mut comps = BTreeMap::new();
        for &k in x.terms.keys() {
            if z.term(k).is_empty() {
                continue;
            }
            let m = self.comp(alg, y, z, k).compose(alg, &other.comp(alg, x, y, k));
            comps.insert(k, m);
        }
        ChainMap { comps }
    }

    pub fn add(&self, alg: &QuiverAlgebra, other: &ChainMap, x: &ProjComplex, y: &ProjComplex) -> ChainMap {
        let ring = alg.ring();
        let mut comps = BTreeMap::new();
        for &k in x.terms.keys() {
            if y.term(k).is_empty() {
                continue;
            }
            comps.insert(k, self.comp(alg, x, y, k).add(ring, &other.comp(alg, x, y, k)));
        }
        ChainMap { comps }
    }

    pub fn scale(&self, ring: Ring, s: u64) -> ChainMap {
        ChainMap { comps: self.comps.iter().map(|(&k, m)| (k, m.scale(ring, s))).collect() }
    }

    /// `f[s]: X[s] -> Y[s]`, with component `k` equal to `f^{k+s}`.
    pub fn shift(&self, s: i64) -> ChainMap {
        ChainMap { comps: self.comps.iter().map(|(&k, m)| (k - s, m.clone())).collect() }
    }

    /// Residual `d_Y f - f d_X`, zero exactly for chain maps.
    pub fn is_chain_map(&self, alg: &QuiverAlgebra, x: &ProjComplex, y: &ProjComplex) -> bool {
        let lo = x.support().map_or(0, |s| s.0) - 1;
        let hi = x.support().map_or(-1, |s| s.1);
        let ring = alg.ring();
        for k in lo..=hi {
            let a = y.diff(alg, k).compose(alg, &self.comp(alg, x, y, k));
            let b = self.comp(alg, x, y, k + 1).compose(alg, &x.diff(alg, k));
            if !a.add(ring, &b.neg(ring)).is_zero() {
                return false;
            }
        }
        true
    }
}

/// The mapping cone of `f: X -> Y` with its triangle maps.
#[derive(Debug, Clone)]
pub struct Cone {
    pub complex: ProjComplex,
    /// `Y -> C(f)`.
    pub inc: ChainMap,
    /// `C(f) -> X[1]`.
    pub proj: ChainMap,
}

/// `C^k = X^{k+1} ⊕ Y^k` with differential `[[-d_X, 0], [f, d_Y]]`.
pub fn cone(alg: &QuiverAlgebra, f: &ChainMap, x: &ProjComplex, y: &ProjComplex) -> Result<Cone> {
    if !f.is_chain_map(alg, x, y) {
        return Err(Error::NotChainMap("cone of a map that is not a chain map".into()));
    }
    let ring = alg.ring();
    let mut degrees: std::collections::BTreeSet<i64> = y.terms.keys().copied().collect();
    degrees.extend(x.terms.keys().map(|k| k - 1));
    let mut terms = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    let mut inc = BTreeMap::new();
    let mut proj = BTreeMap::new();
    for &k in &degrees {
        terms.insert(k, [x.term(k + 1), y.term(k)].concat());
    }
    for &k in &degrees {
        let rg = vec![x.term(k + 2).to_vec(), y.term(k + 1).to_vec()];
        let cg = vec![x.term(k + 1).to_vec(), y.term(k).to_vec()];
        let grid = vec![
            vec![Some(x.diff(alg, k + 1).neg(ring)), None],
            vec![Some(f.comp(alg, x, y, k + 1)), Some(y.diff(alg, k))],
        ];
        diffs.insert(k, LMat::blocks(alg, &rg, &cg, &grid));
        let yk = vec![y.term(k).to_vec()];
        let xk = vec![x.term(k + 1).to_vec()];
        inc.insert(k, LMat::blocks(alg, &cg, &yk, &[vec![None], vec![Some(LMat::identity(alg, y.term(k)))]]));
        proj.insert(k, LMat::blocks(alg, &xk, &cg, &[vec![Some(LMat::identity(alg, x.term(k + 1))), None]]));
    }
    let complex = ProjComplex { terms, diffs }.normalized();
    complex.check(alg)?;
    Ok(Cone { complex, inc: ChainMap { comps: inc }, proj: ChainMap { comps: proj } })
}
