use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactlin::{Matrix, Subgroup};

use super::{ChainMap, LMat, ProjComplex, QuiverAlgebra};

/// Chain maps `X -> Y` modulo null-homotopic maps, with a pinned basis.
///
/// Chain maps are flattened to coordinate vectors. The basis is the echelon
/// form of the chain-map space after reduction modulo the null-homotopic
/// maps, so the coordinates of a class are read off its pivot entries.
#[derive(Debug, Clone)]
pub struct HomData {
    layout: Vec<(i64, Vec<usize>, Vec<usize>)>,
    nulls: Subgroup,
    classes: Subgroup,
    width: usize,
}

fn layout(x: &ProjComplex, y: &ProjComplex) -> Vec<(i64, Vec<usize>, Vec<usize>)> {
    x.terms
        .iter()
        .filter(|(k, v)| !v.is_empty() && !y.term(**k).is_empty())
        .map(|(&k, v)| (k, y.term(k).to_vec(), v.clone()))
        .collect()
}

fn flatten(alg: &QuiverAlgebra, lay: &[(i64, Vec<usize>, Vec<usize>)], f: &ChainMap) -> Vec<u64> {
    let mut out = Vec::new();
    for (k, rows, cols) in lay {
        match f.comps.get(k) {
            Some(m) if m.rows == *rows && m.cols == *cols => out.extend(m.to_coords()),
            _ => out.extend(LMat::zero(alg, rows, cols).to_coords()),
        }
    }
    out
}

fn unflatten(alg: &QuiverAlgebra, lay: &[(i64, Vec<usize>, Vec<usize>)], v: &[u64]) -> ChainMap {
    let mut comps = BTreeMap::new();
    let mut off = 0;
    for (k, rows, cols) in lay {
        let n = LMat::zero(alg, rows, cols).coord_len();
        comps.insert(*k, LMat::from_coords(alg, rows, cols, &v[off..off + n]));
        off += n;
    }
    ChainMap { comps }
}

/// Degrees where a map `X^k -> Y^{k+shift}` can be nonzero.
fn residual_degrees(x: &ProjComplex) -> Vec<i64> {
    match x.support() {
        Some((lo, hi)) => (lo - 1..=hi).collect(),
        None => vec![],
    }
}

impl HomData {
    pub fn new(alg: &QuiverAlgebra, x: &ProjComplex, y: &ProjComplex) -> HomData {
        let ring = alg.ring();
        let lay = layout(x, y);
        let width: usize = lay.iter().map(|(_, r, c)| LMat::zero(alg, r, c).coord_len()).sum();

        // chain condition d_Y f^k - f^{k+1} d_X
        let mut eq_cols: Vec<Vec<u64>> = Vec::with_capacity(width);
        for u in 0..width {
            let mut e = vec![0u64; width];
            e[u] = 1;
            let f = unflatten(alg, &lay, &e);
            let mut res = Vec::new();
            for k in residual_degrees(x) {
                let a = y.diff(alg, k).compose(alg, &f.comp(alg, x, y, k));
                let b = f.comp(alg, x, y, k + 1).compose(alg, &x.diff(alg, k));
                res.extend(a.add(ring, &b.neg(ring)).to_coords());
            }
            eq_cols.push(res);
        }
        let eq_rows = eq_cols.first().map_or(0, |c| c.len());
        let cycles = if eq_rows == 0 {
            Subgroup::full(ring, width)
        } else {
            let m = Matrix::from_vectors(ring, eq_rows, &eq_cols).transpose();
            Subgroup::full(ring, width).kernel_within(&m).expect("shapes agree")
        };

        // null-homotopic maps d_Y h + h d_X, for h^k: X^k -> Y^{k-1}
        let hlay: Vec<(i64, Vec<usize>, Vec<usize>)> = x
            .terms
            .iter()
            .filter(|(k, v)| !v.is_empty() && !y.term(**k - 1).is_empty())
            .map(|(&k, v)| (k, y.term(k - 1).to_vec(), v.clone()))
            .collect();
        let hwidth: usize = hlay.iter().map(|(_, r, c)| LMat::zero(alg, r, c).coord_len()).sum();
        let mut nulls = Vec::with_capacity(hwidth);
        for u in 0..hwidth {
            let mut e = vec![0u64; hwidth];
            e[u] = 1;
            let h = unflatten(alg, &hlay, &e);
            let mut comps = BTreeMap::new();
            for (k, rows, cols) in &lay {
                let hk = match h.comps.get(k) {
                    Some(m) => y.diff(alg, k - 1).compose(alg, m),
                    None => LMat::zero(alg, rows, cols),
                };
                let hk1 = match h.comps.get(&(k + 1)) {
                    Some(m) => m.compose(alg, &x.diff(alg, *k)),
                    None => LMat::zero(alg, rows, cols),
                };
                comps.insert(*k, hk.add(ring, &hk1));
            }
            nulls.push(flatten(alg, &lay, &ChainMap { comps }));
        }
        let nulls = Subgroup::span(ring, width, &nulls);
        let reduced: Vec<Vec<u64>> = cycles.basis().iter().map(|z| nulls.reduce(z)).collect();
        let classes = Subgroup::span(ring, width, &reduced);
        HomData { layout: lay, nulls, classes, width }
    }

    pub fn rank(&self) -> usize {
        self.classes.basis().len()
    }

    /// Representative chain map of basis element `i`.
    pub fn basis_map(&self, alg: &QuiverAlgebra, i: usize) -> ChainMap {
        unflatten(alg, &self.layout, &self.classes.basis()[i])
    }

    /// Representative of the class with the given coordinates.
    pub fn representative(&self, alg: &QuiverAlgebra, coords: &[u64]) -> ChainMap {
        let ring = alg.ring();
        let mut v = vec![0u64; self.width];
        for (row, &c) in self.classes.basis().iter().zip(coords) {
            for (a, &b) in v.iter_mut().zip(row) {
                *a = ring.mul_add(*a, c, b);
            }
        }
        unflatten(alg, &self.layout, &v)
    }

    /// Coordinates of the homotopy class of a chain map.
    pub fn coords(&self, alg: &QuiverAlgebra, f: &ChainMap) -> Result<Vec<u64>> {
        let ring = alg.ring();
        let mut v = self.nulls.reduce(&flatten(alg, &self.layout, f));
        let mut out = Vec::with_capacity(self.rank());
        for row in self.classes.basis() {
            let p = row.iter().position(|&x| x != 0).expect("basis rows are nonzero");
            let c = ring.mul(v[p], ring.inv(row[p]).expect("field pivot"));
            for (a, &b) in v.iter_mut().zip(row) {
                *a = ring.sub(*a, ring.mul(c, b));
            }
            out.push(c);
        }
        if v.iter().any(|&x| x != 0) {
            return Err(Error::NotChainMap("components are not a chain map".into()));
        }
        Ok(out)
    }

    /// Human-readable description of each basis element.
    pub fn tags(&self, alg: &QuiverAlgebra) -> Vec<String> {
        (0..self.rank()).map(|i| describe(alg, &self.basis_map(alg, i))).collect()
    }
}

/// Nonzero entries of a chain map as `deg k (row, col): combination`.
pub fn describe(alg: &QuiverAlgebra, f: &ChainMap) -> String {
    let ring = alg.ring();
    let mut parts = Vec::new();
    for (k, m) in &f.comps {
        for (j, row) in m.entries.iter().enumerate() {
            for (i, e) in row.iter().enumerate() {
                let terms: Vec<String> = alg
                    .between(m.rows[j], m.cols[i])
                    .iter()
                    .zip(e)
                    .filter(|(_, &c)| c != 0)
                    .map(|(&b, &c)| {
                        let name = alg.path_name(b);
                        match ring.signed(c) {
                            1 => name,
                            -1 => format!("-{name}"),
                            s => format!("{s}{name}"),
                        }
                    })
                    .collect();
                if !terms.is_empty() {
                    parts.push(format!("deg {k} ({j},{i}): {}", terms.join(" + ")));
                }
            }
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("; ")
    }
}
