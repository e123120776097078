use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::matrix::{axpy, vec_add, vec_neg, vec_sub};
use super::{Matrix, Ring};
use crate::error::{Error, Result};

fn leading(v: &[u64]) -> Option<usize> {
    v.iter().position(|&x| x != 0)
}

/// Howell normal form of the row span of a list of vectors of length `cols`.
///
/// Rows come out in pivot order. Each pivot divides `N`, entries above a pivot
/// lie in `[0, pivot)`, and for every column `j` the rows whose pivot is at or
/// after `j` span every span element vanishing before `j`. This makes the form
/// unique for a given span.
pub(crate) fn howell_rows(ring: Ring, cols: usize, input: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = ring.modulus();
    let mut rows: Vec<Vec<u64>> =
        input.iter().filter(|r| r.iter().any(|&x| x != 0)).cloned().collect();
    let mut top = 0;
    for col in 0..cols {
        if top >= rows.len() {
            break;
        }
        for i in top + 1..rows.len() {
            let b = rows[i][col];
            if b == 0 {
                continue;
            }
            let a = rows[top][col];
            let (g, s, t) = super::ring::xgcd(a, b);
            let (s, t) = (ring.reduce_i128(s), ring.reduce_i128(t));
            let (mb, ag) = (ring.neg(b / g), a / g);
            let (p, q) = (rows[top].clone(), rows[i].clone());
            for c in 0..cols {
                rows[top][c] = ring.add(ring.mul(s, p[c]), ring.mul(t, q[c]));
                rows[i][c] = ring.add(ring.mul(mb, p[c]), ring.mul(ag, q[c]));
            }
        }
        let a = rows[top][col];
        if a == 0 {
            if let Some(k) = (top + 1..rows.len()).find(|&k| rows[k][col] != 0) {
                rows.swap(top, k);
            } else {
                continue;
            }
        }
        let (u, d) = ring.normalizing_unit(rows[top][col]);
        for x in rows[top].iter_mut() {
            *x = ring.mul(*x, u);
        }
        let pivot_row = rows[top].clone();
        for row in rows.iter_mut().take(top) {
            let q = row[col] / d;
            if q != 0 {
                axpy(ring, row, ring.neg(q % n), &pivot_row);
            }
        }
        if d != 1 {
            let ann: Vec<u64> = pivot_row.iter().map(|&x| ring.mul(x, n / d)).collect();
            if ann.iter().any(|&x| x != 0) {
                rows.push(ann);
            }
        }
        rows.retain(|r| r.iter().any(|&x| x != 0));
        top += 1;
    }
    rows.retain(|r| r.iter().any(|&x| x != 0));
    rows.sort_by_key(|r| leading(r));
    rows
}

/// Howell normal form of the row span of `m`, with zero rows dropped.
pub fn howell_form(m: &Matrix) -> Matrix {
    let rows = howell_rows(m.ring(), m.cols(), &m.row_vecs());
    Matrix::from_vectors(m.ring(), m.cols(), &rows)
}

/// A subgroup of `(Z/N)^ambient`, stored as its Howell basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subgroup {
    ring: Ring,
    ambient: usize,
    basis: Vec<Vec<u64>>,
}

impl Subgroup {
    pub fn zero(ring: Ring, ambient: usize) -> Self {
        Subgroup { ring, ambient, basis: Vec::new() }
    }

    pub fn full(ring: Ring, ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![0; ambient];
                v[i] = 1;
                v
            })
            .collect();
        Subgroup { ring, ambient, basis }
    }

    /// Subgroup generated by arbitrary vectors.
    pub fn span(ring: Ring, ambient: usize, gens: &[Vec<u64>]) -> Self {
        debug_assert!(gens.iter().all(|g| g.len() == ambient));
        Subgroup { ring, ambient, basis: howell_rows(ring, ambient, gens) }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Canonical basis rows.
    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Reduces `v` to the canonical representative of `v + H`.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let ring = self.ring;
        let mut v = v.to_vec();
        for row in &self.basis {
            let j = leading(row).expect("basis rows are nonzero");
            let q = v[j] / row[j];
            if q != 0 {
                axpy(ring, &mut v, ring.neg(q), row);
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        v.len() == self.ambient && self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    /// Group order as the list of cyclic factor orders `N / pivot`.
    pub fn order_factors(&self) -> Vec<u64> {
        let n = self.ring.modulus();
        self.basis.iter().map(|r| n / r[leading(r).unwrap()]).collect()
    }

    /// Group order, if it fits in a `u128`.
    pub fn order(&self) -> Option<u128> {
        self.order_factors().into_iter().try_fold(1u128, |acc, f| acc.checked_mul(f as u128))
    }

    /// Rank over a field (number of basis vectors).
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn sum(&self, other: &Subgroup) -> Result<Subgroup> {
        subgroup_sum(self, other)
    }

    /// Image under `v -> m v`.
    pub fn image(&self, m: &Matrix) -> Result<Subgroup> {
        if m.cols() != self.ambient {
            return Err(Error::Shape("image under a map of the wrong width".into()));
        }
        let gens: Vec<Vec<u64>> =
            self.basis.iter().map(|b| m.mul_vec(b)).collect::<Result<_>>()?;
        Ok(Subgroup::span(self.ring, m.rows(), &gens))
    }

    /// Elements of `self` killed by `v -> m v`.
    pub fn kernel_within(&self, m: &Matrix) -> Result<Subgroup> {
        if m.cols() != self.ambient {
            return Err(Error::Shape("kernel under a map of the wrong width".into()));
        }
        if self.basis.is_empty() {
            return Ok(self.clone());
        }
        let g = Matrix::from_vectors(self.ring, self.ambient, &self.basis);
        let b = m.mul(&g.transpose())?;
        let k = kernel(&b);
        let gt = g.transpose();
        k.image(&gt)
    }

    /// Vectors orthogonal to every element, under the standard dot product.
    /// Over `Z/N` the annihilator of the annihilator is the subgroup again, so
    /// its basis rows cut the subgroup out as a kernel.
    pub fn annihilator(&self) -> Subgroup {
        if self.basis.is_empty() {
            return Subgroup::full(self.ring, self.ambient);
        }
        kernel(&Matrix::from_vectors(self.ring, self.ambient, &self.basis))
    }

    /// Elements of `self` as a list (use only for small groups).
    pub fn elements(&self, cap: u128) -> Result<Vec<Vec<u64>>> {
        enumerate_quotient(self.ring, self.ambient, &self.basis, &Subgroup::zero(self.ring, self.ambient), cap)
    }
}

/// Breadth-first enumeration of canonical representatives of `span(gens) / modulo`.
pub fn enumerate_quotient(
    ring: Ring,
    ambient: usize,
    gens: &[Vec<u64>],
    modulo: &Subgroup,
    cap: u128,
) -> Result<Vec<Vec<u64>>> {
    let start = vec![0; ambient];
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    seen.insert(start.clone());
    let mut out = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for g in gens {
            let w = modulo.reduce(&vec_add(ring, &v, g));
            if seen.insert(w.clone()) {
                if seen.len() as u128 > cap {
                    return Err(Error::TooLarge { needed: seen.len() as u128, cap });
                }
                out.push(w.clone());
                queue.push_back(w);
            }
        }
    }
    Ok(out)
}

/// `H1 + H2`.
pub fn subgroup_sum(h1: &Subgroup, h2: &Subgroup) -> Result<Subgroup> {
    if h1.ambient != h2.ambient || h1.ring != h2.ring {
        return Err(Error::Shape("subgroup sum across different ambients".into()));
    }
    let mut gens = h1.basis.clone();
    gens.extend(h2.basis.iter().cloned());
    Ok(Subgroup::span(h1.ring, h1.ambient, &gens))
}

/// Kernel of `x -> a x`.
pub fn kernel(a: &Matrix) -> Subgroup {
    let (_, k) = affine_parts(a, None).expect("kernel has no shape constraint");
    k
}

/// A coset `rep + H`, or the empty set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coset {
    rep: Option<Vec<u64>>,
    subgroup: Subgroup,
}

impl Coset {
    pub fn empty(ring: Ring, ambient: usize) -> Self {
        Coset { rep: None, subgroup: Subgroup::zero(ring, ambient) }
    }

    /// `rep + H` with the representative canonicalized.
    pub fn new(rep: Vec<u64>, subgroup: Subgroup) -> Self {
        debug_assert_eq!(rep.len(), subgroup.ambient);
        let rep = subgroup.reduce(&rep);
        Coset { rep: Some(rep), subgroup }
    }

    pub fn point(ring: Ring, v: Vec<u64>) -> Self {
        let n = v.len();
        Coset::new(v, Subgroup::zero(ring, n))
    }

    pub fn is_empty(&self) -> bool {
        self.rep.is_none()
    }

    pub fn representative(&self) -> Option<&[u64]> {
        self.rep.as_deref()
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn ring(&self) -> Ring {
        self.subgroup.ring
    }

    pub fn ambient(&self) -> usize {
        self.subgroup.ambient
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        match &self.rep {
            None => false,
            Some(r) => {
                v.len() == r.len() && self.subgroup.contains(&vec_sub(self.ring(), v, r))
            }
        }
    }

    /// `-C`.
    pub fn neg(&self) -> Coset {
        match &self.rep {
            None => self.clone(),
            Some(r) => Coset::new(vec_neg(self.ring(), r), self.subgroup.clone()),
        }
    }

    /// Minkowski sum `C1 + C2` (empty if either is empty).
    pub fn add(&self, other: &Coset) -> Result<Coset> {
        let h = subgroup_sum(&self.subgroup, &other.subgroup)?;
        Ok(match (&self.rep, &other.rep) {
            (Some(a), Some(b)) => Coset::new(vec_add(self.ring(), a, b), h),
            _ => Coset::empty(self.ring(), self.ambient()),
        })
    }

    /// Image under the linear map `v -> m v`.
    pub fn image(&self, m: &Matrix) -> Result<Coset> {
        let h = self.subgroup.image(m)?;
        Ok(match &self.rep {
            None => Coset::empty(self.ring(), m.rows()),
            Some(r) => Coset::new(m.mul_vec(r)?, h),
        })
    }

    /// Restriction to the coordinates in `idx`, in that order.
    pub fn project(&self, idx: &[usize]) -> Coset {
        let pick = |v: &Vec<u64>| idx.iter().map(|&i| v[i]).collect::<Vec<u64>>();
        let gens: Vec<Vec<u64>> = self.subgroup.basis.iter().map(pick).collect();
        let h = Subgroup::span(self.ring(), idx.len(), &gens);
        match &self.rep {
            None => Coset::empty(self.ring(), idx.len()),
            Some(r) => Coset::new(pick(r), h),
        }
    }

    /// Number of elements, if it fits.
    pub fn size(&self) -> Option<u128> {
        if self.is_empty() {
            Some(0)
        } else {
            self.subgroup.order()
        }
    }

    /// All elements (small cosets only).
    pub fn elements(&self, cap: u128) -> Result<Vec<Vec<u64>>> {
        match &self.rep {
            None => Ok(Vec::new()),
            Some(r) => Ok(self
                .subgroup
                .elements(cap)?
                .into_iter()
                .map(|h| vec_add(self.ring(), r, &h))
                .collect()),
        }
    }
}

/// Coset equality: same subgroup and representatives differing by a subgroup element.
pub fn coset_eq(c1: &Coset, c2: &Coset) -> bool {
    match (&c1.rep, &c2.rep) {
        (None, None) => c1.ambient() == c2.ambient(),
        (Some(_), Some(r2)) => c1.subgroup == c2.subgroup && c1.contains(r2),
        _ => false,
    }
}

/// Solution set of `a x = b` as a coset of `ker a`.
pub fn solve_affine(a: &Matrix, b: &[u64]) -> Result<Coset> {
    if b.len() != a.rows() {
        return Err(Error::Shape(format!(
            "right-hand side of length {} for {} equations",
            b.len(),
            a.rows()
        )));
    }
    let (sol, k) = affine_parts(a, Some(b))?;
    Ok(match sol {
        Some(x) => Coset::new(x, k),
        None => Coset { rep: None, subgroup: k },
    })
}

/// Row-reduces `[a^T | I]`; returns a particular solution of `a x = b` (when
/// asked and solvable) and `ker a`.
fn affine_parts(a: &Matrix, b: Option<&[u64]>) -> Result<(Option<Vec<u64>>, Subgroup)> {
    let ring = a.ring();
    let (m, n) = (a.rows(), a.cols());
    let width = m + n;
    let mut stacked = Vec::with_capacity(n);
    for j in 0..n {
        let mut row = vec![0; width];
        for i in 0..m {
            row[i] = a.get(i, j);
        }
        row[m + j] = 1;
        stacked.push(row);
    }
    let h = howell_rows(ring, width, &stacked);
    let kernel_rows: Vec<Vec<u64>> = h
        .iter()
        .filter(|r| leading(r).is_some_and(|j| j >= m))
        .map(|r| r[m..].to_vec())
        .collect();
    let k = Subgroup { ring, ambient: n, basis: kernel_rows };
    let sol = b.map(|b| {
        let mut v: Vec<u64> = b.iter().map(|&x| x % ring.modulus()).collect();
        v.resize(width, 0);
        let mut x = vec![0; n];
        for row in h.iter().filter(|r| leading(r).is_some_and(|j| j < m)) {
            let j = leading(row).unwrap();
            let q = v[j] / row[j];
            if q != 0 {
                axpy(ring, &mut v, ring.neg(q), row);
                axpy(ring, &mut x, q, &row[m..]);
            }
        }
        v[..m].iter().all(|&e| e == 0).then_some(x)
    });
    Ok((sol.flatten(), k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64) -> Ring {
        Ring::modular(n).unwrap()
    }

    #[test]
    fn unit_rows_normalize() {
        let m = Matrix::from_i64(z(4), &[vec![3]]).unwrap();
        assert_eq!(howell_form(&m).row_vecs(), vec![vec![1]]);
        let id = Matrix::identity(z(4), 2);
        assert_eq!(howell_form(&id), id);
    }

    #[test]
    fn annihilator_rows_appear() {
        // span{(2,2),(0,2)} over Z/4 has four elements, so the form needs (0,2)
        let m = Matrix::from_i64(z(4), &[vec![2, 2], vec![0, 2]]).unwrap();
        let h = Subgroup::span(z(4), 2, &m.row_vecs());
        assert_eq!(h.order(), Some(4));
        let mut els = h.elements(100).unwrap();
        els.sort();
        assert_eq!(els, vec![vec![0, 0], vec![0, 2], vec![2, 0], vec![2, 2]]);
        // a single row (2,1) generates an order-4 group with annihilator (0,2)
        let g = Subgroup::span(z(4), 2, &[vec![2, 1]]);
        assert_eq!(g.order(), Some(4));
        assert!(g.contains(&[0, 2]));
    }

    #[test]
    fn solve_examples() {
        let a = Matrix::from_i64(z(4), &[vec![2]]).unwrap();
        let c = solve_affine(&a, &[2]).unwrap();
        assert!(coset_eq(&c, &Coset::new(vec![1], Subgroup::span(z(4), 1, &[vec![2]]))));
        assert!(solve_affine(&a, &[1]).unwrap().is_empty());
        let f5 = Ring::prime_field(5).unwrap();
        let a = Matrix::from_i64(f5, &[vec![2]]).unwrap();
        let c = solve_affine(&a, &[3]).unwrap();
        assert_eq!(c.representative(), Some(&[4u64][..]));
        assert!(c.subgroup().is_zero());
        assert!(matches!(solve_affine(&a, &[1, 2]), Err(Error::Shape(_))));
    }

    #[test]
    fn coset_equality() {
        let h = Subgroup::span(z(4), 1, &[vec![2]]);
        let c1 = Coset::new(vec![1], h.clone());
        assert!(coset_eq(&c1, &Coset::new(vec![3], h.clone())));
        assert!(!coset_eq(&c1, &Coset::new(vec![0], h)));
        assert!(coset_eq(&Coset::empty(z(4), 1), &Coset::empty(z(4), 1)));
    }

    #[test]
    fn sums() {
        let a = Subgroup::span(z(4), 2, &[vec![2, 0]]);
        let b = Subgroup::span(z(4), 2, &[vec![0, 2]]);
        assert_eq!(subgroup_sum(&a, &b).unwrap().order(), Some(4));
        assert_eq!(subgroup_sum(&a, &Subgroup::zero(z(4), 2)).unwrap(), a);
        let c = Subgroup::span(z(4), 1, &[vec![2]]);
        assert_eq!(subgroup_sum(&c, &c).unwrap(), c);
        assert!(subgroup_sum(&a, &c).is_err());
    }

    #[test]
    fn kernel_within_subgroup() {
        let r = z(9);
        let h = Subgroup::full(r, 2);
        let m = Matrix::from_i64(r, &[vec![3, 0]]).unwrap();
        let k = h.kernel_within(&m).unwrap();
        assert_eq!(k.order(), Some(27));
        assert!(k.contains(&[3, 5]));
        assert!(!k.contains(&[1, 0]));
    }
}
