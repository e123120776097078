use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{Ring, Subgroup};

/// An arrow `name: src -> tgt`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrow {
    pub name: String,
    pub src: String,
    pub tgt: String,
}

/// One term `coeff · path` of a relation, with the path in function order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationTerm {
    pub coeff: i64,
    pub path: String,
}

/// Input description of a bound quiver algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverSpec {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
    #[serde(default)]
    pub relations: Vec<Vec<RelationTerm>>,
    pub p: u64,
    /// `L` with `J^L ⊆ I`.
    pub path_bound: usize,
}

/// A path given by its source, target and arrows in walk order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Path {
    pub src: usize,
    pub tgt: usize,
    pub arrows: Vec<usize>,
}

/// `Λ = kQ/I` over a prime field with a reduced path basis.
///
/// Paths are stored in walk order. Relation strings are read in function
/// order, so `"cba"` applies `a` first. An element of `e_s Λ e_t` is a
/// coefficient vector over [`QuiverAlgebra::between`]`(s, t)`, the basis paths
/// walking from `s` to `t`.
#[derive(Debug, Clone)]
pub struct QuiverAlgebra {
    spec: QuiverSpec,
    ring: Ring,
    arrow_ends: Vec<(usize, usize)>,
    basis: Vec<Path>,
    /// Position of each basis path inside `between(src, tgt)`.
    slot: Vec<usize>,
    between: HashMap<(usize, usize), Vec<usize>>,
    /// `mult[(i, j)]`: walk `i` then walk `j`, as a vector over `between`.
    mult: HashMap<(usize, usize), Vec<u64>>,
}

fn vertex_index(spec: &QuiverSpec, name: &str) -> Result<usize> {
    spec.vertices
        .iter()
        .position(|v| v == name)
        .ok_or_else(|| Error::Invalid(format!("unknown vertex {name}")))
}

impl QuiverAlgebra {
    pub fn new(spec: QuiverSpec) -> Result<Self> {
        let ring = Ring::prime_field(spec.p)?;
        if spec.path_bound == 0 {
            return Err(Error::Invalid("path bound must be positive".into()));
        }
        let arrow_ends = spec
            .arrows
            .iter()
            .map(|a| Ok((vertex_index(&spec, &a.src)?, vertex_index(&spec, &a.tgt)?)))
            .collect::<Result<Vec<_>>>()?;
        let nv = spec.vertices.len();
        let bound = spec.path_bound;

        // all paths of length <= L, sorted by length then arrow sequence
        let mut all: Vec<Path> = (0..nv).map(|v| Path { src: v, tgt: v, arrows: vec![] }).collect();
        let mut frontier = all.clone();
        for _ in 0..bound {
            let mut next = Vec::new();
            for p in &frontier {
                for (a, &(s, t)) in arrow_ends.iter().enumerate() {
                    if s == p.tgt {
                        let mut arrows = p.arrows.clone();
                        arrows.push(a);
                        next.push(Path { src: p.src, tgt: t, arrows });
                    }
                }
            }
            next.sort_by(|x, y| x.arrows.cmp(&y.arrows).then(x.src.cmp(&y.src)));
            all.extend(next.iter().cloned());
            frontier = next;
        }
        let index: HashMap<Path, usize> = all.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let total = all.len();
        // column c holds path total-1-c, so pivots land on the largest path
        let col = |i: usize| total - 1 - i;

        let relations = spec
            .relations
            .iter()
            .map(|r| parse_relation(&spec, &arrow_ends, r, ring))
            .collect::<Result<Vec<_>>>()?;

        let mut gens: Vec<Vec<u64>> = Vec::new();
        for (ends, terms) in &relations {
            let (s, t) = *ends;
            for pre in all.iter().filter(|p| p.tgt == s) {
                for post in all.iter().filter(|p| p.src == t) {
                    let mut v = vec![0u64; total];
                    let mut any = false;
                    for (c, arrows) in terms {
                        let mut w = pre.arrows.clone();
                        w.extend(arrows);
                        w.extend(&post.arrows);
                        if w.len() > bound {
                            continue;
                        }
                        let key = Path { src: pre.src, tgt: post.tgt, arrows: w };
                        let i = index[&key];
                        v[col(i)] = ring.add(v[col(i)], *c);
                        any = true;
                    }
                    if any {
                        gens.push(v);
                    }
                }
            }
        }
        let ideal = Subgroup::span(ring, total, &gens);
        for (i, p) in all.iter().enumerate() {
            if p.arrows.len() == bound {
                let mut v = vec![0u64; total];
                v[col(i)] = 1;
                if !ideal.contains(&v) {
                    return Err(Error::NotFiniteDimensional(bound));
                }
            }
        }

        let pivots: Vec<usize> = ideal
            .basis()
            .iter()
            .filter_map(|r| r.iter().position(|&x| x != 0))
            .map(col)
            .collect();
        let basis: Vec<Path> = all
            .iter()
            .enumerate()
            .filter(|(i, p)| p.arrows.len() < bound && !pivots.contains(i))
            .map(|(_, p)| p.clone())
            .collect();
        let mut between: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut slot = Vec::with_capacity(basis.len());
        for (i, p) in basis.iter().enumerate() {
            let e = between.entry((p.src, p.tgt)).or_default();
            slot.push(e.len());
            e.push(i);
        }

        let mut alg = QuiverAlgebra {
            spec,
            ring,
            arrow_ends,
            basis,
            slot,
            between,
            mult: HashMap::new(),
        };
        let reduce = |w: &Path| -> Vec<u64> {
            let len = alg.between.get(&(w.src, w.tgt)).map_or(0, |v| v.len());
            let mut out = vec![0u64; len];
            if w.arrows.len() >= bound {
                return out;
            }
            let mut v = vec![0u64; total];
            v[col(index[w])] = 1;
            let r = ideal.reduce(&v);
            for (c, &x) in r.iter().enumerate() {
                if x != 0 {
                    let p = &all[total - 1 - c];
                    let b = alg.basis.iter().position(|q| q == p).expect("reduced vector lives on basis paths");
                    out[alg.slot[b]] = x;
                }
            }
            out
        };
        let mut mult = HashMap::new();
        for (i, p) in alg.basis.iter().enumerate() {
            for (j, q) in alg.basis.iter().enumerate() {
                if p.tgt == q.src {
                    let mut arrows = p.arrows.clone();
                    arrows.extend(&q.arrows);
                    mult.insert((i, j), reduce(&Path { src: p.src, tgt: q.tgt, arrows }));
                }
            }
        }
        alg.mult = mult;
        Ok(alg)
    }

    pub fn spec(&self) -> &QuiverSpec {
        &self.spec
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn num_vertices(&self) -> usize {
        self.spec.vertices.len()
    }

    pub fn vertex(&self, name: &str) -> Result<usize> {
        vertex_index(&self.spec, name)
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.spec.vertices[v]
    }

    pub fn arrow_ends(&self, a: usize) -> (usize, usize) {
        self.arrow_ends[a]
    }

    pub fn num_arrows(&self) -> usize {
        self.arrow_ends.len()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Path] {
        &self.basis
    }

    /// Basis path indices walking from `s` to `t`.
    pub fn between(&self, s: usize, t: usize) -> &[usize] {
        self.between.get(&(s, t)).map_or(&[], |v| v.as_slice())
    }

    pub fn between_dim(&self, s: usize, t: usize) -> usize {
        self.between(s, t).len()
    }

    /// Function-order name of a basis path (`e3` for a trivial path).
    pub fn path_name(&self, i: usize) -> String {
        let p = &self.basis[i];
        if p.arrows.is_empty() {
            return format!("e{}", self.spec.vertices[p.src]);
        }
        p.arrows.iter().rev().map(|&a| self.spec.arrows[a].name.as_str()).collect()
    }

    /// Product of `x ∈ e_s Λ e_m` (walked first) and `y ∈ e_m Λ e_t`.
    pub fn mul(&self, s: usize, m: usize, t: usize, x: &[u64], y: &[u64]) -> Vec<u64> {
        let ring = self.ring;
        let mut out = vec![0u64; self.between_dim(s, t)];
        for (a, &xa) in x.iter().enumerate() {
            if xa == 0 {
                continue;
            }
            let i = self.between(s, m)[a];
            for (b, &yb) in y.iter().enumerate() {
                if yb == 0 {
                    continue;
                }
                let j = self.between(m, t)[b];
                let c = ring.mul(xa, yb);
                for (o, &e) in out.iter_mut().zip(&self.mult[&(i, j)]) {
                    *o = ring.mul_add(*o, c, e);
                }
            }
        }
        out
    }

    /// The trivial path `e_v` as an element of `e_v Λ e_v`.
    pub fn unit(&self, v: usize) -> Vec<u64> {
        let mut out = vec![0u64; self.between_dim(v, v)];
        let i = self.between(v, v).iter().position(|&b| self.basis[b].arrows.is_empty()).expect("e_v is a basis path");
        out[i] = 1;
        out
    }

    /// Arrows of a function-order path string, in walk order.
    pub fn walk(&self, text: &str) -> Result<Vec<usize>> {
        let w = parse_arrows(&self.spec, text)?;
        if w.is_empty() {
            return Err(Error::Invalid(format!("empty path {text:?}")));
        }
        Ok(w)
    }

    /// Parses a function-order path string (e.g. `"a'a"`) into an element of
    /// `e_s Λ e_t` along with `(s, t)`.
    pub fn parse_path(&self, text: &str) -> Result<(usize, usize, Vec<u64>)> {
        let arrows = parse_arrows(&self.spec, text)?;
        if arrows.is_empty() {
            let v = text
                .strip_prefix('e')
                .and_then(|name| self.vertex(name).ok())
                .ok_or_else(|| Error::Invalid(format!("empty path {text:?}")))?;
            return Ok((v, v, self.unit(v)));
        }
        let (s, mut cur) = self.arrow_ends[arrows[0]];
        let mut acc = self.arrow_element(arrows[0]);
        for &a in &arrows[1..] {
            let (from, to) = self.arrow_ends[a];
            if from != cur {
                return Err(Error::Invalid(format!("path {text:?} is not composable")));
            }
            acc = self.mul(s, cur, to, &acc, &self.arrow_element(a));
            cur = to;
        }
        Ok((s, cur, acc))
    }

    pub fn arrow_element(&self, a: usize) -> Vec<u64> {
        let (s, t) = self.arrow_ends[a];
        let mut out = vec![0u64; self.between_dim(s, t)];
        if let Some(i) = self.between(s, t).iter().position(|&b| self.basis[b].arrows == [a]) {
            out[i] = 1;
        }
        out
    }
}

/// Splits a function-order string into arrows, longest names first, and
/// returns them in walk order.
fn parse_arrows(spec: &QuiverSpec, text: &str) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..spec.arrows.len()).collect();
    order.sort_by_key(|&a| std::cmp::Reverse(spec.arrows[a].name.len()));
    let mut rest = text.trim();
    let mut out = Vec::new();
    if rest.starts_with('e') && spec.arrows.iter().all(|a| !rest.starts_with(&a.name)) {
        return Ok(out);
    }
    while !rest.is_empty() {
        let a = order
            .iter()
            .copied()
            .find(|&a| rest.starts_with(&spec.arrows[a].name))
            .ok_or_else(|| Error::Invalid(format!("cannot read arrows in {text:?}")))?;
        out.push(a);
        rest = &rest[spec.arrows[a].name.len()..];
    }
    out.reverse();
    Ok(out)
}

type ParsedRelation = ((usize, usize), Vec<(u64, Vec<usize>)>);

fn parse_relation(
    spec: &QuiverSpec,
    ends: &[(usize, usize)],
    terms: &[RelationTerm],
    ring: Ring,
) -> Result<ParsedRelation> {
    let mut out = Vec::new();
    let mut endpoints = None;
    for t in terms {
        let arrows = parse_arrows(spec, &t.path)?;
        if arrows.len() < 2 {
            return Err(Error::Invalid(format!("relation path {:?} is shorter than 2", t.path)));
        }
        for w in arrows.windows(2) {
            if ends[w[0]].1 != ends[w[1]].0 {
                return Err(Error::Invalid(format!("path {:?} is not composable", t.path)));
            }
        }
        let e = (ends[arrows[0]].0, ends[*arrows.last().unwrap()].1);
        match endpoints {
            None => endpoints = Some(e),
            Some(prev) if prev != e => {
                return Err(Error::RelationNotParallel(format!("{:?} does not share endpoints", t.path)))
            }
            _ => {}
        }
        out.push((ring.reduce(t.coeff), arrows));
    }
    let endpoints = endpoints.ok_or_else(|| Error::Invalid("empty relation".into()))?;
    Ok((endpoints, out))
}
