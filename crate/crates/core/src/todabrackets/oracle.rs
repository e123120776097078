use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::angcat::{compose, identity, suspend, Backend, Morphism, NSeq, ObjRef};
use crate::error::{Error, Result};

use super::{rotated_extension, saturated_extension, DiagramChain};

/// Flavors supported by the brute-force oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleFlavor {
    Cc,
    Ff,
    Fc,
    Mid(usize),
}

struct Search<'a> {
    b: &'a dyn Backend,
    shapes: Vec<(ObjRef, ObjRef)>,
}

impl Search<'_> {
    fn run(
        &self,
        cap: u128,
        mut accept: impl FnMut(&[Morphism]) -> Result<Option<Vec<u64>>>,
    ) -> Result<BTreeSet<Vec<u64>>> {
        let ring = self.b.ring();
        let ranks = self
            .shapes
            .iter()
            .map(|&(s, t)| self.b.hom_rank(s, t))
            .collect::<Result<Vec<_>>>()?;
        let total_coords: usize = ranks.iter().sum();
        let n = ring.modulus() as u128;
        let needed = (0..total_coords).try_fold(1u128, |acc, _| acc.checked_mul(n));
        match needed {
            Some(x) if x <= cap => {}
            _ => return Err(Error::TooLarge { needed: needed.unwrap_or(u128::MAX), cap }),
        }
        let mut coords = vec![0u64; total_coords];
        let mut out = BTreeSet::new();
        loop {
            let mut off = 0;
            let maps: Vec<Morphism> = self
                .shapes
                .iter()
                .zip(&ranks)
                .map(|(&(s, t), &r)| {
                    let m = Morphism::new(s, t, ring, coords[off..off + r].to_vec());
                    off += r;
                    m
                })
                .collect();
            if let Some(v) = accept(&maps)? {
                out.insert(v);
            }
            let mut pos = 0;
            while pos < total_coords {
                coords[pos] += 1;
                if coords[pos] < ring.modulus() {
                    break;
                }
                coords[pos] = 0;
                pos += 1;
            }
            if pos == total_coords {
                break;
            }
        }
        Ok(out)
    }
}

fn eq(b: &dyn Backend, lhs: &Morphism, rhs: &Morphism) -> bool {
    lhs.coords == rhs.coords && b.obj_eq(lhs.src, rhs.src) && b.obj_eq(lhs.tgt, rhs.tgt)
}

/// Every bracket element of the chain, by exhaustive enumeration of fill-ins
/// against the backend's own extensions. Fails when the search space exceeds `cap`.
pub fn oracle_bracket(
    b: &dyn Backend,
    d: &DiagramChain,
    flavor: OracleFlavor,
    cap: u128,
) -> Result<BTreeSet<Vec<u64>>> {
    d.require_n(b)?;
    let n = d.n();
    let c = |g: &Morphism, f: &Morphism| compose(b, g, f);
    match flavor {
        OracleFlavor::Cc => {
            let y = b.extend(d.f(1))?;
            cc_search(b, d, &y, cap)
        }
        OracleFlavor::Ff => {
            let w = rotated_extension(b, d.f(n), n)?;
            let mut shapes = vec![(d.x(1), w.objects[0])];
            shapes.extend((2..n).map(|j| (d.x(j), w.objects[j - 1])));
            Search { b, shapes }.run(cap, |m| {
                let delta = &m[0];
                let gamma = |j: usize| &m[j - 1];
                let wm = |j: usize| &w.maps[j - 1];
                if !eq(b, &c(wm(1), delta)?, &c(gamma(2), d.f(1))?) {
                    return Ok(None);
                }
                for j in 2..n - 1 {
                    if !eq(b, &c(wm(j), gamma(j))?, &c(gamma(j + 1), d.f(j))?) {
                        return Ok(None);
                    }
                }
                if !eq(b, &c(wm(n - 1), gamma(n - 1))?, d.f(n - 1)) {
                    return Ok(None);
                }
                Ok(Some(suspend(b, delta, 1)?.coords))
            })
        }
        OracleFlavor::Fc => {
            let rows: Vec<NSeq> =
                (2..n).map(|i| saturated_extension(b, d, i)).collect::<Result<_>>()?;
            let z = |i: usize| &rows[i - 2];
            let low = d.x(n + 1).suspend(-1);
            // the rows constrain disjoint unknowns, so each factor is enumerated alone
            let mut stages = Vec::new();
            let first = Search { b, shapes: vec![(d.x(1), z(2).objects[0])] }.run(cap, |m| {
                Ok(eq(b, &c(&z(2).maps[0], &m[0])?, d.f(1)).then(|| m[0].coords.clone()))
            })?;
            stages.push((d.x(1), z(2).objects[0], first));
            for i in 2..n - 1 {
                let (a, t) = (z(i), z(i + 1));
                let shapes = (0..n).filter(|&j| j != i).map(|j| (a.objects[j], t.objects[j])).collect();
                let id = identity(b, a.objects[i])?;
                let set = Search { b, shapes }.run(cap, |m| {
                    let mut comps: Vec<Morphism> = m.to_vec();
                    comps.insert(i, id.clone());
                    for j in 0..n {
                        let next = if j + 1 == n { suspend(b, &comps[0], 1)? } else { comps[j + 1].clone() };
                        if !eq(b, &c(&t.maps[j], &comps[j])?, &c(&next, &a.maps[j])?) {
                            return Ok(None);
                        }
                    }
                    Ok(Some(comps[0].coords.clone()))
                })?;
                stages.push((a.objects[0], t.objects[0], set));
            }
            let zl = z(n - 1);
            let last = Search { b, shapes: vec![(zl.objects[0], low)] }.run(cap, |m| {
                Ok(eq(b, &c(&suspend(b, &m[0], 1)?, &zl.maps[n - 1])?, d.f(n)).then(|| m[0].coords.clone()))
            })?;
            stages.push((zl.objects[0], low, last));
            let prod = products(b, &stages, cap)?;
            suspended(b, d.x(1), low, prod)
        }
        OracleFlavor::Mid(i) => {
            if i == 0 || i > n {
                return Err(Error::Shape(format!("intermediate position {i} outside 1..={n}")));
            }
            let z = saturated_extension(b, d, i)?;
            let zo = |j: usize| z.objects[j - 1];
            let zm = |j: usize| &z.maps[j - 1];
            let low = d.x(n + 1).suspend(-1);
            let alphas = if i == 1 {
                BTreeSet::from([identity(b, d.x(1))?.coords])
            } else {
                let shapes = (1..i).map(|j| (d.x(j), zo(j))).collect();
                Search { b, shapes }.run(cap, |m| {
                    let alpha = |j: usize| if j == i { identity(b, d.x(i)) } else { Ok(m[j - 1].clone()) };
                    for j in 1..i {
                        if !eq(b, &c(zm(j), &alpha(j)?)?, &c(&alpha(j + 1)?, d.f(j))?) {
                            return Ok(None);
                        }
                    }
                    Ok(Some(m[0].coords.clone()))
                })?
            };
            let betas = if i == n {
                BTreeSet::from([identity(b, zo(1))?.coords])
            } else {
                // beta_{i+2}..beta_n, then beta_1
                let mut shapes: Vec<(ObjRef, ObjRef)> = (i + 2..=n).map(|j| (zo(j), d.x(j))).collect();
                shapes.push((zo(1), low));
                Search { b, shapes }.run(cap, |m| {
                    let beta = |j: usize| {
                        if j == i + 1 { identity(b, d.x(i + 1)) } else { Ok(m[j - (i + 2)].clone()) }
                    };
                    let beta1 = m.last().unwrap();
                    for j in i + 1..n {
                        if !eq(b, &c(&beta(j + 1)?, zm(j))?, &c(d.f(j), &beta(j)?)?) {
                            return Ok(None);
                        }
                    }
                    if !eq(b, &c(&suspend(b, beta1, 1)?, zm(n))?, &c(d.f(n), &beta(n)?)?) {
                        return Ok(None);
                    }
                    Ok(Some(beta1.coords.clone()))
                })?
            };
            let stages = vec![(d.x(1), zo(1), alphas), (zo(1), low, betas)];
            let prod = products(b, &stages, cap)?;
            suspended(b, d.x(1), low, prod)
        }
    }
}

/// Every iterated cofiber bracket element against a given extension `y` of `f_1`.
pub fn oracle_cc_with(b: &dyn Backend, d: &DiagramChain, y: &NSeq, cap: u128) -> Result<BTreeSet<Vec<u64>>> {
    d.require_n(b)?;
    if y.n() != d.n() || !eq(b, &y.maps[0], d.f(1)) {
        return Err(Error::Shape("the extension does not start with f_1".into()));
    }
    cc_search(b, d, y, cap)
}

fn cc_search(b: &dyn Backend, d: &DiagramChain, y: &NSeq, cap: u128) -> Result<BTreeSet<Vec<u64>>> {
    let n = d.n();
    let c = |g: &Morphism, f: &Morphism| compose(b, g, f);
    let mut shapes: Vec<(ObjRef, ObjRef)> = (3..=n).map(|j| (y.objects[j - 1], d.x(j))).collect();
    shapes.push((y.objects[n], d.x(n + 1)));
    Search { b, shapes }.run(cap, |m| {
        let phi = |j: usize| &m[j - 3];
        let psi = &m[n - 2];
        let ym = |j: usize| &y.maps[j - 1];
        if !eq(b, &c(phi(3), ym(2))?, d.f(2)) {
            return Ok(None);
        }
        for j in 3..n {
            if !eq(b, &c(phi(j + 1), ym(j))?, &c(d.f(j), phi(j))?) {
                return Ok(None);
            }
        }
        if !eq(b, &c(psi, ym(n))?, &c(d.f(n), phi(n))?) {
            return Ok(None);
        }
        Ok(Some(psi.coords.clone()))
    })
}

type Stage = (ObjRef, ObjRef, BTreeSet<Vec<u64>>);

/// All composites `c_k ∘ ⋯ ∘ c_1` with `c_i` drawn from stage `i`.
fn products(b: &dyn Backend, stages: &[Stage], cap: u128) -> Result<BTreeSet<Vec<u64>>> {
    let ring = b.ring();
    let (src, _, first) = &stages[0];
    let mut acc = first.clone();
    for w in stages.windows(2) {
        let (_, mid, _) = &w[0];
        let (_, tgt, next) = &w[1];
        let needed = acc.len() as u128 * next.len() as u128;
        if needed > cap {
            return Err(Error::TooLarge { needed, cap });
        }
        let mut out = BTreeSet::new();
        for f in &acc {
            let f = Morphism::new(*src, *mid, ring, f.clone());
            for g in next {
                let g = Morphism::new(*mid, *tgt, ring, g.clone());
                out.insert(compose(b, &g, &f)?.coords);
            }
        }
        acc = out;
    }
    Ok(acc)
}

fn suspended(b: &dyn Backend, x: ObjRef, y: ObjRef, set: BTreeSet<Vec<u64>>) -> Result<BTreeSet<Vec<u64>>> {
    let ring = b.ring();
    set.into_iter().map(|v| Ok(suspend(b, &Morphism::new(x, y, ring, v), 1)?.coords)).collect()
}
