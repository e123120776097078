use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::angcat::{Backend, ObjRef};
use crate::error::{Error, Result};
use crate::exactlin::{enumerate_quotient, subgroup_sum, vec_add, Coset, Matrix, Subgroup};

/// Default cap on enumeration work in the non-linear fallback.
pub const DEFAULT_CAP: u128 = 10_000_000;

/// Random slices tried before the exhaustive pass.
const SAMPLE_LIMIT: u128 = 1 << 16;

/// An affine family of morphisms `src -> tgt`.
#[derive(Debug, Clone)]
pub struct Factor {
    pub src: ObjRef,
    pub tgt: ObjRef,
    pub coset: Coset,
}

struct Ctx<'a> {
    b: &'a dyn Backend,
    objs: Vec<ObjRef>,
}

impl Ctx<'_> {
    /// `g ∘ f` with `f: O_lo -> O_mid` and `g: O_mid -> O_hi`; `None` is an identity.
    fn comp(
        &self,
        g: Option<&[u64]>,
        f: Option<&[u64]>,
        lo: usize,
        mid: usize,
        hi: usize,
    ) -> Result<Vec<u64>> {
        match (g, f) {
            (None, None) => unreachable!("composite of two identities"),
            (None, Some(f)) => Ok(f.to_vec()),
            (Some(g), None) => Ok(g.to_vec()),
            (Some(g), Some(f)) => {
                let ring = self.b.ring();
                let t = self.b.compose_tensor(self.objs[lo], self.objs[mid], self.objs[hi])?;
                let mut out = vec![0; t.out];
                for (k, &gk) in g.iter().enumerate() {
                    if gk == 0 {
                        continue;
                    }
                    for (j, &fj) in f.iter().enumerate() {
                        if fj == 0 {
                            continue;
                        }
                        let s = ring.mul(gk, fj);
                        for (o, &e) in out.iter_mut().zip(t.entry(k, j)) {
                            *o = ring.mul_add(*o, s, e);
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    fn rank(&self, lo: usize, hi: usize) -> Result<usize> {
        self.b.hom_rank(self.objs[lo], self.objs[hi])
    }

    /// Product of slots `lo..hi` at the given points.
    fn product(&self, pts: &[Vec<u64>], lo: usize, hi: usize) -> Result<Option<Vec<u64>>> {
        let mut acc: Option<Vec<u64>> = None;
        for s in lo..hi {
            acc = Some(self.comp(Some(&pts[s]), acc.as_deref(), lo, s, s + 1)?);
        }
        Ok(acc)
    }

    /// Base product of slots `lo..hi` and the span of all products of those
    /// slots using at least one kernel generator.
    fn spans(
        &self,
        base: &[Vec<u64>],
        kers: &[Subgroup],
        lo: usize,
        hi: usize,
    ) -> Result<Option<(Vec<u64>, Subgroup)>> {
        if lo == hi {
            return Ok(None);
        }
        let ring = self.b.ring();
        let mut u = base[lo].clone();
        let mut f = kers[lo].clone();
        for s in lo + 1..hi {
            let mut gens = Vec::new();
            for fg in f.basis() {
                gens.push(self.comp(Some(&base[s]), Some(fg), lo, s, s + 1)?);
                for kg in kers[s].basis() {
                    gens.push(self.comp(Some(kg), Some(fg), lo, s, s + 1)?);
                }
            }
            for kg in kers[s].basis() {
                gens.push(self.comp(Some(kg), Some(&u), lo, s, s + 1)?);
            }
            u = self.comp(Some(&base[s]), Some(&u), lo, s, s + 1)?;
            f = Subgroup::span(ring, self.rank(lo, s + 1)?, &gens);
        }
        Ok(Some((u, f)))
    }
}

/// The set `{ c_k ∘ ⋯ ∘ c_1 : c_i ∈ factors[i] }` as a coset.
///
/// Factors are listed in application order. The set is `r + H` where `r` is
/// the product of representatives and `H` is spanned by products with at
/// least one factor moved into its subgroup, provided every element of `H`
/// is reached. This is decided exactly: first through the subgroup of
/// translations that fix the set, then by enumerating slices when needed.
pub fn multilinear_image(b: &dyn Backend, factors: &[Factor], cap: u128) -> Result<Coset> {
    let ring = b.ring();
    if factors.is_empty() {
        return Err(Error::Shape("empty product".into()));
    }
    for w in factors.windows(2) {
        if !b.obj_eq(w[0].tgt, w[1].src) {
            return Err(Error::Shape("factors are not composable".into()));
        }
    }
    let k = factors.len();
    let mut objs: Vec<ObjRef> = factors.iter().map(|f| f.src).collect();
    objs.push(factors[k - 1].tgt);
    let ctx = Ctx { b, objs };
    let out_rank = ctx.rank(0, k)?;
    if factors.iter().any(|f| f.coset.is_empty()) {
        return Ok(Coset::empty(ring, out_rank));
    }
    let base: Vec<Vec<u64>> =
        factors.iter().map(|f| f.coset.representative().unwrap().to_vec()).collect();
    let kers: Vec<Subgroup> = factors.iter().map(|f| f.coset.subgroup().clone()).collect();
    let (r, h) = ctx.spans(&base, &kers, 0, k)?.expect("at least one factor");

    // Translations that stabilize the set: a kernel element whose cross terms
    // with the other factors already lie in the stabilizer moves the product
    // by its base sandwich alone. Iterated to a fixpoint.
    let mut pieces = Vec::with_capacity(k);
    for i in 0..k {
        let left = ctx.spans(&base, &kers, i + 1, k)?;
        let right = ctx.spans(&base, &kers, 0, i)?;
        pieces.push(cross_terms(&ctx, &left, &right, i, k)?);
    }
    let mut stab = Subgroup::zero(ring, out_rank);
    let mut residual: Vec<Subgroup> = vec![Subgroup::zero(ring, 0); k];
    loop {
        let mut next = stab.clone();
        for (i, (cross, gens_of)) in pieces.iter().enumerate() {
            let k0 = if cross.rows() == 0 || kers[i].is_zero() {
                kers[i].clone()
            } else {
                preimage_within(&kers[i], cross, &stab, &ctx)?
            };
            let gens = k0.basis().iter().map(|x| gens_of.mul_vec(x)).collect::<Result<Vec<_>>>()?;
            next = subgroup_sum(&next, &Subgroup::span(ring, out_rank, &gens))?;
            residual[i] = k0;
        }
        if next == stab {
            break;
        }
        stab = next;
    }
    if stab == h {
        return Ok(Coset::new(r, h));
    }

    // Fallback: the set is the union of slices obtained by fixing every factor
    // but one. It equals `r + H` iff the slices cover every class of
    // `(r + H) / stab`; sampled slices usually settle this quickly, and an
    // exhaustive pass over quotient representatives decides it otherwise.
    let order = |g: &Subgroup| g.order().unwrap_or(u128::MAX);
    let class_count = order(&h) / order(&stab).max(1);
    let free = (0..k).max_by_key(|&i| order(&kers[i]) / order(&residual[i]).max(1)).unwrap();
    let mut cover = Coverage { stab: &stab, seen: HashSet::new(), slices: HashSet::new(), target: class_count, cap };
    let slice_at = |pts: &[Vec<u64>]| -> Result<Coset> {
        let rf = ctx.product(pts, 0, free)?;
        let lf = ctx.product(pts, free + 1, k)?;
        let point = sandwich_at(&ctx, lf.as_deref(), &base[free], rf.as_deref(), free, k)?;
        let gens = kers[free]
            .basis()
            .iter()
            .map(|x| sandwich_at(&ctx, lf.as_deref(), x, rf.as_deref(), free, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Coset::new(point, subgroup_sum(&Subgroup::span(ring, out_rank, &gens), &stab)?))
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0x70da);
    let budget = class_count.saturating_mul(16).saturating_add(256).min(cap).min(SAMPLE_LIMIT);
    for _ in 0..budget {
        let pts: Vec<Vec<u64>> = (0..k)
            .map(|i| {
                let mut v = base[i].clone();
                if i != free {
                    for g in kers[i].basis() {
                        let c = rng.gen_range(0..ring.modulus());
                        for (x, &y) in v.iter_mut().zip(g) {
                            *x = ring.mul_add(*x, c, y);
                        }
                    }
                }
                v
            })
            .collect();
        if cover.add(slice_at(&pts)?)? {
            return Ok(Coset::new(r, h));
        }
    }

    if class_count > cap {
        return Err(Error::TooLarge { needed: class_count, cap });
    }
    let quotients = (0..k)
        .map(|i| {
            if i == free {
                Ok(vec![vec![0; base[i].len()]])
            } else {
                enumerate_quotient(ring, kers[i].ambient(), kers[i].basis(), &residual[i], cap)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let combos = quotients.iter().try_fold(1u128, |acc, q| acc.checked_mul(q.len() as u128));
    match combos {
        Some(c) if c <= cap => {}
        _ => return Err(Error::TooLarge { needed: combos.unwrap_or(u128::MAX), cap }),
    }
    let mut idx = vec![0usize; k];
    loop {
        let pts: Vec<Vec<u64>> = (0..k).map(|i| vec_add(ring, &base[i], &quotients[i][idx[i]])).collect();
        if cover.add(slice_at(&pts)?)? {
            return Ok(Coset::new(r, h));
        }
        // mixed-radix counter
        let mut pos = 0;
        while pos < k {
            idx[pos] += 1;
            if idx[pos] < quotients[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == k {
            return Err(Error::NotCoset);
        }
    }
}

/// Classes of `(r + H) / stab` reached so far by a union of slices.
struct Coverage<'a> {
    stab: &'a Subgroup,
    seen: HashSet<Vec<u64>>,
    slices: HashSet<Coset>,
    target: u128,
    cap: u128,
}

impl Coverage<'_> {
    /// Records a slice; true once every class is covered.
    fn add(&mut self, slice: Coset) -> Result<bool> {
        if self.slices.contains(&slice) {
            return Ok(false);
        }
        let sub = slice.subgroup().order().unwrap_or(u128::MAX);
        if sub / self.stab.order().unwrap_or(u128::MAX).max(1) >= self.target {
            return Ok(true);
        }
        if self.target > self.cap {
            return Ok(false);
        }
        let ring = self.stab.ring();
        let point = slice.representative().expect("slices are nonempty").to_vec();
        let reps = enumerate_quotient(ring, point.len(), slice.subgroup().basis(), self.stab, self.cap)?;
        for q in reps {
            self.seen.insert(self.stab.reduce(&vec_add(ring, &point, &q)));
        }
        self.slices.insert(slice);
        Ok(self.seen.len() as u128 >= self.target)
    }
}

type Span = Option<(Vec<u64>, Subgroup)>;

/// Matrices of `x ↦ l ∘ x ∘ r` over all cross pairs (stacked) and of the base
/// sandwich `x ↦ l_0 ∘ x ∘ r_0`, for slot `i`.
fn cross_terms(ctx: &Ctx, left: &Span, right: &Span, i: usize, k: usize) -> Result<(Matrix, Matrix)> {
    let ring = ctx.b.ring();
    let dim = ctx.rank(i, i + 1)?;
    let out = ctx.rank(0, k)?;
    let rights: Vec<Option<Vec<u64>>> = match right {
        None => vec![None],
        Some((rb, rf)) => std::iter::once(Some(rb.clone())).chain(rf.basis().iter().cloned().map(Some)).collect(),
    };
    let lb = left.as_ref().map(|(lb, _)| lb.clone());
    let rb = right.as_ref().map(|(rb, _)| rb.clone());
    let mut conds: Vec<(Option<Vec<u64>>, Option<Vec<u64>>)> = Vec::new();
    if let Some((_, lf)) = left {
        for l in lf.basis() {
            for rr in &rights {
                conds.push((Some(l.clone()), rr.clone()));
            }
        }
    }
    if let Some((_, rf)) = right {
        for rr in rf.basis() {
            conds.push((lb.clone(), Some(rr.clone())));
        }
    }
    let mut cross = Matrix::zeros(ring, conds.len() * out, dim);
    let mut base = Matrix::zeros(ring, out, dim);
    for t in 0..dim {
        let mut e = vec![0; dim];
        e[t] = 1;
        for (c, (l, rr)) in conds.iter().enumerate() {
            for (j, v) in sandwich_at(ctx, l.as_deref(), &e, rr.as_deref(), i, k)?.into_iter().enumerate() {
                cross.set(c * out + j, t, v);
            }
        }
        for (j, v) in sandwich_at(ctx, lb.as_deref(), &e, rb.as_deref(), i, k)?.into_iter().enumerate() {
            base.set(j, t, v);
        }
    }
    Ok((cross, base))
}

/// `{x ∈ kern : every block of cross · x lies in stab}`, tested against the
/// annihilator of `stab` so the system has one column per kernel generator.
fn preimage_within(kern: &Subgroup, cross: &Matrix, stab: &Subgroup, ctx: &Ctx) -> Result<Subgroup> {
    let ring = ctx.b.ring();
    let out = stab.ambient();
    let blocks = cross.rows() / out.max(1);
    let kb = kern.basis();
    let ann = stab.annihilator();
    let tests = ann.basis();
    let images = kb.iter().map(|g| cross.mul_vec(g)).collect::<Result<Vec<_>>>()?;
    let mut m = Matrix::zeros(ring, blocks * tests.len(), kb.len());
    for blk in 0..blocks {
        for (t, a) in tests.iter().enumerate() {
            for (c, img) in images.iter().enumerate() {
                let dot = img[blk * out..(blk + 1) * out]
                    .iter()
                    .zip(a)
                    .fold(0, |acc, (&x, &y)| ring.mul_add(acc, x, y));
                m.set(blk * tests.len() + t, c, dot);
            }
        }
    }
    let sol = Subgroup::full(ring, kb.len()).kernel_within(&m)?;
    let gens: Vec<Vec<u64>> = sol
        .basis()
        .iter()
        .map(|c| {
            let mut x = vec![0; kern.ambient()];
            for (coef, g) in c.iter().zip(kb) {
                for (a, &b) in x.iter_mut().zip(g) {
                    *a = ring.mul_add(*a, *coef, b);
                }
            }
            x
        })
        .collect();
    Ok(Subgroup::span(ring, kern.ambient(), &gens))
}

/// `l ∘ x ∘ r` with `r: O_0 -> O_i`, `x: O_i -> O_{i+1}`, `l: O_{i+1} -> O_k`.
fn sandwich_at(
    ctx: &Ctx,
    l: Option<&[u64]>,
    x: &[u64],
    r: Option<&[u64]>,
    i: usize,
    k: usize,
) -> Result<Vec<u64>> {
    let xr = match r {
        None => x.to_vec(),
        Some(r) => ctx.comp(Some(x), Some(r), 0, i, i + 1)?,
    };
    match l {
        None => Ok(xr),
        Some(l) => ctx.comp(Some(l), Some(&xr), 0, i + 1, k),
    }
}
