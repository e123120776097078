use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::angcat::{precompose_matrix, Backend, Morphism, ObjRef};
use crate::error::{Error, Result};
use crate::exactlin::Subgroup;

/// A seeded random chain of `len` maps through objects of `pool` whose
/// consecutive composites vanish.
///
/// Each next object is drawn among those with a nonzero hom space from the
/// current one when such objects exist, and each map is a uniform element of
/// the maps killed by the previous one.
pub fn random_zero_chain(b: &dyn Backend, pool: &[ObjRef], len: usize, seed: u64) -> Result<Vec<Morphism>> {
    if pool.is_empty() {
        return Err(Error::Shape("empty object pool".into()));
    }
    let ring = b.ring();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = *pool.choose(&mut rng).expect("pool is nonempty");
    let mut maps: Vec<Morphism> = Vec::with_capacity(len);
    for _ in 0..len {
        let mut live = Vec::new();
        for &o in pool {
            if b.hom_rank(cur, o)? > 0 {
                live.push(o);
            }
        }
        let next = *if live.is_empty() { pool.choose(&mut rng) } else { live.choose(&mut rng) }.expect("nonempty");
        let rank = b.hom_rank(cur, next)?;
        let allowed = match maps.last() {
            None => Subgroup::full(ring, rank),
            Some(prev) => Subgroup::full(ring, rank).kernel_within(&precompose_matrix(b, prev, next)?)?,
        };
        let mut v = vec![0; rank];
        for g in allowed.basis() {
            let c = rng.gen_range(0..ring.modulus());
            for (x, &y) in v.iter_mut().zip(g) {
                *x = ring.mul_add(*x, c, y);
            }
        }
        maps.push(Morphism::new(cur, next, ring, v));
        cur = next;
    }
    Ok(maps)
}
