use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ntoda::angcat::{postcompose_matrix, precompose_matrix, Backend, Morphism, ObjRef};
use ntoda::exactlin::{Matrix, Subgroup};
use ntoda::freelocal::FreeLocal;
use ntoda::todabrackets::{juggling_law, Flavor, JugglingLaw};

fn pick(rng: &mut ChaCha8Rng, b: &dyn Backend, s: &Subgroup) -> Vec<u64> {
    let ring = b.ring();
    let mut v = vec![0; s.ambient()];
    for g in s.basis() {
        let c = rng.gen_range(0..ring.modulus());
        for (x, &y) in v.iter_mut().zip(g) {
            *x = ring.mul_add(*x, c, y);
        }
    }
    v
}

/// Maps `X_{j} -> X_{j+1}` killed by the previous map and, optionally, by the next one.
fn admissible(b: &dyn Backend, src: ObjRef, tgt: ObjRef, prev: Option<&Morphism>, next: Option<&Morphism>) -> Subgroup {
    let ring = b.ring();
    let rank = b.hom_rank(src, tgt).unwrap();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    if let Some(p) = prev {
        rows.extend(precompose_matrix(b, p, tgt).unwrap().row_vecs());
    }
    if let Some(q) = next {
        rows.extend(postcompose_matrix(b, q, src).unwrap().row_vecs());
    }
    let full = Subgroup::full(ring, rank);
    if rows.is_empty() {
        return full;
    }
    full.kernel_within(&Matrix::from_vectors(ring, rank, &rows)).unwrap()
}

fn random_chain(fl: &FreeLocal, seed: u64, len: usize) -> Vec<Morphism> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objs: Vec<ObjRef> = (0..=len).map(|_| fl.obj(rng.gen_range(1..=3))).collect();
    let mut maps: Vec<Morphism> = Vec::new();
    for j in 0..len {
        let s = admissible(fl, objs[j], objs[j + 1], maps.last(), None);
        let c = pick(&mut rng, fl, &s);
        maps.push(Morphism::new(objs[j], objs[j + 1], fl.ring(), c));
    }
    maps
}

fn check(fl: &FreeLocal, maps: &[Morphism], law: JugglingLaw, flavor: Flavor) {
    let r = juggling_law(fl, maps, &law, flavor).unwrap();
    assert!(r.holds, "{law:?} {flavor}: {} / {:?} vs {:?}", r.note, r.lhs, r.rhs);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn subgroup_law_and_coincidence(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3])) {
        let fl = FreeLocal::new(p).unwrap();
        let maps = random_chain(&fl, seed, 4);
        check(&fl, &maps, JugglingLaw::SubgroupLaw, Flavor::Cc);
        check(&fl, &maps, JugglingLaw::Coincidence, Flavor::Cc);
        check(&fl, &maps, JugglingLaw::ZeroMembership, Flavor::Cc);
    }

    #[test]
    fn signs_and_additivity(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3])) {
        let fl = FreeLocal::new(p).unwrap();
        let maps = random_chain(&fl, seed, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for i in 1..=4 {
            check(&fl, &maps, JugglingLaw::Negation { i }, Flavor::Cc);
        }
        check(&fl, &maps, JugglingLaw::TwoSigns { j: 1, k: 3 }, Flavor::Ff);
        for i in 2..=3 {
            let s = admissible(&fl, maps[i - 1].src, maps[i - 1].tgt, Some(&maps[i - 2]), Some(&maps[i]));
            let other = Morphism::new(maps[i - 1].src, maps[i - 1].tgt, fl.ring(), pick(&mut rng, &fl, &s));
            check(&fl, &maps, JugglingLaw::Additivity { i, other }, Flavor::Cc);
        }
    }

    #[test]
    fn five_term_laws(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3])) {
        let fl = FreeLocal::new(p).unwrap();
        let maps = random_chain(&fl, seed, 5);
        check(&fl, &maps, JugglingLaw::Shift { i: 3 }, Flavor::Cc);
        check(&fl, &maps, JugglingLaw::PostPre, Flavor::Cc);
        check(&fl, &maps, JugglingLaw::PostInclusion, Flavor::Cc);
        check(&fl, &maps, JugglingLaw::PreInclusion, Flavor::Cc);
        check(&fl, &maps, JugglingLaw::LowShift, Flavor::Cc);
        check(&fl, &maps, JugglingLaw::HighShift, Flavor::Cc);
    }
}
