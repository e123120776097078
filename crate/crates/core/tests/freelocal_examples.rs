use ntoda::angcat::{Backend, Morphism};
use ntoda::exactlin::{coset_eq, Coset, Subgroup};
use ntoda::freelocal::FreeLocal;
use ntoda::todabrackets::{
    heller_is_n_angle, oracle_bracket, toda, yoneda_exact, DiagramChain, Flavor, HellerVerdict,
    OracleFlavor, DEFAULT_CAP,
};

fn chain(fl: &FreeLocal, scalars: [i64; 4]) -> DiagramChain {
    let maps: Vec<Morphism> = scalars.iter().map(|&x| fl.scalar(x)).collect();
    DiagramChain::new(fl, maps).unwrap()
}

fn flavors() -> Vec<Flavor> {
    vec![Flavor::Cc, Flavor::Ff, Flavor::Fc, Flavor::Mid(1), Flavor::Mid(2), Flavor::Mid(3), Flavor::Mid(4)]
}

fn coset_of(fl: &FreeLocal, rep: i64, gen: i64) -> Coset {
    let ring = fl.ring();
    let sub = Subgroup::span(ring, 1, &[vec![ring.reduce(gen)]]);
    Coset::new(vec![ring.reduce(rep)], sub)
}

#[test]
fn all_p_chain_is_one_plus_p() {
    for p in [2u64, 3, 5] {
        let fl = FreeLocal::new(p).unwrap();
        let d = chain(&fl, [p as i64; 4]);
        let expected = coset_of(&fl, 1, p as i64);
        for f in flavors() {
            let r = toda(&fl, &d, f).unwrap();
            assert!(coset_eq(&r.bracket, &expected), "p={p} {f}: {:?}", r.bracket);
        }
    }
}

#[test]
fn negated_first_map_flips_the_bracket() {
    for p in [3u64, 5] {
        let fl = FreeLocal::new(p).unwrap();
        let pi = p as i64;
        let d = chain(&fl, [pi, pi, pi, -pi]);
        let expected = coset_of(&fl, -1, pi);
        for f in flavors() {
            let r = toda(&fl, &d, f).unwrap();
            assert!(coset_eq(&r.bracket, &expected), "p={p} {f}");
        }
        let s = fl.extend(&fl.scalar(pi)).unwrap();
        let mut maps = s.maps.clone();
        maps[3] = maps[3].neg();
        let seq = ntoda::angcat::NSeq::new(&fl, maps).unwrap();
        assert!(yoneda_exact(&fl, &seq).unwrap());
        assert_eq!(heller_is_n_angle(&fl, &seq).unwrap(), HellerVerdict::IdentityNotInBracket);
        assert!(heller_is_n_angle(&fl, &s).unwrap().is_yes());
    }
}

#[test]
fn nonzero_composite_separates_cc_from_ff() {
    let fl = FreeLocal::new(2).unwrap();
    // application order f1 = 1, f2 = 0, f3 = 1, f4 = 1
    let d = chain(&fl, [1, 0, 1, 1]);
    let cc = toda(&fl, &d, Flavor::Cc).unwrap().bracket;
    assert_eq!(cc.size(), Some(4));
    assert!(toda(&fl, &d, Flavor::Ff).unwrap().bracket.is_empty());
    assert!(toda(&fl, &d, Flavor::Fc).unwrap().bracket.is_empty());
}

#[test]
fn zero_chain_gives_zero() {
    let fl = FreeLocal::new(2).unwrap();
    let d = chain(&fl, [0, 0, 0, 0]);
    for f in flavors() {
        let r = toda(&fl, &d, f).unwrap().bracket;
        assert!(coset_eq(&r, &coset_of(&fl, 0, 0)), "{f}");
    }
}

#[test]
fn library_oracle_agrees_on_rank_one_chains() {
    let fl = FreeLocal::new(2).unwrap();
    for code in 0..256u32 {
        let s = [0, 2, 4, 6].map(|sh| ((code >> sh) & 3) as i64);
        let d = chain(&fl, s);
        for (f, o) in [
            (Flavor::Cc, OracleFlavor::Cc),
            (Flavor::Ff, OracleFlavor::Ff),
            (Flavor::Fc, OracleFlavor::Fc),
            (Flavor::Mid(2), OracleFlavor::Mid(2)),
        ] {
            let solver = toda(&fl, &d, f).unwrap().bracket;
            let brute = oracle_bracket(&fl, &d, o, DEFAULT_CAP).unwrap();
            let listed: std::collections::BTreeSet<Vec<u64>> =
                solver.elements(1 << 20).unwrap().into_iter().collect();
            assert_eq!(listed, brute, "chain {s:?} flavor {f}");
        }
    }
}
