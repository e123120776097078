use std::collections::BTreeMap;
use std::sync::Arc;

use ntoda::angcat::{compose, suspend, Backend, Morphism, ObjRef};
use ntoda::exactlin::coset_eq;
use ntoda::quiverhom::{
    extend_gko, projective_resolution, ss_compare, Arrow, CTSubcat, ChainMap, LMat, ModuleMap, QuiverAlgebra,
    QuiverBackend, QuiverSpec, RelationTerm, Rep,
};
use ntoda::todabrackets::{heller_is_n_angle, toda, DiagramChain, Flavor};

fn algebra() -> Arc<QuiverAlgebra> {
    let arrow = |n: &str, s: &str, t: &str| Arrow { name: n.into(), src: s.into(), tgt: t.into() };
    let spec = QuiverSpec {
        vertices: ["1", "2", "3", "4"].map(String::from).to_vec(),
        arrows: vec![arrow("a", "1", "2"), arrow("b", "2", "3"), arrow("c", "3", "4")],
        relations: vec![vec![RelationTerm { coeff: 1, path: "cba".into() }]],
        p: 5,
        path_bound: 3,
    };
    Arc::new(QuiverAlgebra::new(spec).unwrap())
}

fn simple(alg: &QuiverAlgebra, v: usize) -> Rep {
    let mut dims = vec![0; 4];
    dims[v] = 1;
    Rep::from_i64(alg, dims, &[vec![], vec![], vec![]]).unwrap()
}

struct Gamma1 {
    b: QuiverBackend,
    p: [ObjRef; 4],
    i1: ObjRef,
    i2: ObjRef,
}

fn gamma1() -> Gamma1 {
    let alg = algebra();
    let i2 = Rep::from_i64(&alg, vec![1, 1, 0, 0], &[vec![vec![1]], vec![], vec![]]).unwrap();
    let mods = vec![
        ("P4".to_string(), Rep::projective(&alg, 3)),
        ("P3".to_string(), Rep::projective(&alg, 2)),
        ("P2".to_string(), Rep::projective(&alg, 1)),
        ("P1".to_string(), Rep::projective(&alg, 0)),
        ("I2".to_string(), i2),
        ("I1".to_string(), simple(&alg, 0)),
    ];
    let ct = CTSubcat::new(&alg, 4, mods).unwrap();
    let b = QuiverBackend::new(alg, ct);
    let o = |n: &str| b.summand(n).unwrap();
    Gamma1 { p: [o("P1"), o("P2"), o("P3"), o("P4")], i1: o("I1"), i2: o("I2"), b }
}

/// Map between stalk projectives given by a function-order path.
fn path_map(b: &QuiverBackend, x: ObjRef, y: ObjRef, text: &str) -> Morphism {
    let alg = b.algebra();
    let (s, t, e) = alg.parse_path(text).unwrap();
    let m = LMat { rows: vec![s], cols: vec![t], entries: vec![vec![e]] };
    b.morphism(x, y, &ChainMap { comps: BTreeMap::from([(0, m)]) }).unwrap()
}

/// The class of `I -> Σ²P_v` that is the identity on the last resolution term.
fn ext_class(b: &QuiverBackend, i: ObjRef, p: ObjRef) -> Morphism {
    let ci = b.complex(i).unwrap();
    let (lo, _) = ci.support().unwrap();
    let id = LMat::identity(b.algebra(), ci.term(lo));
    b.morphism(i, p.suspend(1), &ChainMap { comps: BTreeMap::from([(lo, id)]) }).unwrap()
}

fn module_map(b: &QuiverBackend, x: ObjRef, y: ObjRef, blocks: &[Vec<Vec<i64>>]) -> Morphism {
    let sx = &b.subcat().summands[x.id - 1].module;
    let sy = &b.subcat().summands[y.id - 1].module;
    let g = ModuleMap::from_i64(b.algebra(), sx, sy, blocks).unwrap();
    b.module_morphism(x, y, &g).unwrap()
}

#[test]
fn dimensions_and_projective_dimensions() {
    let g = gamma1();
    let b = &g.b;
    assert_eq!(b.algebra().dim(), 9);
    assert_eq!(b.hom_rank(g.p[1], g.p[2]).unwrap(), 0);
    assert_eq!(b.hom_rank(g.p[3], g.p[2]).unwrap(), 1);
    assert_eq!(b.hom_rank(g.i1, g.p[3].suspend(1)).unwrap(), 1);
    let pd: Vec<usize> = (0..4)
        .map(|v| projective_resolution(b.algebra(), &simple(b.algebra(), v)).unwrap().length())
        .collect();
    assert_eq!(pd, vec![2, 1, 1, 0]);
}

struct Maps {
    f1: Morphism,
    f2: Morphism,
    g1: Morphism,
    g3: Morphism,
    g4: Morphism,
}

fn maps(g: &Gamma1) -> Maps {
    let b = &g.b;
    Maps {
        f1: path_map(b, g.p[3], g.p[1], "cb"),
        f2: path_map(b, g.p[1], g.p[0], "a"),
        g1: path_map(b, g.p[3], g.p[2], "c"),
        g3: module_map(b, g.p[0], g.i2, &[vec![vec![1]], vec![vec![1]], vec![], vec![]]),
        g4: ext_class(b, g.i2, g.p[3]),
    }
}

#[test]
fn bracket_fills_the_hom_space_and_juggles() {
    let g = gamma1();
    let b = &g.b;
    let m = maps(&g);
    let sg1 = suspend(b, &m.g1, 1).unwrap();
    let g3f2 = compose(b, &m.g3, &m.f2).unwrap();
    let d = DiagramChain::new(b, vec![m.f1.clone(), g3f2, m.g4.clone(), sg1.clone()]).unwrap();
    let br = toda(b, &d, Flavor::Cc).unwrap().bracket;
    assert_eq!(br.size(), Some(5));
    let g4g3 = compose(b, &m.g4, &m.g3).unwrap();
    let d2 = DiagramChain::new(b, vec![m.f1.clone(), m.f2.clone(), g4g3, sg1]).unwrap();
    let br2 = toda(b, &d2, Flavor::Cc).unwrap().bracket;
    assert!(coset_eq(&br, &br2));
}

#[test]
fn staircase_extensions_are_certified() {
    let g = gamma1();
    let b = &g.b;
    let m = maps(&g);
    for f in [&m.f1, &m.f2, &m.g1, &m.g3, &m.g4] {
        let s = extend_gko(b, f).unwrap();
        assert!(heller_is_n_angle(b, &s).unwrap().is_yes());
    }
}

#[test]
fn filtered_bracket_has_the_opposite_sign() {
    let g = gamma1();
    let b = &g.b;
    let m = maps(&g);
    let sg1 = suspend(b, &m.g1, 1).unwrap();
    let g3f2 = compose(b, &m.g3, &m.f2).unwrap();
    let r = ss_compare(b, &[m.f1.clone(), g3f2, m.g4.clone(), sg1]).unwrap();
    assert!(r.opposite, "{r:?}");
}
