use std::collections::BTreeSet;

use ntoda::exactlin::{
    coset_eq, howell_form, solve_affine, subgroup_sum, Matrix, Ring, Subgroup,
};
use proptest::prelude::*;

/// All Z/N-combinations of the rows, by brute force.
fn brute_span(n: u64, cols: usize, rows: &[Vec<u64>]) -> BTreeSet<Vec<u64>> {
    let mut acc: BTreeSet<Vec<u64>> = BTreeSet::from([vec![0; cols]]);
    for r in rows {
        let mut next = BTreeSet::new();
        for v in &acc {
            for c in 0..n {
                next.insert(v.iter().zip(r).map(|(&a, &b)| (a + c * b) % n).collect());
            }
        }
        acc = next;
    }
    acc
}

fn all_vectors(n: u64, len: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..n).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn matrix_strategy() -> impl Strategy<Value = (u64, usize, usize, Vec<u64>)> {
    (prop_oneof![Just(4u64), Just(9u64)], 1usize..=3, 1usize..=3).prop_flat_map(|(n, r, c)| {
        (Just(n), Just(r), Just(c), proptest::collection::vec(0..n, r * c))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn annihilator_is_orthogonal_complement_and_involutive((n, r, c, data) in matrix_strategy()) {
        let ring = Ring::modular(n).unwrap();
        let m = Matrix::from_rows(ring, r, c, data).unwrap();
        let s = Subgroup::span(ring, c, &m.row_vecs());
        let ann = s.annihilator();
        let members = brute_span(n, c, &m.row_vecs());
        let dot = |x: &[u64], y: &[u64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<u64>() % n;
        let expected: BTreeSet<Vec<u64>> =
            all_vectors(n, c).into_iter().filter(|y| members.iter().all(|x| dot(x, y) == 0)).collect();
        prop_assert_eq!(brute_span(n, c, ann.basis()), expected);
        prop_assert_eq!(ann.annihilator(), s);
    }

    #[test]
    fn howell_preserves_span_and_is_idempotent((n, r, c, data) in matrix_strategy()) {
        let ring = Ring::modular(n).unwrap();
        let m = Matrix::from_rows(ring, r, c, data).unwrap();
        let h = howell_form(&m);
        prop_assert_eq!(brute_span(n, c, &m.row_vecs()), brute_span(n, c, &h.row_vecs()));
        prop_assert_eq!(howell_form(&h), h.clone());
        // the subgroup order read off the pivots matches the enumeration
        let s = Subgroup::span(ring, c, &m.row_vecs());
        prop_assert_eq!(s.order().unwrap(), brute_span(n, c, &m.row_vecs()).len() as u128);
    }

    #[test]
    fn howell_is_canonical((n, r, c, data) in matrix_strategy(), perm_seed in 0usize..6) {
        let ring = Ring::modular(n).unwrap();
        let m = Matrix::from_rows(ring, r, c, data).unwrap();
        let mut rows = m.row_vecs();
        rows.rotate_left(perm_seed % r);
        // add a redundant combination of the rows
        let extra: Vec<u64> = (0..c).map(|j| rows.iter().map(|row| row[j]).sum::<u64>() % n).collect();
        rows.push(extra);
        let m2 = Matrix::from_vectors(ring, c, &rows);
        prop_assert_eq!(howell_form(&m), howell_form(&m2));
    }

    #[test]
    fn solve_affine_matches_enumeration((n, r, c, data) in matrix_strategy(), b in proptest::collection::vec(0u64..9, 3)) {
        let ring = Ring::modular(n).unwrap();
        let a = Matrix::from_rows(ring, r, c, data).unwrap();
        let b: Vec<u64> = b[..r].iter().map(|x| x % n).collect();
        let sol = solve_affine(&a, &b).unwrap();
        let mut count = 0u128;
        for x in all_vectors(n, c) {
            let hit = a.mul_vec(&x).unwrap() == b;
            prop_assert_eq!(hit, sol.contains(&x));
            count += hit as u128;
        }
        prop_assert_eq!(sol.size().unwrap(), count);
    }

    #[test]
    fn subgroup_sum_laws((n, r, c, data) in matrix_strategy(), data2 in proptest::collection::vec(0u64..9, 9)) {
        let ring = Ring::modular(n).unwrap();
        let m = Matrix::from_rows(ring, r, c, data).unwrap();
        let rows2: Vec<Vec<u64>> = (0..2).map(|i| (0..c).map(|j| data2[i * 3 + j] % n).collect()).collect();
        let h1 = Subgroup::span(ring, c, &m.row_vecs());
        let h2 = Subgroup::span(ring, c, &rows2);
        let s12 = subgroup_sum(&h1, &h2).unwrap();
        prop_assert_eq!(&s12, &subgroup_sum(&h2, &h1).unwrap());
        prop_assert_eq!(&subgroup_sum(&s12, &h1).unwrap(), &s12);
        let brute: BTreeSet<Vec<u64>> = {
            let a = brute_span(n, c, &m.row_vecs());
            let b = brute_span(n, c, &rows2);
            a.iter().flat_map(|x| b.iter().map(move |y| x.iter().zip(y).map(|(&p, &q)| (p + q) % n).collect())).collect()
        };
        prop_assert_eq!(s12.order().unwrap(), brute.len() as u128);
        for v in &brute {
            prop_assert!(s12.contains(v));
        }
    }

    #[test]
    fn coset_equality_is_setwise((n, r, c, data) in matrix_strategy(), shift in proptest::collection::vec(0u64..9, 3)) {
        let ring = Ring::modular(n).unwrap();
        let m = Matrix::from_rows(ring, r, c, data).unwrap();
        let h = Subgroup::span(ring, c, &m.row_vecs());
        let v: Vec<u64> = shift[..c].iter().map(|x| x % n).collect();
        let c1 = ntoda::exactlin::Coset::new(v.clone(), h.clone());
        for w in brute_span(n, c, &m.row_vecs()) {
            let moved: Vec<u64> = v.iter().zip(&w).map(|(&a, &b)| (a + b) % n).collect();
            let c2 = ntoda::exactlin::Coset::new(moved, h.clone());
            prop_assert!(coset_eq(&c1, &c2));
            prop_assert_eq!(c1.representative(), c2.representative());
        }
    }
}

#[test]
fn two_generator_span_over_z4_has_four_elements() {
    let ring = Ring::modular(4).unwrap();
    let m = Matrix::from_i64(ring, &[vec![2, 2], vec![0, 2]]).unwrap();
    let h = howell_form(&m);
    let span = brute_span(4, 2, &h.row_vecs());
    let expected: BTreeSet<Vec<u64>> =
        [vec![0, 0], vec![2, 2], vec![0, 2], vec![2, 0]].into_iter().collect();
    assert_eq!(span, expected);
}
