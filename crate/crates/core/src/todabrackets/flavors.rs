use crate::angcat::{
    direct_sum, identity, rotate, trivial, Backend, BlockId, Direction, LinearSystem, Morphism, NSeq, Term,
};
use crate::error::{Error, Result};
use crate::exactlin::{Coset, Subgroup};

use super::multilinear::{multilinear_image, Factor, DEFAULT_CAP};
use super::{suspend_coset, DiagramChain, Flavor, TodaResult};

fn minus(b: &dyn Backend) -> u64 {
    b.ring().modulus() - 1
}

fn same_map(b: &dyn Backend, f: &Morphism, g: &Morphism) -> bool {
    b.obj_eq(f.src, g.src) && b.obj_eq(f.tgt, g.tgt) && f.coords == g.coords
}

/// `extend(f)` rotated right `i - 1` times, so that `f` sits at position `i`.
pub fn rotated_extension(b: &dyn Backend, f: &Morphism, i: usize) -> Result<NSeq> {
    let mut s = b.extend(f)?;
    for _ in 1..i {
        s = rotate(b, &s, Direction::Right)?;
    }
    Ok(s)
}

/// Extension of `f_i` at position `i`, enlarged by trivial summands on `X_1`
/// and `Σ^{-1}X_{n+1}` wherever they avoid positions `i` and `i + 1`.
///
/// Fiber-cofiber and intermediate brackets range over all extensions; these
/// summands realize every translate by the indeterminacy within one choice.
pub fn saturated_extension(b: &dyn Backend, d: &DiagramChain, i: usize) -> Result<NSeq> {
    let n = d.n();
    let mut s = rotated_extension(b, d.f(i), i)?;
    if i >= 2 && i + 2 <= n {
        let t = rotate(b, &trivial(b, d.x(1), n)?, Direction::Left)?;
        s = direct_sum(b, &s, &t)?;
    }
    if i >= 3 && i < n {
        s = direct_sum(b, &s, &trivial(b, d.x(n + 1).suspend(-1), n)?)?;
    }
    Ok(s)
}

fn check_position(b: &dyn Backend, s: &NSeq, d: &DiagramChain, i: usize) -> Result<()> {
    if s.n() != d.n() || !same_map(b, &s.maps[i - 1], d.f(i)) {
        return Err(Error::Shape(format!("extension does not carry f{i} at position {i}")));
    }
    Ok(())
}

/// Bracket of the given flavor using the backend's own extensions.
pub fn toda(b: &dyn Backend, d: &DiagramChain, flavor: Flavor) -> Result<TodaResult> {
    match flavor {
        Flavor::Cc => toda_cc(b, d, None),
        Flavor::Ff => toda_ff(b, d, None),
        Flavor::Fc => toda_fc(b, d, None),
        Flavor::Mid(i) => toda_mid(b, d, i, None),
    }
}

fn witness_of(sys: &LinearSystem, sol: &Coset, named: &[(String, BlockId)]) -> Vec<(String, Morphism)> {
    match sol.representative() {
        None => Vec::new(),
        Some(p) => named.iter().map(|(k, blk)| (k.clone(), sys.morphism(p, *blk))).collect(),
    }
}

/// Iterated cofiber bracket: every `ψ` completing a morphism from an
/// extension `Y` of `f_1` to the chain.
pub fn toda_cc(b: &dyn Backend, d: &DiagramChain, ext: Option<&NSeq>) -> Result<TodaResult> {
    d.require_n(b)?;
    let n = d.n();
    let y = match ext {
        Some(e) => e.clone(),
        None => b.extend(d.f(1))?,
    };
    check_position(b, &y, d, 1)?;
    let mut sys = LinearSystem::new(b);
    // phi[j] : Y_j -> X_j for j = 3..n (stored at index j)
    let mut phi: Vec<Option<BlockId>> = vec![None; n + 1];
    for j in 3..=n {
        phi[j] = Some(sys.add_unknown(y.objects[j - 1], d.x(j))?);
    }
    let psi = sys.add_unknown(y.objects[n], d.x(n + 1))?;
    let ym = |j: usize| &y.maps[j - 1];
    sys.add_equation(d.x(2), d.x(3), &[Term::plain(phi[3].unwrap()).pre(ym(2))], Some(d.f(2)))?;
    for j in 3..n {
        sys.add_equation(
            y.objects[j - 1],
            d.x(j + 1),
            &[
                Term::plain(phi[j + 1].unwrap()).pre(ym(j)),
                Term::plain(phi[j].unwrap()).post(d.f(j)).coef(minus(b)),
            ],
            None,
        )?;
    }
    sys.add_equation(
        y.objects[n - 1],
        d.x(n + 1),
        &[Term::plain(psi).pre(ym(n)), Term::plain(phi[n].unwrap()).post(d.f(n)).coef(minus(b))],
        None,
    )?;
    let sol = sys.solve()?;
    let mut named: Vec<(String, BlockId)> =
        (3..=n).map(|j| (format!("phi{j}"), phi[j].unwrap())).collect();
    named.push(("psi".into(), psi));
    Ok(TodaResult {
        flavor: Flavor::Cc,
        hom: d.target(),
        bracket: sys.project(&sol, &[psi]),
        extensions_used: vec![y],
        witness: witness_of(&sys, &sol, &named),
    })
}

/// Iterated fiber bracket: every `Σδ` for morphisms from the chain into an
/// extension `W` of `f_n` placed at position `n`.
pub fn toda_ff(b: &dyn Backend, d: &DiagramChain, ext: Option<&NSeq>) -> Result<TodaResult> {
    d.require_n(b)?;
    let n = d.n();
    let w = match ext {
        Some(e) => e.clone(),
        None => rotated_extension(b, d.f(n), n)?,
    };
    check_position(b, &w, d, n)?;
    let mut sys = LinearSystem::new(b);
    let delta = sys.add_unknown(d.x(1), w.objects[0])?;
    // gamma[j] : X_j -> W_j for j = 2..n-1
    let mut gamma: Vec<Option<BlockId>> = vec![None; n + 1];
    for j in 2..n {
        gamma[j] = Some(sys.add_unknown(d.x(j), w.objects[j - 1])?);
    }
    let wm = |j: usize| &w.maps[j - 1];
    if n == 2 {
        return Err(Error::Shape("brackets need n >= 3".into()));
    }
    sys.add_equation(
        d.x(1),
        w.objects[1],
        &[
            Term::plain(delta).post(wm(1)),
            Term::plain(gamma[2].unwrap()).pre(d.f(1)).coef(minus(b)),
        ],
        None,
    )?;
    for j in 2..n - 1 {
        sys.add_equation(
            d.x(j),
            w.objects[j],
            &[
                Term::plain(gamma[j].unwrap()).post(wm(j)),
                Term::plain(gamma[j + 1].unwrap()).pre(d.f(j)).coef(minus(b)),
            ],
            None,
        )?;
    }
    sys.add_equation(
        d.x(n - 1),
        d.x(n),
        &[Term::plain(gamma[n - 1].unwrap()).post(wm(n - 1))],
        Some(d.f(n - 1)),
    )?;
    let sol = sys.solve()?;
    let delta_set = sys.project(&sol, &[delta]);
    let bracket = suspend_coset(b, d.x(1), w.objects[0], 1, &delta_set)?;
    let mut named = vec![("delta".to_string(), delta)];
    named.extend((2..n).map(|j| (format!("gamma{j}"), gamma[j].unwrap())));
    Ok(TodaResult {
        flavor: Flavor::Ff,
        hom: d.target(),
        bracket,
        extensions_used: vec![w],
        witness: witness_of(&sys, &sol, &named),
    })
}

fn point_factor(b: &dyn Backend, f: &Morphism) -> Factor {
    Factor {
        src: f.src,
        tgt: f.tgt,
        coset: Coset::new(f.coords.clone(), Subgroup::zero(b.ring(), f.coords.len())),
    }
}

/// Solves for a full morphism of sequences `a -> c` with the component at
/// `fixed` (1-based) equal to the identity; returns the set of first components.
fn staircase_step(
    b: &dyn Backend,
    a: &NSeq,
    c: &NSeq,
    fixed: usize,
) -> Result<(Factor, Vec<Morphism>)> {
    let n = a.n();
    let mut sys = LinearSystem::new(b);
    let blocks = (0..n)
        .map(|j| sys.add_unknown(a.objects[j], c.objects[j]))
        .collect::<Result<Vec<_>>>()?;
    let id = identity(b, a.objects[fixed - 1])?;
    sys.add_equation(
        a.objects[fixed - 1],
        c.objects[fixed - 1],
        &[Term::plain(blocks[fixed - 1])],
        Some(&id),
    )?;
    for j in 0..n {
        let next = if j + 1 == n {
            Term::plain(blocks[0]).suspended(1)
        } else {
            Term::plain(blocks[j + 1])
        };
        sys.add_equation(
            a.objects[j],
            c.objects[j + 1],
            &[Term::plain(blocks[j]).post(&c.maps[j]), next.pre(&a.maps[j]).coef(minus(b))],
            None,
        )?;
    }
    let sol = sys.solve()?;
    let comps = match sol.representative() {
        Some(p) => blocks.iter().map(|&blk| sys.morphism(p, blk)).collect(),
        None => Vec::new(),
    };
    let coset = sys.project(&sol, &[blocks[0]]);
    Ok((Factor { src: a.objects[0], tgt: c.objects[0], coset }, comps))
}

/// Fiber-cofiber bracket: `Σ(β^{n-1}_1 ⋯ β^1_1)` over all staircases through
/// extensions `Z^i` of the middle maps.
pub fn toda_fc(b: &dyn Backend, d: &DiagramChain, exts: Option<&[NSeq]>) -> Result<TodaResult> {
    d.require_n(b)?;
    let n = d.n();
    let rows: Vec<NSeq> = match exts {
        Some(e) => {
            if e.len() != n - 2 {
                return Err(Error::Shape(format!("expected {} extensions", n - 2)));
            }
            e.to_vec()
        }
        None => (2..n).map(|i| saturated_extension(b, d, i)).collect::<Result<_>>()?,
    };
    for (k, z) in rows.iter().enumerate() {
        check_position(b, z, d, k + 2)?;
    }
    let z = |i: usize| &rows[i - 2];
    let mut factors = Vec::new();
    let mut witness = Vec::new();

    let mut sys = LinearSystem::new(b);
    let first = sys.add_unknown(d.x(1), z(2).objects[0])?;
    sys.add_equation(d.x(1), d.x(2), &[Term::plain(first).post(&z(2).maps[0])], Some(d.f(1)))?;
    let sol = sys.solve()?;
    witness.extend(witness_of(&sys, &sol, &[("beta1_1".into(), first)]));
    factors.push(Factor {
        src: d.x(1),
        tgt: z(2).objects[0],
        coset: sys.project(&sol, &[first]),
    });

    for i in 2..n - 1 {
        let (factor, comps) = staircase_step(b, z(i), z(i + 1), i + 1)?;
        for (j, m) in comps.into_iter().enumerate() {
            witness.push((format!("beta{i}_{}", j + 1), m));
        }
        factors.push(factor);
    }

    let zl = z(n - 1);
    let low = d.x(n + 1).suspend(-1);
    let mut sys = LinearSystem::new(b);
    let last = sys.add_unknown(zl.objects[0], low)?;
    sys.add_equation(
        d.x(n),
        d.x(n + 1),
        &[Term::plain(last).suspended(1).pre(&zl.maps[n - 1])],
        Some(d.f(n)),
    )?;
    let sol = sys.solve()?;
    witness.extend(witness_of(&sys, &sol, &[(format!("beta{}_1", n - 1), last)]));
    factors.push(Factor { src: zl.objects[0], tgt: low, coset: sys.project(&sol, &[last]) });

    let image = multilinear_image(b, &factors, DEFAULT_CAP)?;
    let bracket = suspend_coset(b, d.x(1), low, 1, &image)?;
    Ok(TodaResult { flavor: Flavor::Fc, hom: d.target(), bracket, extensions_used: rows, witness })
}

/// Intermediate bracket at position `i`: `Σ(β_1 α_1)` where `α` maps the
/// chain into an extension `Z` of `f_i` up to position `i` and `β` maps `Z`
/// back from position `i + 1` on.
pub fn toda_mid(b: &dyn Backend, d: &DiagramChain, i: usize, ext: Option<&NSeq>) -> Result<TodaResult> {
    d.require_n(b)?;
    let n = d.n();
    if i == 0 || i > n {
        return Err(Error::Shape(format!("intermediate position {i} outside 1..={n}")));
    }
    let z = match ext {
        Some(e) => e.clone(),
        None => saturated_extension(b, d, i)?,
    };
    check_position(b, &z, d, i)?;
    let zo = |j: usize| z.objects[j - 1];
    let zm = |j: usize| &z.maps[j - 1];
    let mut witness = Vec::new();

    let alpha = if i == 1 {
        point_factor(b, &identity(b, d.x(1))?)
    } else {
        let mut sys = LinearSystem::new(b);
        let blocks: Vec<BlockId> =
            (1..i).map(|j| sys.add_unknown(d.x(j), zo(j))).collect::<Result<_>>()?;
        for j in 1..i - 1 {
            sys.add_equation(
                d.x(j),
                zo(j + 1),
                &[
                    Term::plain(blocks[j - 1]).post(zm(j)),
                    Term::plain(blocks[j]).pre(d.f(j)).coef(minus(b)),
                ],
                None,
            )?;
        }
        sys.add_equation(
            d.x(i - 1),
            d.x(i),
            &[Term::plain(blocks[i - 2]).post(zm(i - 1))],
            Some(d.f(i - 1)),
        )?;
        let sol = sys.solve()?;
        let named: Vec<(String, BlockId)> =
            (1..i).map(|j| (format!("alpha{j}"), blocks[j - 1])).collect();
        witness.extend(witness_of(&sys, &sol, &named));
        Factor { src: d.x(1), tgt: zo(1), coset: sys.project(&sol, &[blocks[0]]) }
    };

    let low = d.x(n + 1).suspend(-1);
    let beta = if i == n {
        point_factor(b, &identity(b, zo(1))?)
    } else {
        let mut sys = LinearSystem::new(b);
        // beta_j : Z_j -> X_j for j = i+2..n, and beta_1 : Z_1 -> Σ^{-1}X_{n+1}
        let mut blocks: Vec<Option<BlockId>> = vec![None; n + 1];
        for j in i + 2..=n {
            blocks[j] = Some(sys.add_unknown(zo(j), d.x(j))?);
        }
        let b1 = sys.add_unknown(zo(1), low)?;
        for j in i + 1..n {
            if j == i + 1 {
                sys.add_equation(
                    zo(j),
                    d.x(j + 1),
                    &[Term::plain(blocks[j + 1].unwrap()).pre(zm(j))],
                    Some(d.f(j)),
                )?;
            } else {
                sys.add_equation(
                    zo(j),
                    d.x(j + 1),
                    &[
                        Term::plain(blocks[j + 1].unwrap()).pre(zm(j)),
                        Term::plain(blocks[j].unwrap()).post(d.f(j)).coef(minus(b)),
                    ],
                    None,
                )?;
            }
        }
        let last = Term::plain(b1).suspended(1).pre(zm(n));
        if i + 1 == n {
            sys.add_equation(zo(n), d.x(n + 1), &[last], Some(d.f(n)))?;
        } else {
            sys.add_equation(
                zo(n),
                d.x(n + 1),
                &[last, Term::plain(blocks[n].unwrap()).post(d.f(n)).coef(minus(b))],
                None,
            )?;
        }
        let sol = sys.solve()?;
        let mut named: Vec<(String, BlockId)> =
            (i + 2..=n).map(|j| (format!("beta{j}"), blocks[j].unwrap())).collect();
        named.push(("beta1".into(), b1));
        witness.extend(witness_of(&sys, &sol, &named));
        Factor { src: zo(1), tgt: low, coset: sys.project(&sol, &[b1]) }
    };

    let image = multilinear_image(b, &[alpha, beta], DEFAULT_CAP)?;
    let bracket = suspend_coset(b, d.x(1), low, 1, &image)?;
    Ok(TodaResult {
        flavor: Flavor::Mid(i),
        hom: d.target(),
        bracket,
        extensions_used: vec![z],
        witness,
    })
}
