use serde::{Deserialize, Serialize};

use crate::angcat::{compose, postcompose_matrix, precompose_matrix, suspend, Backend, Morphism};
use crate::error::{Error, Result};
use crate::exactlin::{coset_eq, Coset};

use super::{
    indeterminacy, require_zero_composites, toda, toda_cc, toda_fc, toda_ff, DiagramChain, Flavor,
};

/// Structural identities relating brackets of related chains.
///
/// Variants taking an `(n+1)`-chain are marked; all others take an `n`-chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JugglingLaw {
    /// If some `f_i = 0` and the bracket is nonempty, it contains `0`.
    ZeroMembership,
    /// Every flavor is a coset of the indeterminacy subgroup.
    SubgroupLaw,
    /// All flavors, including every intermediate position, agree.
    Coincidence,
    /// The fiber-cofiber bracket lies in both iterated brackets.
    FcInclusion,
    /// `⟨…, f_i + g, …⟩ = ⟨…, f_i, …⟩ + ⟨…, g, …⟩` for `2 <= i <= n-1`.
    Additivity { i: usize, other: Morphism },
    /// `⟨…, -f_i, …⟩ = -⟨…, f_i, …⟩`.
    Negation { i: usize },
    /// Negating two of the maps leaves the bracket unchanged.
    TwoSigns { j: usize, k: usize },
    /// `(n+1)`-chain: `f_{n+1}⟨f_n, …, f_1⟩ ⊆ ⟨f_{n+1}f_n, …, f_1⟩`.
    PostInclusion,
    /// `(n+1)`-chain: `⟨f_{n+1}, …, f_2⟩Σf_1 ⊆ ⟨f_{n+1}, …, f_2f_1⟩`.
    PreInclusion,
    /// `(n+1)`-chain: `⟨…, f_3, f_2f_1⟩ ⊆ ⟨…, f_3f_2, f_1⟩`.
    LowShift,
    /// `(n+1)`-chain: `⟨f_{n+1}f_n, f_{n-1}, …⟩ ⊆ ⟨f_{n+1}, f_nf_{n-1}, …⟩`.
    HighShift,
    /// `(n+1)`-chain, `3 <= i <= n-1`:
    /// `⟨…, f_{i+1}f_i, f_{i-1}, …⟩ = ⟨…, f_{i+1}, f_if_{i-1}, …⟩`.
    Shift { i: usize },
    /// `(n+1)`-chain: `f_{n+1}⟨f_n, …, f_1⟩ = ⟨f_{n+1}, …, f_2⟩ (-1)^n Σf_1`.
    PostPre,
}

/// Verdict for one law, with both sides.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LawReport {
    pub law: String,
    pub holds: bool,
    /// `"equal"` or `"subset"`.
    pub relation: String,
    pub lhs: Coset,
    pub rhs: Coset,
    pub note: String,
}

fn subset(a: &Coset, b: &Coset) -> bool {
    match a.representative() {
        None => true,
        Some(r) => b.contains(r) && a.subgroup().is_subgroup_of(b.subgroup()),
    }
}

fn report(law: &str, relation: &str, lhs: Coset, rhs: Coset, note: String) -> LawReport {
    let holds = if relation == "equal" { coset_eq(&lhs, &rhs) } else { subset(&lhs, &rhs) };
    LawReport { law: law.into(), holds, relation: relation.into(), lhs, rhs, note }
}

fn bracket(b: &dyn Backend, maps: Vec<Morphism>, flavor: Flavor) -> Result<Coset> {
    let d = DiagramChain::new(b, maps)?;
    Ok(toda(b, &d, flavor)?.bracket)
}

fn all_flavors(n: usize) -> Vec<Flavor> {
    let mut v = vec![Flavor::Cc, Flavor::Ff, Flavor::Fc];
    v.extend((1..=n).map(Flavor::Mid));
    v
}

/// Evaluates both sides of `law` on `maps` with the given flavor.
pub fn juggling_law(
    b: &dyn Backend,
    maps: &[Morphism],
    law: &JugglingLaw,
    flavor: Flavor,
) -> Result<LawReport> {
    let n = b.n();
    let long = matches!(
        law,
        JugglingLaw::PostInclusion
            | JugglingLaw::PreInclusion
            | JugglingLaw::LowShift
            | JugglingLaw::HighShift
            | JugglingLaw::Shift { .. }
            | JugglingLaw::PostPre
    );
    let want = if long { n + 1 } else { n };
    if maps.len() != want {
        return Err(Error::Shape(format!("law needs {want} maps, got {}", maps.len())));
    }
    DiagramChain::new(b, maps.to_vec())?;
    let f = |i: usize| &maps[i - 1];
    let comp = |g: &Morphism, h: &Morphism| compose(b, g, h);
    match law {
        JugglingLaw::ZeroMembership => {
            let zero_at = (1..=n).find(|&i| f(i).is_zero());
            let br = bracket(b, maps.to_vec(), flavor)?;
            let zero = Coset::point(b.ring(), vec![0; br.ambient()]);
            let holds = zero_at.is_none() || br.is_empty() || br.contains(&vec![0; br.ambient()]);
            Ok(LawReport {
                law: "zero-membership".into(),
                holds,
                relation: "contains".into(),
                lhs: br,
                rhs: zero,
                note: match zero_at {
                    Some(i) => format!("f{i} = 0"),
                    None => "no zero map; vacuous".into(),
                },
            })
        }
        JugglingLaw::SubgroupLaw => {
            require_zero_composites(b, maps)?;
            let g = indeterminacy(b, f(1), f(n))?;
            let d = DiagramChain::new(b, maps.to_vec())?;
            let mut holds = true;
            let mut note = String::new();
            let mut first = None;
            for fl in all_flavors(n) {
                let br = toda(b, &d, fl)?.bracket;
                let ok = !br.is_empty() && *br.subgroup() == g;
                if !ok {
                    note.push_str(&format!("{fl} fails; "));
                }
                holds &= ok;
                first.get_or_insert(br);
            }
            let rhs = Coset::new(vec![0; g.ambient()], g);
            Ok(LawReport {
                law: "subgroup-law".into(),
                holds,
                relation: "subgroup".into(),
                lhs: first.unwrap(),
                rhs,
                note,
            })
        }
        JugglingLaw::Coincidence => {
            require_zero_composites(b, maps)?;
            let d = DiagramChain::new(b, maps.to_vec())?;
            let cc = toda_cc(b, &d, None)?.bracket;
            let mut holds = true;
            let mut note = String::new();
            for fl in all_flavors(n).into_iter().skip(1) {
                let br = toda(b, &d, fl)?.bracket;
                if !coset_eq(&br, &cc) {
                    holds = false;
                    note.push_str(&format!("{fl} differs; "));
                }
            }
            Ok(LawReport {
                law: "coincidence".into(),
                holds,
                relation: "equal".into(),
                lhs: cc.clone(),
                rhs: cc,
                note,
            })
        }
        JugglingLaw::FcInclusion => {
            let d = DiagramChain::new(b, maps.to_vec())?;
            let fc = toda_fc(b, &d, None)?.bracket;
            let cc = toda_cc(b, &d, None)?.bracket;
            let ff = toda_ff(b, &d, None)?.bracket;
            let in_ff = subset(&fc, &ff);
            let mut r = report("fc-inclusion", "subset", fc, cc, String::new());
            r.holds &= in_ff;
            if !in_ff {
                r.note = "fc not inside ff".into();
            }
            Ok(r)
        }
        JugglingLaw::Additivity { i, other } => {
            let i = *i;
            if i < 2 || i + 1 > n {
                return Err(Error::Shape("additivity needs 2 <= i <= n-1".into()));
            }
            let mut alt = maps.to_vec();
            alt[i - 1] = other.clone();
            require_zero_composites(b, maps)?;
            require_zero_composites(b, &alt)?;
            let mut sum = maps.to_vec();
            sum[i - 1] = f(i).add(other)?;
            let lhs = bracket(b, sum, flavor)?;
            let rhs = bracket(b, maps.to_vec(), flavor)?.add(&bracket(b, alt, flavor)?)?;
            Ok(report("additivity", "equal", lhs, rhs, format!("position {i}")))
        }
        JugglingLaw::Negation { i } => {
            let mut neg = maps.to_vec();
            neg[i - 1] = f(*i).neg();
            let lhs = bracket(b, neg, flavor)?;
            let rhs = bracket(b, maps.to_vec(), flavor)?.neg();
            Ok(report("negation", "equal", lhs, rhs, format!("position {i}")))
        }
        JugglingLaw::TwoSigns { j, k } => {
            let mut neg = maps.to_vec();
            neg[j - 1] = neg[j - 1].neg();
            neg[k - 1] = neg[k - 1].neg();
            let lhs = bracket(b, neg, flavor)?;
            let rhs = bracket(b, maps.to_vec(), flavor)?;
            Ok(report("two-signs", "equal", lhs, rhs, format!("positions {j}, {k}")))
        }
        JugglingLaw::PostInclusion | JugglingLaw::PostPre => {
            require_zero_composites(b, maps)?;
            let inner = bracket(b, maps[..n].to_vec(), flavor)?;
            let post = postcompose_matrix(b, f(n + 1), f(1).src.suspend(1))?;
            let lhs = inner.image(&post)?;
            if matches!(law, JugglingLaw::PostInclusion) {
                let mut joined = maps[..n - 1].to_vec();
                joined.push(comp(f(n + 1), f(n))?);
                let rhs = bracket(b, joined, flavor)?;
                Ok(report("post-inclusion", "subset", lhs, rhs, String::new()))
            } else {
                let upper = bracket(b, maps[1..].to_vec(), flavor)?;
                let sf1 = suspend(b, f(1), 1)?.signed(n as i64);
                let pre = precompose_matrix(b, &sf1, f(n + 1).tgt)?;
                let rhs = upper.image(&pre)?;
                Ok(report("post-pre", "equal", lhs, rhs, format!("sign (-1)^{n}")))
            }
        }
        JugglingLaw::PreInclusion => {
            require_zero_composites(b, maps)?;
            let upper = bracket(b, maps[1..].to_vec(), flavor)?;
            let sf1 = suspend(b, f(1), 1)?;
            let lhs = upper.image(&precompose_matrix(b, &sf1, f(n + 1).tgt)?)?;
            let mut joined = vec![comp(f(2), f(1))?];
            joined.extend(maps[2..].iter().cloned());
            let rhs = bracket(b, joined, flavor)?;
            Ok(report("pre-inclusion", "subset", lhs, rhs, String::new()))
        }
        JugglingLaw::LowShift | JugglingLaw::HighShift | JugglingLaw::Shift { .. } => {
            require_zero_composites(b, maps)?;
            // joining (i, i+1) on the left side and (i-1, i) on the right side
            let (i, relation, name) = match law {
                JugglingLaw::LowShift => (2, "subset", "low-shift"),
                JugglingLaw::HighShift => (n, "subset", "high-shift"),
                JugglingLaw::Shift { i } => {
                    if *i < 3 || *i + 1 > n {
                        return Err(Error::Shape("shift law needs 3 <= i <= n-1".into()));
                    }
                    (*i, "equal", "shift")
                }
                _ => unreachable!(),
            };
            let join = |a: usize| -> Result<Vec<Morphism>> {
                let mut v = maps[..a - 1].to_vec();
                v.push(comp(f(a + 1), f(a))?);
                v.extend(maps[a + 1..].iter().cloned());
                Ok(v)
            };
            let (lhs_join, rhs_join) = match law {
                JugglingLaw::LowShift => (1, 2),
                _ => (i, i - 1),
            };
            let lhs = bracket(b, join(lhs_join)?, flavor)?;
            let rhs = bracket(b, join(rhs_join)?, flavor)?;
            Ok(report(name, relation, lhs, rhs, format!("position {i}")))
        }
    }
}
