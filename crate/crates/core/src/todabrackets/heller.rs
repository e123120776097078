use serde::{Deserialize, Serialize};

use crate::angcat::{identity, postcompose_matrix, suspend, Backend, Morphism, NSeq, ObjRef};
use crate::error::Result;
use crate::exactlin::Subgroup;

use super::{toda_cc, DiagramChain};

/// A place where the induced sequence of hom groups fails to be exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpotFailure {
    pub generator: ObjRef,
    pub shift: i64,
    /// 1-based position: spot `j` is `Hom(Σ^k A, X_j)`, spot `n + 1` is `ΣX_1`.
    pub spot: usize,
}

/// Outcome of the Heller criterion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HellerVerdict {
    Yes,
    NotYonedaExact(Vec<SpotFailure>),
    IdentityNotInBracket,
}

impl HellerVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, HellerVerdict::Yes)
    }

    pub fn reason(&self) -> &'static str {
        match self {
            HellerVerdict::Yes => "n-angle",
            HellerVerdict::NotYonedaExact(_) => "not-yoneda-exact",
            HellerVerdict::IdentityNotInBracket => "identity-not-in-bracket",
        }
    }
}

/// Every spot at which `Hom(Σ^k A, -)` applied to the periodic sequence is not
/// exact, over all generators `A` and shifts `k` in their windows.
pub fn yoneda_report(b: &dyn Backend, s: &NSeq) -> Result<Vec<SpotFailure>> {
    let n = s.n();
    // P_0 = Σ^{-1}X_n, P_1..P_n = X_1..X_n, P_{n+1} = ΣX_1, P_{n+2} = ΣX_2
    let mut maps: Vec<Morphism> = Vec::with_capacity(n + 2);
    maps.push(suspend(b, &s.maps[n - 1], -1)?);
    maps.extend(s.maps.iter().cloned());
    maps.push(suspend(b, &s.maps[0], 1)?);
    let mut objs: Vec<ObjRef> = maps.iter().map(|m| m.src).collect();
    objs.push(maps[n + 1].tgt);
    let ring = b.ring();
    let mut failures = Vec::new();
    for a in b.generators() {
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for &o in &objs {
            let (l, h) = b.hom_window(a, o)?;
            if l <= h {
                lo = lo.min(l);
                hi = hi.max(h);
            }
        }
        for k in lo..=hi {
            let ak = a.suspend(k);
            for j in 1..=n + 1 {
                let into = postcompose_matrix(b, &maps[j - 1], ak)?;
                let image = Subgroup::full(ring, into.cols()).image(&into)?;
                let out = postcompose_matrix(b, &maps[j], ak)?;
                let kernel = Subgroup::full(ring, out.cols()).kernel_within(&out)?;
                if image != kernel {
                    failures.push(SpotFailure { generator: a, shift: k, spot: j });
                }
            }
        }
    }
    Ok(failures)
}

/// Exactness of every long sequence of hom groups out of the generators.
pub fn yoneda_exact(b: &dyn Backend, s: &NSeq) -> Result<bool> {
    Ok(yoneda_report(b, s)?.is_empty())
}

/// Heller's criterion: Yoneda exact and `1_{ΣX_1}` lies in the bracket of
/// its own maps.
pub fn heller_is_n_angle(b: &dyn Backend, s: &NSeq) -> Result<HellerVerdict> {
    let failures = yoneda_report(b, s)?;
    if !failures.is_empty() {
        return Ok(HellerVerdict::NotYonedaExact(failures));
    }
    let d = DiagramChain::new(b, s.maps.clone())?;
    let bracket = toda_cc(b, &d, None)?.bracket;
    let id = identity(b, s.objects[s.n()])?;
    Ok(if bracket.contains(&id.coords) {
        HellerVerdict::Yes
    } else {
        HellerVerdict::IdentityNotInBracket
    })
}
