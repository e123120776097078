use serde::{Deserialize, Serialize};

use crate::angcat::{compose, suspend, LinearSystem, Morphism, Term};
use crate::error::{Error, Result};
use crate::exactlin::{coset_eq, Coset};
use crate::todabrackets::{multilinear_image, toda_cc, DiagramChain, Factor, DEFAULT_CAP};

use super::{cone, ChainMap, QuiverBackend};

/// The 4-fold bracket of a diagram in the triangulated homotopy category,
/// computed from a 3-filtered object.
///
/// Writing `Σ` for the triangulated shift `[1]` and `X_1..X_5` for the objects:
///
/// - `F_1 = X_4` with `q_1 = 1`, so `e_1 = Σf_3`;
/// - `F_2 = C(f_3)` with `q_2` the negated cone projection, which makes
///   `F_1 -> F_2 -> ΣX_3 -> ΣF_1` distinguished with connecting map `Σf_3`;
/// - `e_2: Σ²X_2 -> ΣF_2` solves `(Σq_2) e_2 = Σ²f_2`;
/// - `F_3 = C(-Σ^{-1}e_2)`, whose rotated triangle has connecting map `e_2`;
/// - the bracket is `{μ ∘ ν'}` over all `μ: F_3 -> X_5` with `μσ = f_4` and
///   `ν': Σ²X_1 -> F_3` with `q_3 ν' = Σ²f_1`, where `σ: X_4 -> F_3` is the
///   composite inclusion.
///
/// The maps must live in a backend with `Σ_𝒰 = [2]`, so `Σ²X` is the
/// backend suspension of `X`.
pub fn ss_bracket_4(b: &QuiverBackend, maps: &[Morphism]) -> Result<Coset> {
    use crate::angcat::Backend;
    if maps.len() != 4 || b.n() != 4 {
        return Err(Error::Unsupported("the filtered-object bracket is implemented for four maps with n = 4".into()));
    }
    DiagramChain::new(b, maps.to_vec())?;
    for (i, w) in maps.windows(2).enumerate() {
        if !compose(b, &w[1], &w[0])?.is_zero() {
            return Err(Error::CompositeNonzero(i + 1));
        }
    }
    let alg = b.algebra();
    let ring = b.ring();
    let x = |i: usize| if i <= 4 { maps[i - 1].src } else { maps[3].tgt };
    let cx = |i: usize| b.complex(x(i));

    // F_2 = C(f_3), i_1 = inclusion, q_2 = -projection
    let c2 = cone(alg, &b.chain_map(&maps[2])?, &cx(3)?, &cx(4)?)?;
    let f2 = c2.complex.clone();
    let i1 = c2.inc.clone();
    let q2 = c2.proj.scale(ring, ring.reduce(-1));

    // e_2 from (Σq_2) e_2 = Σ²f_2
    let sf2 = b.register(f2.shift(ring, 1), "ΣF2");
    let sq2 = b.morphism(sf2, x(3).suspend(1), &q2.shift(1))?;
    let mut sys = LinearSystem::new(b);
    let e = sys.add_unknown(x(2).suspend(1), sf2)?;
    sys.add_equation(x(2).suspend(1), x(3).suspend(1), &[Term::plain(e).post(&sq2)], Some(&suspend(b, &maps[1], 1)?))?;
    let sol = sys.solve()?;
    let point = sol
        .representative()
        .ok_or_else(|| Error::FactorizationMissing("no e2 with (Σq2) e2 = Σ²f2".into()))?
        .to_vec();
    let e2 = sys.morphism(&point, e);

    // F_3 = C(-Σ^{-1} e_2)
    let u: ChainMap = b.chain_map(&e2)?.shift(-1).scale(ring, ring.reduce(-1));
    let sx2 = cx(2)?.shift(ring, 1);
    let c3 = cone(alg, &u, &sx2, &f2)?;
    let f3 = b.register(c3.complex.clone(), "F3");
    let sigma_chain = c3.inc.compose(alg, &i1, &cx(4)?, &f2, &c3.complex);
    let sigma = b.morphism(x(4), f3, &sigma_chain)?;
    let q3 = b.morphism(f3, x(2).suspend(1), &c3.proj)?;

    let mut mu_sys = LinearSystem::new(b);
    let mu = mu_sys.add_unknown(f3, x(5))?;
    mu_sys.add_equation(x(4), x(5), &[Term::plain(mu).pre(&sigma)], Some(&maps[3]))?;
    let mus = mu_sys.solve()?;

    let mut nu_sys = LinearSystem::new(b);
    let nu = nu_sys.add_unknown(x(1).suspend(1), f3)?;
    nu_sys.add_equation(x(1).suspend(1), x(2).suspend(1), &[Term::plain(nu).post(&q3)], Some(&suspend(b, &maps[0], 1)?))?;
    let nus = nu_sys.solve()?;

    let factors = [
        Factor { src: x(1).suspend(1), tgt: f3, coset: nus },
        Factor { src: f3, tgt: x(5), coset: mus },
    ];
    multilinear_image(b, &factors, DEFAULT_CAP)
}

/// Comparison of the filtered-object bracket with the 4-angulated bracket.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SsComparison {
    pub filtered: Coset,
    pub angulated: Coset,
    /// `filtered = -angulated`.
    pub opposite: bool,
}

pub fn ss_compare(b: &QuiverBackend, maps: &[Morphism]) -> Result<SsComparison> {
    let filtered = ss_bracket_4(b, maps)?;
    let d = DiagramChain::new(b, maps.to_vec())?;
    let angulated = toda_cc(b, &d, None)?.bracket;
    let opposite = coset_eq(&filtered, &angulated.neg());
    Ok(SsComparison { filtered, angulated, opposite })
}
