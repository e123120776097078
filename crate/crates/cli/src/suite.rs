//! Seeded property suites. Cases are independent and run in parallel; the
//! report lists them in case order.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use ntoda::angcat::{
    postcompose_matrix, precompose_matrix, rotate, Backend, Direction, Morphism, NSeq, ObjRef,
};
use ntoda::exactlin::{coset_eq, Matrix, Subgroup};
use ntoda::freelocal::FreeLocal;
use ntoda::quiverhom::{ss_compare, QuiverBackend};
use ntoda::todabrackets::{
    heller_is_n_angle, juggling_law, random_zero_chain, toda_cc, DiagramChain, Flavor, JugglingLaw,
};

use crate::build::{AnyBackend, Built};
use crate::error::{invalid, Result};
use crate::scene::Scene;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteKind {
    Coincidence,
    Juggling,
    Heller,
    SsSign,
}

impl std::str::FromStr for SuiteKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "coincidence" => Ok(SuiteKind::Coincidence),
            "juggling" => Ok(SuiteKind::Juggling),
            "heller" => Ok(SuiteKind::Heller),
            "ss-sign" => Ok(SuiteKind::SsSign),
            _ => Err(format!("unknown suite {s:?}; use coincidence, juggling, heller or ss-sign")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    pub cases: usize,
    /// Scene with a quiver section, for `ss-sign`.
    pub scene: Option<PathBuf>,
    /// Residue characteristics for the free local suites.
    pub primes: Vec<u64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 0, cases: 50, scene: None, primes: vec![2, 3] }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseFailure {
    pub case: usize,
    pub seed: u64,
    pub p: u64,
    pub law: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: SuiteKind,
    pub seed: u64,
    pub cases: usize,
    pub checks: usize,
    pub failures: Vec<CaseFailure>,
    pub timing_ms: u64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn case_seed(seed: u64, case: usize) -> u64 {
    seed ^ (case as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

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

/// Maps `src -> tgt` killed by `prev` (precomposed) and `next` (postcomposed).
fn admissible(b: &dyn Backend, src: ObjRef, tgt: ObjRef, prev: &Morphism, next: &Morphism) -> ntoda::Result<Subgroup> {
    let ring = b.ring();
    let rank = b.hom_rank(src, tgt)?;
    let mut rows = precompose_matrix(b, prev, tgt)?.row_vecs();
    rows.extend(postcompose_matrix(b, next, src)?.row_vecs());
    Subgroup::full(ring, rank).kernel_within(&Matrix::from_vectors(ring, rank, &rows))
}

fn free_pool(fl: &FreeLocal) -> Vec<ObjRef> {
    (1..=3).map(|r| fl.obj(r)).collect()
}

/// Accumulates law verdicts for one case.
struct CaseLog<'a> {
    case: usize,
    seed: u64,
    p: u64,
    checks: usize,
    failures: &'a mut Vec<CaseFailure>,
}

impl CaseLog<'_> {
    fn law(&mut self, b: &dyn Backend, maps: &[Morphism], law: JugglingLaw, flavor: Flavor) {
        self.checks += 1;
        let name = format!("{law:?} [{flavor}]");
        match juggling_law(b, maps, &law, flavor) {
            Ok(r) if r.holds => {}
            Ok(r) => self.fail(name, r.note),
            Err(e) => self.fail(name, e.to_string()),
        }
    }

    fn fail(&mut self, law: String, detail: String) {
        self.failures.push(CaseFailure { case: self.case, seed: self.seed, p: self.p, law, detail });
    }
}

fn coincidence_case(case: usize, seed: u64, p: u64) -> (usize, Vec<CaseFailure>) {
    let mut failures = Vec::new();
    let fl = FreeLocal::new(p).expect("prime residue field");
    let mut log = CaseLog { case, seed, p, checks: 0, failures: &mut failures };
    let mut maps = match random_zero_chain(&fl, &free_pool(&fl), 4, seed) {
        Ok(m) => m,
        Err(e) => {
            log.fail("chain".into(), e.to_string());
            return (1, failures);
        }
    };
    // every third case zeroes one map so that zero membership is exercised
    if case.is_multiple_of(3) {
        let i = (case / 3) % 4;
        maps[i] = Morphism::new(maps[i].src, maps[i].tgt, fl.ring(), vec![0; maps[i].coords.len()]);
    }
    for flavor in [Flavor::Cc, Flavor::Ff] {
        log.law(&fl, &maps, JugglingLaw::SubgroupLaw, flavor);
    }
    log.law(&fl, &maps, JugglingLaw::Coincidence, Flavor::Cc);
    log.law(&fl, &maps, JugglingLaw::FcInclusion, Flavor::Cc);
    for flavor in [Flavor::Cc, Flavor::Ff, Flavor::Fc, Flavor::Mid(2)] {
        log.law(&fl, &maps, JugglingLaw::ZeroMembership, flavor);
    }
    (log.checks, failures)
}

fn juggling_case(case: usize, seed: u64, p: u64) -> (usize, Vec<CaseFailure>) {
    let mut failures = Vec::new();
    let fl = FreeLocal::new(p).expect("prime residue field");
    let mut log = CaseLog { case, seed, p, checks: 0, failures: &mut failures };
    let long = match random_zero_chain(&fl, &free_pool(&fl), 5, seed) {
        Ok(m) => m,
        Err(e) => {
            log.fail("chain".into(), e.to_string());
            return (1, failures);
        }
    };
    let maps = &long[..4];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for i in 1..=4 {
        log.law(&fl, maps, JugglingLaw::Negation { i }, Flavor::Cc);
    }
    log.law(&fl, maps, JugglingLaw::TwoSigns { j: 1, k: 3 }, Flavor::Ff);
    for i in 2..=3 {
        let (src, tgt) = (maps[i - 1].src, maps[i - 1].tgt);
        match admissible(&fl, src, tgt, &maps[i - 2], &maps[i]) {
            Ok(s) => {
                let other = Morphism::new(src, tgt, fl.ring(), pick(&mut rng, &fl, &s));
                log.law(&fl, maps, JugglingLaw::Additivity { i, other }, Flavor::Cc);
            }
            Err(e) => log.fail(format!("additivity {i}"), e.to_string()),
        }
    }
    log.law(&fl, &long, JugglingLaw::Shift { i: 3 }, Flavor::Cc);
    log.law(&fl, &long, JugglingLaw::PostPre, Flavor::Cc);
    log.law(&fl, &long, JugglingLaw::PostInclusion, Flavor::Cc);
    log.law(&fl, &long, JugglingLaw::PreInclusion, Flavor::Cc);
    log.law(&fl, &long, JugglingLaw::LowShift, Flavor::Cc);
    log.law(&fl, &long, JugglingLaw::HighShift, Flavor::Cc);
    (log.checks, failures)
}

fn heller_case(case: usize, seed: u64, p: u64) -> (usize, Vec<CaseFailure>) {
    let mut failures = Vec::new();
    let fl = FreeLocal::new(p).expect("prime residue field");
    let mut log = CaseLog { case, seed, p, checks: 0, failures: &mut failures };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, c) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
    let ring = fl.ring();
    let coords: Vec<u64> = (0..a * c).map(|_| rng.gen_range(0..ring.modulus())).collect();
    let f = Morphism::new(fl.obj(a), fl.obj(c), ring, coords);
    let expect = |log: &mut CaseLog, what: &str, s: ntoda::Result<NSeq>, want: bool| {
        log.checks += 1;
        match s.and_then(|s| heller_is_n_angle(&fl, &s)) {
            Ok(v) if v.is_yes() == want => {}
            Ok(v) => log.fail(what.into(), format!("verdict {}", v.reason())),
            Err(e) => log.fail(what.into(), e.to_string()),
        }
    };
    let ext = fl.extend(&f);
    expect(&mut log, "extension", ext.clone(), true);
    if let Ok(e) = &ext {
        expect(&mut log, "left rotation", rotate(&fl, e, Direction::Left), true);
        expect(&mut log, "right rotation", rotate(&fl, e, Direction::Right), true);
    }
    if p % 2 == 1 {
        // (p u, p u, p u, -p u) for a unit u breaks the sign bookkeeping
        let u = loop {
            let x = rng.gen_range(1..ring.modulus());
            if ring.is_unit(x) {
                break x;
            }
        };
        let pu = fl.scalar((p * u) as i64);
        let perturbed = NSeq::new(&fl, vec![pu.clone(), pu.clone(), pu.clone(), pu.neg()]);
        expect(&mut log, "sign-perturbed", perturbed, false);
    }
    (log.checks, failures)
}

fn quiver_section(path: &Path) -> Result<Built> {
    let scene = Scene::load(path)?;
    for s in scene.sections()? {
        if matches!(s.backend, crate::scene::BackendSpec::Quiver { .. }) {
            let built = Built::build(&s)?;
            if built.provenance.n == 4 {
                return Ok(built);
            }
        }
    }
    invalid(format!("{} has no quiver section with n = 4", path.display()))
}

/// Seeded chains whose bracket differs from its negative, so the sign is visible.
pub fn sign_sensitive_chains(
    b: &QuiverBackend,
    pool: &[ObjRef],
    count: usize,
    seed: u64,
) -> ntoda::Result<Vec<(u64, Vec<Morphism>)>> {
    let mut out = Vec::new();
    for s in seed..seed.saturating_add(100_000) {
        let chain = random_zero_chain(b, pool, 4, s)?;
        let target = b.hom_rank(chain[0].src.suspend(1), chain[3].tgt)?;
        if target == 0 || chain.iter().any(Morphism::is_zero) {
            continue;
        }
        let d = DiagramChain::new(b, chain.clone())?;
        let br = toda_cc(b, &d, None)?.bracket;
        if !coset_eq(&br, &br.neg()) {
            out.push((s, chain));
            if out.len() == count {
                break;
            }
        }
    }
    Ok(out)
}

fn ss_sign(opts: &SuiteOptions) -> Result<(usize, Vec<CaseFailure>)> {
    let Some(path) = &opts.scene else { return invalid("ss-sign needs --scene with a quiver section") };
    let built = quiver_section(path)?;
    let AnyBackend::Quiver(q) = &built.backend else { unreachable!() };
    let k = q.subcat().summands.len();
    let pool: Vec<ObjRef> = (1..=k).flat_map(|id| (0..=2).map(move |g| ObjRef::new(id, g))).collect();
    let chains = sign_sensitive_chains(q, &pool, opts.cases, opts.seed)?;
    let p = built.provenance.p;
    let mut failures = Vec::new();
    if chains.len() < opts.cases {
        failures.push(CaseFailure {
            case: chains.len(),
            seed: opts.seed,
            p,
            law: "chain search".into(),
            detail: format!("found {} sign-sensitive chains, wanted {}", chains.len(), opts.cases),
        });
    }
    let results: Vec<Option<CaseFailure>> = chains
        .par_iter()
        .enumerate()
        .map(|(case, (seed, chain))| {
            let fail = |detail: String| {
                Some(CaseFailure { case, seed: *seed, p, law: "filtered = -angulated".into(), detail })
            };
            match ss_compare(q, chain) {
                Ok(r) if r.opposite => None,
                Ok(r) => fail(format!("filtered {:?} vs angulated {:?}", r.filtered, r.angulated)),
                Err(e) => fail(e.to_string()),
            }
        })
        .collect();
    failures.extend(results.into_iter().flatten());
    Ok((chains.len(), failures))
}

pub fn run_suite(kind: SuiteKind, opts: &SuiteOptions) -> Result<SuiteReport> {
    let start = Instant::now();
    let per_case = match kind {
        SuiteKind::Coincidence => coincidence_case,
        SuiteKind::Juggling => juggling_case,
        SuiteKind::Heller => heller_case,
        SuiteKind::SsSign => {
            let (chains, failures) = ss_sign(opts)?;
            return Ok(SuiteReport {
                suite: kind,
                seed: opts.seed,
                cases: chains,
                checks: chains,
                failures,
                timing_ms: start.elapsed().as_millis() as u64,
            });
        }
    };
    if opts.primes.is_empty() {
        return invalid("no primes given");
    }
    let results: Vec<(usize, Vec<CaseFailure>)> = (0..opts.cases)
        .into_par_iter()
        .map(|case| {
            let p = opts.primes[case % opts.primes.len()];
            per_case(case, case_seed(opts.seed, case), p)
        })
        .collect();
    let checks = results.iter().map(|r| r.0).sum();
    let failures = results.into_iter().flat_map(|r| r.1).collect();
    Ok(SuiteReport {
        suite: kind,
        seed: opts.seed,
        cases: opts.cases,
        checks,
        failures,
        timing_ms: start.elapsed().as_millis() as u64,
    })
}
