//! Task execution against a built section.

use std::collections::BTreeSet;
use std::time::Instant;

use serde_json::{json, Value};

use ntoda::angcat::{complete_morphism, identity, is_morphism_of_nseqs, Backend, Morphism, NSeq, ObjRef};
use ntoda::exactlin::{coset_eq, Coset, Subgroup};
use ntoda::quiverhom::{projective_resolution, ss_compare, Rep};
use ntoda::todabrackets::{
    heller_is_n_angle, indeterminacy, juggling_law, oracle_bracket, oracle_cc_with, toda, toda_cc, toda_ff, toda_mid,
    yoneda_report, DiagramChain, Flavor, HellerVerdict, JugglingLaw, OracleFlavor, TodaResult,
};

use crate::build::Built;
use crate::error::{invalid, CliError, Result};
use crate::report::{coset_display, coset_json, hom_info, morphism_json, SectionReport, Status, TaskReport};
use crate::scene::{BracketExpect, Elem, LawSpec, Section, TaskDecl};

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Enumeration cap for oracle tasks.
    pub cap: u128,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { cap: ntoda::todabrackets::DEFAULT_CAP }
    }
}

/// Collected expectation outcomes of one task.
#[derive(Default)]
struct Checks {
    asserted: bool,
    failures: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.asserted = true;
        if !ok {
            self.failures.push(msg());
        }
    }

    fn status(&self) -> Status {
        match (self.asserted, self.failures.is_empty()) {
            (false, _) => Status::Info,
            (true, true) => Status::Pass,
            (true, false) => Status::Fail,
        }
    }
}

pub fn parse_flavors(text: &str, n: usize) -> Result<Vec<Flavor>> {
    let t = text.trim();
    Ok(match t {
        "cc" => vec![Flavor::Cc],
        "ff" => vec![Flavor::Ff],
        "fc" => vec![Flavor::Fc],
        "all" => {
            let mut v = vec![Flavor::Cc, Flavor::Ff, Flavor::Fc];
            v.extend((1..=n).map(Flavor::Mid));
            v
        }
        _ => match t.strip_prefix("mid:").and_then(|i| i.parse::<usize>().ok()) {
            Some(i) if (1..=n).contains(&i) => vec![Flavor::Mid(i)],
            _ => return invalid(format!("unknown flavor {t:?}; use cc, ff, fc, mid:<i> or all")),
        },
    })
}

fn oracle_flavor(f: Flavor) -> OracleFlavor {
    match f {
        Flavor::Cc => OracleFlavor::Cc,
        Flavor::Ff => OracleFlavor::Ff,
        Flavor::Fc => OracleFlavor::Fc,
        Flavor::Mid(i) => OracleFlavor::Mid(i),
    }
}

/// Computes one bracket, with an optional user-supplied extension.
pub fn bracket(b: &dyn Backend, d: &DiagramChain, flavor: Flavor, ext: Option<&NSeq>) -> ntoda::Result<TodaResult> {
    match (flavor, ext) {
        (_, None) => toda(b, d, flavor),
        (Flavor::Cc, Some(e)) => toda_cc(b, d, Some(e)),
        (Flavor::Ff, Some(e)) => toda_ff(b, d, Some(e)),
        (Flavor::Mid(i), Some(e)) => toda_mid(b, d, i, Some(e)),
        (Flavor::Fc, Some(_)) => Err(ntoda::Error::Unsupported("fc takes one extension per row; omit it".into())),
    }
}

fn elem(built: &Built, hom: (ObjRef, ObjRef), e: &Elem) -> Result<Vec<u64>> {
    let b = built.b();
    let ring = b.ring();
    let rank = b.hom_rank(hom.0, hom.1)?;
    match e {
        Elem::Coords(c) => {
            if c.len() != rank {
                return invalid(format!("{c:?} has {} coordinates; the hom space has rank {rank}", c.len()));
            }
            Ok(c.iter().map(|&x| ring.reduce(x)).collect())
        }
        Elem::Name(n) if n == "zero" => Ok(vec![0; rank]),
        Elem::Name(n) if n == "identity" => {
            if !b.obj_eq(hom.0, hom.1) {
                return invalid("identity requested in a hom space between different objects");
            }
            Ok(b.identity_coords(hom.0)?)
        }
        Elem::Name(n) => {
            let f = built.morphism(n)?;
            if !b.obj_eq(f.src, hom.0) || !b.obj_eq(f.tgt, hom.1) {
                return invalid(format!(
                    "{n} runs {} -> {}, not {} -> {}",
                    built.describe(f.src),
                    built.describe(f.tgt),
                    built.describe(hom.0),
                    built.describe(hom.1)
                ));
            }
            Ok(f.coords.clone())
        }
    }
}

fn witness_json(b: &dyn Backend, r: &TodaResult) -> Value {
    Value::Array(
        r.witness.iter().map(|(k, m)| json!({ "name": k, "morphism": morphism_json(b, m) })).collect(),
    )
}

fn expect_bracket(
    built: &Built,
    hom: (ObjRef, ObjRef),
    flavor: Flavor,
    c: &Coset,
    indet: &Subgroup,
    e: &BracketExpect,
    ck: &mut Checks,
) -> Result<()> {
    let b = built.b();
    let ring = b.ring();
    let ambient = c.ambient();
    let show = coset_display(c);
    if let Some(want) = e.empty {
        ck.check(c.is_empty() == want, || format!("{flavor}: expected empty = {want}, got {show}"));
    }
    if let Some(ce) = &e.coset {
        let rep = elem(built, hom, &ce.rep)?;
        let gens = ce.span.iter().map(|g| elem(built, hom, g)).collect::<Result<Vec<_>>>()?;
        let want = Coset::new(rep, Subgroup::span(ring, ambient, &gens));
        ck.check(coset_eq(c, &want), || format!("{flavor}: expected {}, got {show}", coset_display(&want)));
    }
    for x in &e.contains {
        let v = elem(built, hom, x)?;
        ck.check(c.contains(&v), || format!("{flavor}: {v:?} is not in {show}"));
    }
    for x in &e.excludes {
        let v = elem(built, hom, x)?;
        ck.check(!c.contains(&v), || format!("{flavor}: {v:?} is in {show}"));
    }
    if let Some(want) = e.contains_zero {
        let has = c.contains(&vec![0; ambient]);
        ck.check(has == want, || format!("{flavor}: expected contains_zero = {want} for {show}"));
    }
    if let Some(want) = e.size {
        ck.check(c.size() == Some(u128::from(want)), || format!("{flavor}: expected size {want}, got {:?}", c.size()));
    }
    if let Some(gens) = &e.subgroup {
        let gens = gens.iter().map(|g| elem(built, hom, g)).collect::<Result<Vec<_>>>()?;
        let want = Subgroup::span(ring, ambient, &gens);
        ck.check(!c.is_empty() && *c.subgroup() == want, || format!("{flavor}: subgroup differs from the expected span"));
    }
    if let Some(want) = e.subgroup_is_indeterminacy {
        let is = !c.is_empty() && c.subgroup() == indet;
        ck.check(is == want, || format!("{flavor}: expected subgroup_is_indeterminacy = {want}"));
    }
    if let Some(want) = e.full {
        let is = c.size() == Subgroup::full(ring, ambient).order();
        ck.check(is == want, || format!("{flavor}: expected full = {want}, got {show}"));
    }
    Ok(())
}

fn task_bracket(
    built: &Built,
    chain: &[String],
    flavor: &str,
    extension: &Option<String>,
    expect: &Option<BracketExpect>,
    ck: &mut Checks,
) -> Result<Value> {
    let b = built.b();
    let d = DiagramChain::new(b, built.chain(chain)?)?;
    let ext = extension.as_ref().map(|e| built.sequence(e)).transpose()?;
    let hom = d.target();
    let indet = indeterminacy(b, d.f(1), d.f(d.n()))?;
    let mut rows = Vec::new();
    let mut cosets: Vec<(Flavor, Coset)> = Vec::new();
    for fl in parse_flavors(flavor, d.n())? {
        let r = bracket(b, &d, fl, ext)?;
        if let Some(e) = expect {
            expect_bracket(built, hom, fl, &r.bracket, &indet, e, ck)?;
        }
        rows.push(json!({
            "flavor": fl.to_string(),
            "bracket": coset_json(b, hom, &r.bracket),
            "extensions_used": r.extensions_used.len(),
            "witness": witness_json(b, &r),
        }));
        cosets.push((fl, r.bracket));
    }
    let agree = cosets.windows(2).all(|w| coset_eq(&w[0].1, &w[1].1));
    if let Some(want) = expect.as_ref().and_then(|e| e.flavors_agree) {
        ck.check(agree == want, || format!("expected flavors_agree = {want}"));
    }
    let display = if agree {
        coset_display(&cosets[0].1)
    } else {
        cosets.iter().map(|(f, c)| format!("{f}: {}", coset_display(c))).collect::<Vec<_>>().join("; ")
    };
    Ok(json!({
        "chain": chain,
        "composites_vanish": ntoda::todabrackets::composable_zero_check(b, &d)?.iter().all(|&z| z),
        "indeterminacy_basis": indet.basis(),
        "flavors": rows,
        "flavors_agree": agree,
        "display": display,
    }))
}

/// Hom basis with, for quiver backends, the summands each basis element
/// factors through and literal products of basis maps that produce it.
pub fn describe_hom(built: &Built, x: ObjRef, y: ObjRef) -> Result<Value> {
    let b = built.b();
    let ring = b.ring();
    let tags = b.hom_basis(x, y)?;
    let rank = tags.len();
    let unit = |i: usize| {
        let mut v = vec![0u64; rank];
        v[i] = 1;
        v
    };
    let mut through: Vec<Vec<String>> = vec![Vec::new(); rank];
    let mut products: Vec<Vec<String>> = vec![Vec::new(); rank];
    if let Some(q) = built.backend.quiver() {
        let (glo, ghi) = (x.grade.min(y.grade), x.grade.max(y.grade));
        for id in 1..=q.subcat().summands.len() {
            for g in glo..=ghi {
                let z = ObjRef::new(id, g);
                let zname = built.describe(z);
                if z == x || z == y {
                    continue;
                }
                let (l, r) = (b.hom_rank(z, y)?, b.hom_rank(x, z)?);
                if l == 0 || r == 0 {
                    continue;
                }
                let t = b.compose_tensor(x, z, y)?;
                let (ltags, rtags) = (b.hom_basis(z, y)?, b.hom_basis(x, z)?);
                let mut gens = Vec::new();
                for k in 0..l {
                    for j in 0..r {
                        let v = t.entry(k, j).to_vec();
                        for i in 0..rank {
                            if v == unit(i) {
                                products[i].push(format!("[{}] ∘ [{}] via {zname}", ltags[k], rtags[j]));
                            }
                        }
                        gens.push(v);
                    }
                }
                let span = Subgroup::span(ring, rank, &gens);
                for (i, list) in through.iter_mut().enumerate() {
                    if span.contains(&unit(i)) {
                        list.push(zname.clone());
                    }
                }
            }
        }
    }
    let entries: Vec<Value> = (0..rank)
        .map(|i| {
            let named: Vec<&String> =
                built.morphisms.iter().filter(|(_, f)| f.src == x && f.tgt == y && f.coords == unit(i)).map(|(n, _)| n).collect();
            json!({
                "index": i,
                "basis": tags[i],
                "named": named,
                "factors_through": through[i],
                "products": products[i],
            })
        })
        .collect();
    Ok(json!({
        "hom": hom_info(b, x, y),
        "rank": rank,
        "entries": entries,
        "display": format!("rank {rank}"),
    }))
}

/// Text listing for the `describe-hom` verb.
pub fn describe_hom_text(v: &Value) -> String {
    let mut out = format!(
        "Hom({}, {}): rank {}\n",
        v["hom"]["src"].as_str().unwrap_or("?"),
        v["hom"]["tgt"].as_str().unwrap_or("?"),
        v["rank"]
    );
    for e in v["entries"].as_array().into_iter().flatten() {
        out.push_str(&format!("  {}: {}", e["index"], e["basis"].as_str().unwrap_or("")));
        let named: Vec<&str> = e["named"].as_array().into_iter().flatten().filter_map(Value::as_str).collect();
        if !named.is_empty() {
            out.push_str(&format!("  = {}", named.join(", ")));
        }
        let via: Vec<&str> = e["factors_through"].as_array().into_iter().flatten().filter_map(Value::as_str).collect();
        if !via.is_empty() {
            out.push_str(&format!("  (factors through {})", via.join(", ")));
        }
        out.push('\n');
        for p in e["products"].as_array().into_iter().flatten().filter_map(Value::as_str) {
            out.push_str(&format!("      = {p}\n"));
        }
    }
    out
}

fn in_span_through(built: &Built, f: &Morphism, z: ObjRef) -> Result<bool> {
    let b = built.b();
    let rank = b.hom_rank(f.src, f.tgt)?;
    let (l, r) = (b.hom_rank(z, f.tgt)?, b.hom_rank(f.src, z)?);
    if l == 0 || r == 0 {
        return Ok(f.is_zero());
    }
    let t = b.compose_tensor(f.src, z, f.tgt)?;
    let gens: Vec<Vec<u64>> = (0..l).flat_map(|k| (0..r).map(move |j| (k, j))).map(|(k, j)| t.entry(k, j).to_vec()).collect();
    Ok(Subgroup::span(b.ring(), rank, &gens).contains(&f.coords))
}

fn heller_json(built: &Built, s: &NSeq, ck: &mut Checks, expect: &Option<String>) -> Result<Value> {
    let b = built.b();
    let verdict = heller_is_n_angle(b, s)?;
    let mut out = json!({
        "objects": s.objects.iter().map(|&o| built.describe(o)).collect::<Vec<_>>(),
        "verdict": if verdict.is_yes() { "yes" } else { "no" },
        "reason": verdict.reason(),
    });
    if let HellerVerdict::NotYonedaExact(spots) = &verdict {
        out["spots"] = spots
            .iter()
            .map(|sp| json!({ "generator": built.describe(sp.generator), "shift": sp.shift, "spot": sp.spot }))
            .collect();
    }
    let d = DiagramChain::new(b, s.maps.clone())?;
    if let Ok(r) = toda_cc(b, &d, None) {
        out["display"] = Value::String(coset_display(&r.bracket));
        out["bracket"] = coset_json(b, d.target(), &r.bracket);
    }
    if verdict.is_yes() {
        // a morphism from the backend's own extension, fixed on X_1 and X_2
        let ext = b.extend(&s.maps[0])?;
        let (x1, x2) = (s.objects[0], s.objects[1]);
        let c = complete_morphism(b, &ext, s, 0, (&identity(b, x1)?, &identity(b, x2)?))?;
        if let Some(comps) = c.witness() {
            out["witness"] = json!({
                "from": ext.objects.iter().map(|&o| built.describe(o)).collect::<Vec<_>>(),
                "components": comps.iter().map(|m| morphism_json(b, m)).collect::<Vec<_>>(),
                "replayed": is_morphism_of_nseqs(b, &ext, s, &comps),
            });
        }
    }
    if let Some(want) = expect {
        let ok = match want.as_str() {
            "yes" => verdict.is_yes(),
            "no" => !verdict.is_yes(),
            r @ ("not-yoneda-exact" | "identity-not-in-bracket") => verdict.reason() == r,
            other => return invalid(format!("unknown heller expectation {other:?}")),
        };
        ck.check(ok, || format!("expected {want}, got {}", verdict.reason()));
    }
    Ok(out)
}

fn law(built: &Built, spec: &LawSpec) -> Result<JugglingLaw> {
    Ok(match spec {
        LawSpec::ZeroMembership => JugglingLaw::ZeroMembership,
        LawSpec::SubgroupLaw => JugglingLaw::SubgroupLaw,
        LawSpec::Coincidence => JugglingLaw::Coincidence,
        LawSpec::FcInclusion => JugglingLaw::FcInclusion,
        LawSpec::Additivity { i, other } => JugglingLaw::Additivity { i: *i, other: built.morphism(other)?.clone() },
        LawSpec::Negation { i } => JugglingLaw::Negation { i: *i },
        LawSpec::TwoSigns { j, k } => JugglingLaw::TwoSigns { j: *j, k: *k },
        LawSpec::PostInclusion => JugglingLaw::PostInclusion,
        LawSpec::PreInclusion => JugglingLaw::PreInclusion,
        LawSpec::LowShift => JugglingLaw::LowShift,
        LawSpec::HighShift => JugglingLaw::HighShift,
        LawSpec::Shift { i } => JugglingLaw::Shift { i: *i },
        LawSpec::PostPre => JugglingLaw::PostPre,
    })
}

/// Brute-force bracket set for a chain, compared with the solver.
pub fn oracle_compare(
    built: &Built,
    chain: &[String],
    flavor: &str,
    extension: &Option<String>,
    cap: u128,
) -> Result<(Value, bool)> {
    let b = built.b();
    let d = DiagramChain::new(b, built.chain(chain)?)?;
    let ext = extension.as_ref().map(|e| built.sequence(e)).transpose()?;
    let mut rows = Vec::new();
    let mut all_agree = true;
    for fl in parse_flavors(flavor, d.n())? {
        let brute: BTreeSet<Vec<u64>> = match (fl, ext) {
            (Flavor::Cc, Some(y)) => oracle_cc_with(b, &d, y, cap)?,
            (_, Some(_)) => return invalid("oracle extensions are supported for cc only"),
            (_, None) => oracle_bracket(b, &d, oracle_flavor(fl), cap)?,
        };
        let solver = bracket(b, &d, fl, ext)?.bracket;
        let listed: BTreeSet<Vec<u64>> = solver.elements(cap)?.into_iter().collect();
        let agree = listed == brute;
        all_agree &= agree;
        rows.push(json!({
            "flavor": fl.to_string(),
            "oracle": brute.iter().collect::<Vec<_>>(),
            "solver": coset_json(b, d.target(), &solver),
            "agree": agree,
        }));
    }
    let display = if all_agree { "solver = oracle" } else { "solver ≠ oracle" };
    Ok((json!({ "chain": chain, "flavors": rows, "display": display }), all_agree))
}

fn run_task(built: &Built, task: &TaskDecl, opts: &RunOptions, ck: &mut Checks) -> Result<Value> {
    let b = built.b();
    match task {
        TaskDecl::HomDim { src, tgt, expect, .. } => {
            let (x, y) = (built.object(src)?, built.object(tgt)?);
            let rank = b.hom_rank(x, y)?;
            if let Some(want) = expect {
                ck.check(rank == *want, || format!("expected rank {want}, got {rank}"));
            }
            Ok(json!({ "hom": hom_info(b, x, y), "rank": rank, "display": format!("rank {rank}") }))
        }
        TaskDecl::HomTable { rows, cols, expect, .. } => {
            let mut table = Vec::new();
            for r in rows {
                let x = built.object(r)?;
                let mut line = Vec::new();
                for c in cols {
                    line.push(b.hom_rank(x, built.object(c)?)?);
                }
                table.push(line);
            }
            if let Some(want) = expect {
                for (i, (got, exp)) in table.iter().zip(want).enumerate() {
                    for (j, (g, e)) in got.iter().zip(exp).enumerate() {
                        ck.check(g == e, || format!("Hom({}, {}): expected {e}, got {g}", rows[i], cols[j]));
                    }
                }
                ck.check(want.len() == table.len(), || "expected table has the wrong number of rows".into());
            }
            Ok(json!({ "rows": rows, "cols": cols, "ranks": table, "display": format!("{}x{} table", rows.len(), cols.len()) }))
        }
        TaskDecl::DescribeHom { src, tgt, shift, expect_len, expect_factors, .. } => {
            let (x, y) = (built.object(src)?, built.object(tgt)?.suspend(*shift));
            let v = describe_hom(built, x, y)?;
            if let Some(want) = expect_len {
                let got = v["rank"].as_u64().unwrap_or(0) as usize;
                ck.check(got == *want, || format!("expected {want} basis entries, got {got}"));
            }
            for fe in expect_factors {
                let f = built.morphism(&fe.morphism)?;
                let z = built.object(&fe.via)?;
                let got = in_span_through(built, f, z)?;
                ck.check(got == fe.holds, || format!("{} factoring through {}: expected {}", fe.morphism, fe.via, fe.holds));
            }
            Ok(v)
        }
        TaskDecl::Bracket { chain, flavor, extension, expect, .. } => {
            task_bracket(built, chain, flavor, extension, expect, ck)
        }
        TaskDecl::BracketEqual { left, right, expect, .. } => {
            let side = |r: &crate::scene::BracketRef| -> Result<(DiagramChain, Coset)> {
                let d = DiagramChain::new(b, built.chain(&r.chain)?)?;
                let fl = parse_flavors(&r.flavor, d.n())?;
                if fl.len() != 1 {
                    return invalid("bracket_equal needs a single flavor per side");
                }
                let ext = r.extension.as_ref().map(|e| built.sequence(e)).transpose()?;
                let c = bracket(b, &d, fl[0], ext)?.bracket;
                Ok((d, c))
            };
            let (dl, cl) = side(left)?;
            let (dr, cr) = side(right)?;
            let same_hom = b.obj_eq(dl.target().0, dr.target().0) && b.obj_eq(dl.target().1, dr.target().1);
            let equal = same_hom && coset_eq(&cl, &cr);
            ck.check(equal == *expect, || {
                format!("expected equal = {expect}: {} vs {}", coset_display(&cl), coset_display(&cr))
            });
            Ok(json!({
                "left": coset_json(b, dl.target(), &cl),
                "right": coset_json(b, dr.target(), &cr),
                "equal": equal,
                "display": format!("{} {} {}", coset_display(&cl), if equal { "=" } else { "≠" }, coset_display(&cr)),
            }))
        }
        TaskDecl::Heller { sequence, expect, .. } => heller_json(built, built.sequence(sequence)?, ck, expect),
        TaskDecl::Yoneda { sequence, expect, .. } => {
            let spots = yoneda_report(b, built.sequence(sequence)?)?;
            let exact = spots.is_empty();
            if let Some(want) = expect {
                ck.check(exact == *want, || format!("expected yoneda exact = {want}"));
            }
            Ok(json!({
                "exact": exact,
                "spots": spots
                    .iter()
                    .map(|sp| json!({ "generator": built.describe(sp.generator), "shift": sp.shift, "spot": sp.spot }))
                    .collect::<Vec<_>>(),
                "display": if exact { "exact" } else { "not exact" },
            }))
        }
        TaskDecl::SsCompare { chain, expect, .. } => {
            let q = built.backend.quiver().ok_or_else(|| CliError::Invalid("ss_compare needs a quiver backend".into()))?;
            let maps = built.chain(chain)?;
            let r = ss_compare(q, &maps)?;
            let d = DiagramChain::new(b, maps)?;
            let equal = coset_eq(&r.filtered, &r.angulated);
            let verdict = match (r.opposite, equal) {
                (true, true) => "equal with either sign",
                (true, false) => "equal with sign -1",
                (false, true) => "equal with sign +1",
                (false, false) => "unrelated",
            };
            if let Some(want) = expect {
                let ok = match want.as_str() {
                    "opposite" => r.opposite,
                    "equal" => equal,
                    other => return invalid(format!("unknown ss_compare expectation {other:?}")),
                };
                ck.check(ok, || format!("expected {want}, got {verdict}"));
            }
            Ok(json!({
                "filtered": coset_json(b, d.target(), &r.filtered),
                "angulated": coset_json(b, d.target(), &r.angulated),
                "opposite": r.opposite,
                "verdict": verdict,
                "display": verdict,
            }))
        }
        TaskDecl::Oracle { chain, flavor, extension, expect, .. } => {
            let (mut v, agree) = oracle_compare(built, chain, flavor, extension, opts.cap)?;
            ck.check(agree, || "solver and oracle differ".into());
            if let Some(want) = expect {
                let ring = b.ring();
                let want: BTreeSet<Vec<u64>> =
                    want.iter().map(|e| e.iter().map(|&x| ring.reduce(x)).collect()).collect();
                for row in v["flavors"].as_array().into_iter().flatten() {
                    let got: BTreeSet<Vec<u64>> = serde_json::from_value(row["oracle"].clone()).unwrap_or_default();
                    ck.check(got == want, || format!("{}: oracle set {got:?}, expected {want:?}", row["flavor"]));
                }
            }
            v["expected"] = json!(expect);
            Ok(v)
        }
        TaskDecl::Juggling { chain, law: spec, flavor, expect, .. } => {
            let maps = built.chain(chain)?;
            let fl = parse_flavors(flavor, b.n())?;
            if fl.len() != 1 {
                return invalid("juggling needs a single flavor");
            }
            let r = juggling_law(b, &maps, &law(built, spec)?, fl[0])?;
            ck.check(r.holds == *expect, || format!("{}: expected holds = {expect}; {}", r.law, r.note));
            Ok(json!({
                "law": r.law,
                "holds": r.holds,
                "relation": r.relation,
                "lhs": coset_display(&r.lhs),
                "rhs": coset_display(&r.rhs),
                "note": r.note,
                "display": format!("{} {} {}", coset_display(&r.lhs), r.relation, coset_display(&r.rhs)),
            }))
        }
        TaskDecl::Pd { expect, .. } => {
            let q = built.backend.quiver().ok_or_else(|| CliError::Invalid("pd needs a quiver backend".into()))?;
            let alg = q.algebra();
            let nv = alg.num_vertices();
            let mut pds = Vec::new();
            for v in 0..nv {
                let mut dims = vec![0; nv];
                dims[v] = 1;
                let simple = Rep::from_i64(alg, dims, &vec![vec![]; alg.num_arrows()])?;
                pds.push(projective_resolution(alg, &simple)?.length());
            }
            if let Some(want) = expect {
                ck.check(&pds == want, || format!("expected {want:?}, got {pds:?}"));
            }
            let names: Vec<&str> = (0..nv).map(|v| alg.vertex_name(v)).collect();
            Ok(json!({ "vertices": names, "pd": pds, "display": format!("{pds:?}") }))
        }
    }
}

/// Runs every task of a built section in declaration order.
pub fn run_section(built: &Built, section: &Section, opts: &RunOptions) -> SectionReport {
    let tasks = section
        .tasks
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let name = t.display_name(i);
            let start = Instant::now();
            let mut ck = Checks::default();
            let (status, result, failures) = match run_task(built, t, opts, &mut ck) {
                Ok(v) => (ck.status(), v, ck.failures),
                Err(e) => {
                    let e = match e {
                        CliError::Engine(source) => CliError::Task { task: name.clone(), source },
                        other => other,
                    };
                    (Status::Error, json!({ "error": e.to_string() }), vec![e.to_string()])
                }
            };
            TaskReport {
                name,
                task: t.kind().into(),
                status,
                result,
                failures,
                timing_ms: start.elapsed().as_millis() as u64,
            }
        })
        .collect();
    SectionReport {
        name: built.name.clone(),
        provenance: built.provenance.clone(),
        morphisms: built.echo.clone(),
        tasks,
    }
}
