//! Turns a scene section into a live backend with resolved names.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use ntoda::angcat::{compose, identity, suspend, zero_morphism, Backend, DirectSum, Morphism, NSeq, ObjRef};
use ntoda::exactlin::Ring;
use ntoda::freelocal::FreeLocal;
use ntoda::quiverhom::{
    Arrow, CTSubcat, ChainMap, LMat, ModuleMap, QuiverAlgebra, QuiverBackend, QuiverSpec, RelationTerm, Rep,
};

use crate::error::{invalid, CliError, Result};
use crate::scene::{BackendSpec, ModuleDecl, MorphismDecl, Scalar, Section};

pub enum AnyBackend {
    Free(FreeLocal),
    Quiver(QuiverBackend),
}

impl AnyBackend {
    pub fn as_dyn(&self) -> &dyn Backend {
        match self {
            AnyBackend::Free(b) => b,
            AnyBackend::Quiver(b) => b,
        }
    }

    pub fn quiver(&self) -> Option<&QuiverBackend> {
        match self {
            AnyBackend::Quiver(b) => Some(b),
            AnyBackend::Free(_) => None,
        }
    }
}

/// Where the numbers come from: the ring and the quiver parameter.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub backend: String,
    pub p: u64,
    pub modulus: u64,
    pub lambda: Option<i64>,
    pub n: usize,
}

/// How a morphism was entered and what it normalized to.
#[derive(Debug, Clone, Serialize)]
pub struct MorphismEcho {
    pub name: String,
    pub entered_as: String,
    pub src: String,
    pub tgt: String,
    pub coords: Vec<u64>,
}

pub struct Built {
    pub name: String,
    pub backend: AnyBackend,
    pub provenance: Provenance,
    pub lambda: Option<i64>,
    pub objects: BTreeMap<String, ObjRef>,
    pub sums: BTreeMap<String, DirectSum>,
    pub morphisms: BTreeMap<String, Morphism>,
    pub echo: Vec<MorphismEcho>,
    pub sequences: BTreeMap<String, NSeq>,
}

fn engine<T>(what: &str, r: ntoda::Result<T>) -> Result<T> {
    r.map_err(|e| CliError::Invalid(format!("{what}: {e}")))
}

/// Resolves `"lambda"`-style symbols against the quiver parameter.
pub fn scalar(ring: Ring, lambda: Option<i64>, s: &Scalar) -> Result<u64> {
    match s {
        Scalar::Int(x) => Ok(ring.reduce(*x)),
        Scalar::Sym(text) => symbol(ring, lambda, text),
    }
}

fn symbol(ring: Ring, lambda: Option<i64>, text: &str) -> Result<u64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(&t)),
    };
    let int = |s: &str| -> Result<i64> {
        if s.is_empty() {
            Ok(1)
        } else {
            s.parse::<i64>().map_err(|_| CliError::Invalid(format!("bad scalar {text:?}")))
        }
    };
    let lam = || -> Result<u64> {
        lambda.map(|l| ring.reduce(l)).ok_or_else(|| CliError::Invalid(format!("{text:?} needs a lambda")))
    };
    let value = if let Some(num) = body.strip_suffix("/lambda") {
        let inv = ring.inv(lam()?).ok_or_else(|| CliError::Invalid("lambda is not invertible".into()))?;
        ring.mul(ring.reduce(int(num)?), inv)
    } else if let Some(num) = body.strip_suffix("lambda") {
        ring.mul(ring.reduce(int(num.trim_end_matches('*'))?), lam()?)
    } else {
        ring.reduce(body.parse::<i64>().map_err(|_| CliError::Invalid(format!("bad scalar {text:?}")))?)
    };
    Ok(if neg { ring.neg(value) } else { value })
}

/// Parses an algebra element of `e_row Λ e_col` such as `"2a'a - b'b"`,
/// `"4"` (a multiple of the idempotent) or `"lambda*c'c"`.
pub fn element(alg: &QuiverAlgebra, lambda: Option<i64>, row: usize, col: usize, text: &str) -> Result<Vec<u64>> {
    let ring = alg.ring();
    let mut out = vec![0u64; alg.between_dim(row, col)];
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut terms: Vec<String> = Vec::new();
    for (i, ch) in compact.char_indices() {
        if (ch == '+' || ch == '-') && i > 0 && !compact[..i].ends_with('/') {
            terms.push(String::new());
        }
        if terms.is_empty() {
            terms.push(String::new());
        }
        terms.last_mut().unwrap().push(ch);
    }
    for term in terms {
        let (neg, body) = match term.strip_prefix('-') {
            Some(r) => (true, r.to_string()),
            None => (false, term.trim_start_matches('+').to_string()),
        };
        let (coef, path) = match body.split_once('*') {
            Some((c, p)) => (symbol(ring, lambda, c)?, p.to_string()),
            None => {
                let digits: String = body.chars().take_while(|c| c.is_ascii_digit()).collect();
                let rest = body[digits.len()..].to_string();
                let c = if digits.is_empty() { 1 } else { ring.reduce(digits.parse::<i64>().unwrap_or(0)) };
                (c, rest)
            }
        };
        let coef = if neg { ring.neg(coef) } else { coef };
        if coef == 0 {
            continue;
        }
        let value = if path.is_empty() {
            if row != col {
                return invalid(format!("scalar {term:?} between different vertices"));
            }
            alg.unit(row)
        } else {
            let (s, t, e) = engine("path", alg.parse_path(&path))?;
            if s != row || t != col {
                return invalid(format!(
                    "path {path:?} runs {} -> {}, expected {} -> {}",
                    alg.vertex_name(s),
                    alg.vertex_name(t),
                    alg.vertex_name(row),
                    alg.vertex_name(col)
                ));
            }
            e
        };
        for (o, v) in out.iter_mut().zip(value) {
            *o = ring.mul_add(*o, coef, v);
        }
    }
    Ok(out)
}

/// Longest path length plus one, for acyclic quivers.
fn acyclic_bound(vertices: &[String], arrows: &[Arrow]) -> Result<usize> {
    let idx = |name: &str| vertices.iter().position(|v| v == name);
    let mut longest = vec![0usize; vertices.len()];
    for _ in 0..=vertices.len() {
        let mut changed = false;
        for a in arrows {
            let (Some(s), Some(t)) = (idx(&a.src), idx(&a.tgt)) else {
                return invalid(format!("arrow {} has an unknown end", a.name));
            };
            if longest[t] < longest[s] + 1 {
                longest[t] = longest[s] + 1;
                changed = true;
            }
        }
        if !changed {
            return Ok(longest.into_iter().max().unwrap_or(0) + 1);
        }
    }
    invalid("the quiver has an oriented cycle; give path_bound explicitly")
}

fn module(alg: &QuiverAlgebra, lambda: Option<i64>, m: &ModuleDecl) -> Result<Rep> {
    let ring = alg.ring();
    let given = [m.projective.is_some(), m.simple.is_some(), m.rep.is_some()];
    if given.iter().filter(|&&x| x).count() != 1 {
        return invalid(format!("module {} needs exactly one of projective, simple, rep", m.name));
    }
    if let Some(v) = &m.projective {
        return Ok(Rep::projective(alg, engine("vertex", alg.vertex(v))?));
    }
    let nv = alg.num_vertices();
    let na = alg.num_arrows();
    if let Some(v) = &m.simple {
        let mut dims = vec![0; nv];
        dims[engine("vertex", alg.vertex(v))?] = 1;
        return engine(&m.name, Rep::from_i64(alg, dims, &vec![vec![]; na]));
    }
    let r = m.rep.as_ref().expect("one constructor is present");
    let mut dims = vec![0; nv];
    for (v, &d) in &r.dims {
        dims[engine("vertex", alg.vertex(v))?] = d;
    }
    let mut maps = vec![vec![]; na];
    for (name, rows) in &r.maps {
        let a = alg
            .spec()
            .arrows
            .iter()
            .position(|x| &x.name == name)
            .ok_or_else(|| CliError::Invalid(format!("unknown arrow {name}")))?;
        maps[a] = rows
            .iter()
            .map(|row| row.iter().map(|s| scalar(ring, lambda, s).map(|x| x as i64)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
    }
    engine(&m.name, Rep::from_i64(alg, dims, &maps))
}

fn make_backend(spec: &BackendSpec) -> Result<(AnyBackend, Provenance, Option<i64>)> {
    match spec {
        BackendSpec::FreeLocal { p } => {
            let fl = engine("free_local", FreeLocal::new(*p))?;
            let prov = Provenance { backend: "free_local".into(), p: *p, modulus: p * p, lambda: None, n: 4 };
            Ok((AnyBackend::Free(fl), prov, None))
        }
        BackendSpec::Quiver { vertices, arrows, relations, field_char, lambda, n, path_bound, cluster_tilting } => {
            let ring = engine("field", Ring::prime_field(*field_char))?;
            let arrows: Vec<Arrow> =
                arrows.iter().map(|a| Arrow { name: a.name.clone(), src: a.src.clone(), tgt: a.tgt.clone() }).collect();
            let relations = relations
                .iter()
                .map(|rel| {
                    rel.iter()
                        .map(|t| {
                            let c = scalar(ring, *lambda, &t.coeff)?;
                            Ok(RelationTerm { coeff: c as i64, path: t.path.clone() })
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let path_bound = match path_bound {
                Some(b) => *b,
                None => acyclic_bound(vertices, &arrows)?,
            };
            let qs = QuiverSpec { vertices: vertices.clone(), arrows, relations, p: *field_char, path_bound };
            let alg = Arc::new(engine("algebra", QuiverAlgebra::new(qs))?);
            let mods = cluster_tilting
                .iter()
                .map(|m| Ok((m.name.clone(), module(&alg, *lambda, m)?)))
                .collect::<Result<Vec<_>>>()?;
            let ct = engine("cluster tilting subcategory", CTSubcat::new(&alg, *n, mods))?;
            let b = QuiverBackend::new(alg, ct);
            let prov =
                Provenance { backend: "quiver".into(), p: *field_char, modulus: *field_char, lambda: *lambda, n: *n };
            Ok((AnyBackend::Quiver(b), prov, *lambda))
        }
    }
}

impl Built {
    pub fn b(&self) -> &dyn Backend {
        self.backend.as_dyn()
    }

    pub fn ring(&self) -> Ring {
        self.b().ring()
    }

    /// Resolves `NAME`, `NAME[k]` (k-fold suspension), `R`, `R^k` and `0`.
    pub fn object(&self, text: &str) -> Result<ObjRef> {
        let t = text.trim();
        if let Some(open) = t.strip_suffix(']').and_then(|s| s.rfind('[').map(|i| (i, s))) {
            let (i, s) = open;
            let k: i64 = s[i + 1..].trim().parse().map_err(|_| CliError::Invalid(format!("bad shift in {t:?}")))?;
            return Ok(self.object(&s[..i])?.suspend(k));
        }
        if t == "0" {
            return Ok(self.b().zero_object());
        }
        if let Some(&o) = self.objects.get(t) {
            return Ok(o);
        }
        match &self.backend {
            AnyBackend::Free(fl) => {
                if t == "R" {
                    return Ok(fl.obj(1));
                }
                if let Some(k) = t.strip_prefix("R^").and_then(|k| k.parse::<usize>().ok()) {
                    return Ok(fl.obj(k));
                }
            }
            AnyBackend::Quiver(q) => {
                if let Ok(o) = q.summand(t) {
                    return Ok(o);
                }
            }
        }
        invalid(format!("unknown object {t:?}"))
    }

    pub fn morphism(&self, name: &str) -> Result<&Morphism> {
        self.morphisms.get(name).ok_or_else(|| CliError::Invalid(format!("unknown morphism {name:?}")))
    }

    pub fn sequence(&self, name: &str) -> Result<&NSeq> {
        self.sequences.get(name).ok_or_else(|| CliError::Invalid(format!("unknown sequence {name:?}")))
    }

    pub fn chain(&self, names: &[String]) -> Result<Vec<Morphism>> {
        names.iter().map(|n| self.morphism(n).cloned()).collect()
    }

    pub fn describe(&self, x: ObjRef) -> String {
        self.b().describe_object(x)
    }

    pub fn build(section: &Section) -> Result<Built> {
        let (backend, provenance, lambda) = make_backend(&section.backend)?;
        let mut built = Built {
            name: section.name.clone(),
            backend,
            provenance,
            lambda,
            objects: BTreeMap::new(),
            sums: BTreeMap::new(),
            morphisms: BTreeMap::new(),
            echo: Vec::new(),
            sequences: BTreeMap::new(),
        };
        for o in &section.objects {
            let parts = o.sum.iter().map(|x| built.object(x)).collect::<Result<Vec<_>>>()?;
            let ds = engine(&o.name, built.b().direct_sum(&parts))?;
            built.objects.insert(o.name.clone(), ds.object);
            built.sums.insert(o.name.clone(), ds);
        }
        for m in &section.morphisms {
            if built.morphisms.contains_key(&m.name) {
                return invalid(format!("duplicate morphism {:?}", m.name));
            }
            let (f, how) = built.make_morphism(m)?;
            built.echo.push(MorphismEcho {
                name: m.name.clone(),
                entered_as: how.into(),
                src: built.describe(f.src),
                tgt: built.describe(f.tgt),
                coords: f.coords.clone(),
            });
            built.morphisms.insert(m.name.clone(), f);
        }
        for s in &section.sequences {
            let seq = match (&s.maps, &s.extension_of) {
                (Some(maps), None) => engine(&s.name, NSeq::new(built.b(), built.chain(maps)?))?,
                (None, Some(f)) => engine(&s.name, built.b().extend(built.morphism(f)?))?,
                _ => return invalid(format!("sequence {} needs exactly one of maps, extension_of", s.name)),
            };
            built.sequences.insert(s.name.clone(), seq);
        }
        Ok(built)
    }

    fn endpoints(&self, m: &MorphismDecl) -> Result<(ObjRef, ObjRef)> {
        match (&m.src, &m.tgt) {
            (Some(s), Some(t)) => Ok((self.object(s)?, self.object(t)?)),
            _ => invalid(format!("morphism {} needs src and tgt", m.name)),
        }
    }

    fn quiver_only(&self, m: &MorphismDecl) -> Result<&QuiverBackend> {
        self.backend.quiver().ok_or_else(|| CliError::Invalid(format!("morphism {} needs a quiver backend", m.name)))
    }

    fn make_morphism(&self, m: &MorphismDecl) -> Result<(Morphism, &'static str)> {
        let set = [
            m.coords.is_some(),
            m.matrix.is_some(),
            m.scalar.is_some(),
            m.path.is_some(),
            m.module_map.is_some(),
            m.chain_map.is_some(),
            m.compose.is_some(),
            m.combine.is_some(),
            m.neg.is_some(),
            m.suspend.is_some(),
            m.identity.is_some(),
            m.zero.is_some(),
            m.block.is_some(),
        ];
        if set.iter().filter(|&&x| x).count() != 1 {
            return invalid(format!("morphism {} needs exactly one constructor", m.name));
        }
        let b = self.b();
        let ring = self.ring();
        let ctx = |r: ntoda::Result<Morphism>| engine(&format!("morphism {}", m.name), r);
        if let Some(c) = &m.coords {
            let (x, y) = self.endpoints(m)?;
            let rank = engine("hom", b.hom_rank(x, y))?;
            if c.len() != rank {
                return invalid(format!("morphism {}: {} coordinates for a rank {rank} hom space", m.name, c.len()));
            }
            let v = c.iter().map(|s| scalar(ring, self.lambda, s)).collect::<Result<Vec<_>>>()?;
            return Ok((Morphism::new(x, y, ring, v), "coords"));
        }
        if m.matrix.is_some() || m.scalar.is_some() {
            let AnyBackend::Free(fl) = &self.backend else {
                return invalid(format!("morphism {}: matrices need the free local backend", m.name));
            };
            let rows: Vec<Vec<Scalar>> = match (&m.matrix, &m.scalar) {
                (Some(rows), _) => rows.clone(),
                (None, Some(s)) => vec![vec![s.clone()]],
                _ => unreachable!(),
            };
            let rows = rows
                .iter()
                .map(|r| r.iter().map(|s| scalar(ring, None, s).map(|x| x as i64)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let f = ctx(fl.morphism_i64(&rows))?;
            let (x, y) = match (&m.src, &m.tgt) {
                (Some(s), Some(t)) => (self.object(s)?, self.object(t)?),
                (None, None) => (f.src, f.tgt),
                _ => return invalid(format!("morphism {}: give both src and tgt or neither", m.name)),
            };
            if x.id != f.src.id || y.id != f.tgt.id {
                return invalid(format!("morphism {}: matrix shape does not match src/tgt", m.name));
            }
            return Ok((Morphism::new(x, y, ring, f.coords), "matrix"));
        }
        if let Some(text) = &m.path {
            let q = self.quiver_only(m)?;
            let (x, y) = self.endpoints(m)?;
            let cx = engine("complex", q.complex(x))?;
            let (lo, hi) = cx.support().ok_or_else(|| CliError::Invalid(format!("{}: zero source", m.name)))?;
            if lo != hi || cx.term(lo).len() != 1 {
                return invalid(format!("morphism {}: path maps need a stalk projective source", m.name));
            }
            let mut grid = BTreeMap::new();
            grid.insert(lo.to_string(), vec![vec![text.clone()]]);
            return Ok((self.chain_morphism(q, m, x, y, &grid)?, "path"));
        }
        if let Some(blocks) = &m.module_map {
            let q = self.quiver_only(m)?;
            let (x, y) = self.endpoints(m)?;
            let alg = q.algebra();
            let sub = q.subcat();
            let rep_of = |o: ObjRef| -> Result<&Rep> {
                if o.grade != 0 || o.id == 0 || o.id > sub.summands.len() {
                    return invalid(format!("morphism {}: module maps run between summands", m.name));
                }
                Ok(&sub.summands[o.id - 1].module)
            };
            let (sx, sy) = (rep_of(x)?, rep_of(y)?);
            let mut per_vertex = vec![vec![]; alg.num_vertices()];
            for (v, rows) in blocks {
                per_vertex[engine("vertex", alg.vertex(v))?] = rows
                    .iter()
                    .map(|r| r.iter().map(|s| scalar(ring, self.lambda, s).map(|x| x as i64)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
            }
            let g = engine(&m.name, ModuleMap::from_i64(alg, sx, sy, &per_vertex))?;
            return Ok((ctx(q.module_morphism(x, y, &g))?, "module_map"));
        }
        if let Some(grid) = &m.chain_map {
            let q = self.quiver_only(m)?;
            let (x, y) = self.endpoints(m)?;
            return Ok((self.chain_morphism(q, m, x, y, grid)?, "chain_map"));
        }
        if let Some(names) = &m.compose {
            let mut it = names.iter().rev();
            let first = it.next().ok_or_else(|| CliError::Invalid(format!("{}: empty composite", m.name)))?;
            let mut acc = self.morphism(first)?.clone();
            for g in it {
                acc = ctx(compose(b, self.morphism(g)?, &acc))?;
            }
            return Ok((acc, "compose"));
        }
        if let Some(terms) = &m.combine {
            let mut acc: Option<Morphism> = None;
            for (c, name) in terms {
                let t = self.morphism(name)?.scale(scalar(ring, self.lambda, c)?);
                acc = Some(match acc {
                    None => t,
                    Some(a) => ctx(a.add(&t))?,
                });
            }
            let acc = acc.ok_or_else(|| CliError::Invalid(format!("{}: empty combination", m.name)))?;
            return Ok((acc, "combine"));
        }
        if let Some(name) = &m.neg {
            return Ok((self.morphism(name)?.neg(), "neg"));
        }
        if let Some(name) = &m.suspend {
            return Ok((ctx(suspend(b, self.morphism(name)?, m.by.unwrap_or(1)))?, "suspend"));
        }
        if let Some(o) = &m.identity {
            return Ok((ctx(identity(b, self.object(o)?))?, "identity"));
        }
        if m.zero.is_some() {
            let (x, y) = self.endpoints(m)?;
            return Ok((ctx(zero_morphism(b, x, y))?, "zero"));
        }
        let grid = m.block.as_ref().expect("one constructor is present");
        let (Some(sn), Some(tn)) = (&m.src, &m.tgt) else {
            return invalid(format!("morphism {} needs src and tgt sums", m.name));
        };
        // a plain object is a sum with one summand
        let sum = |n: &str| -> Result<DirectSum> {
            if let Some(s) = self.sums.get(n) {
                return Ok(s.clone());
            }
            let x = self.object(n)?;
            let id = ctx(identity(b, x))?;
            Ok(DirectSum { object: x, injections: vec![id.clone()], projections: vec![id] })
        };
        let (s, t) = (sum(sn)?, sum(tn)?);
        if grid.len() != t.injections.len() || grid.iter().any(|r| r.len() != s.projections.len()) {
            return invalid(format!("morphism {}: block shape does not match the sums", m.name));
        }
        let mut acc = ctx(zero_morphism(b, s.object, t.object))?;
        for (r, row) in grid.iter().enumerate() {
            for (c, entry) in row.iter().enumerate() {
                if let Some(name) = entry {
                    let piece = compose(b, &t.injections[r], &compose(b, self.morphism(name)?, &s.projections[c])?);
                    acc = ctx(acc.add(&ctx(piece)?))?;
                }
            }
        }
        Ok((acc, "block"))
    }

    fn chain_morphism(
        &self,
        q: &QuiverBackend,
        m: &MorphismDecl,
        x: ObjRef,
        y: ObjRef,
        grid: &BTreeMap<String, Vec<Vec<String>>>,
    ) -> Result<Morphism> {
        let alg = q.algebra();
        let cx = engine("complex", q.complex(x))?;
        let cy = engine("complex", q.complex(y))?;
        let mut comps = BTreeMap::new();
        let mut degrees = BTreeSet::new();
        for (deg, rows) in grid {
            let k: i64 = deg.trim().parse().map_err(|_| CliError::Invalid(format!("bad degree {deg:?}")))?;
            if !degrees.insert(k) {
                return invalid(format!("morphism {}: degree {k} given twice", m.name));
            }
            let (r, c) = (cy.term(k), cx.term(k));
            if rows.len() != r.len() || rows.iter().any(|row| row.len() != c.len()) {
                return invalid(format!(
                    "morphism {}: degree {k} needs a {}x{} matrix of path expressions",
                    m.name,
                    r.len(),
                    c.len()
                ));
            }
            let entries = rows
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter().enumerate().map(|(j, text)| element(alg, self.lambda, r[i], c[j], text)).collect()
                })
                .collect::<Result<Vec<Vec<Vec<u64>>>>>()?;
            comps.insert(k, LMat { rows: r.to_vec(), cols: c.to_vec(), entries });
        }
        engine(&format!("morphism {}", m.name), q.morphism(x, y, &ChainMap { comps }))
    }
}
