use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::angcat::{compose, zero_morphism, Backend, DirectSum, Morphism, NSeq, ObjRef, Tensor};
use crate::error::{Error, Result};
use crate::exactlin::Ring;
use crate::todabrackets::heller_is_n_angle;

use super::{
    cone, describe, lift_module_map, projective_resolution, ChainMap, HomData, ModuleMap, ProjComplex,
    QuiverAlgebra, Rep, Resolution,
};

/// One indecomposable summand of the cluster tilting module.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summand {
    pub name: String,
    pub module: Rep,
    pub resolution: Resolution,
}

/// The subcategory `add{M[(n-2)i]}` given by the summands of `M`.
#[derive(Debug, Clone)]
pub struct CTSubcat {
    pub n: usize,
    pub summands: Vec<Summand>,
}

impl CTSubcat {
    /// Resolves every summand and checks `Ext^i(M, M) = 0` for `1 <= i <= n-3`.
    pub fn new(alg: &QuiverAlgebra, n: usize, modules: Vec<(String, Rep)>) -> Result<CTSubcat> {
        if n < 3 {
            return Err(Error::Invalid("n must be at least 3".into()));
        }
        let summands = modules
            .into_iter()
            .map(|(name, module)| {
                let resolution = projective_resolution(alg, &module)?;
                Ok(Summand { name, module, resolution })
            })
            .collect::<Result<Vec<_>>>()?;
        let ring = alg.ring();
        for a in &summands {
            for b in &summands {
                for i in 1..=(n as i64 - 3) {
                    let h = HomData::new(alg, &a.resolution.complex, &b.resolution.complex.shift(ring, i));
                    if h.rank() != 0 {
                        return Err(Error::Invalid(format!(
                            "Ext^{i}({}, {}) is nonzero; not cluster tilting",
                            a.name, b.name
                        )));
                    }
                }
            }
        }
        Ok(CTSubcat { n, summands })
    }
}

#[derive(Default)]
struct Registry {
    complexes: Vec<ProjComplex>,
    names: Vec<String>,
    lookup: HashMap<ProjComplex, usize>,
    sums: HashMap<Vec<ObjRef>, ObjRef>,
    homs: HashMap<(usize, usize, i64), Arc<HomData>>,
    tensors: HashMap<(ObjRef, ObjRef, ObjRef), Arc<Tensor>>,
    extensions: HashMap<Morphism, NSeq>,
}

/// The n-angulated subcategory `𝒰` of the homotopy category of projective
/// complexes, with `Σ = [n-2]`.
///
/// Objects are registered complexes: ids `1..=k` are the summands of the
/// cluster tilting module, later ids are cones and direct sums created on
/// demand, and id `0` is the zero complex. An [`ObjRef`] of grade `g` stands
/// for the complex shifted by `(n-2)g`. `Hom(X[a], Y[b])` uses the pinned
/// basis of `Hom(X, Y[b-a])`, so suspension does not change coordinates.
pub struct QuiverBackend {
    alg: Arc<QuiverAlgebra>,
    ct: CTSubcat,
    reg: RwLock<Registry>,
}

impl QuiverBackend {
    pub fn new(alg: Arc<QuiverAlgebra>, ct: CTSubcat) -> QuiverBackend {
        let b = QuiverBackend { alg, ct, reg: RwLock::new(Registry::default()) };
        b.register(ProjComplex::zero(), "0");
        for s in &b.ct.summands {
            b.register_fresh(s.resolution.complex.clone(), &s.name);
        }
        b
    }

    pub fn algebra(&self) -> &QuiverAlgebra {
        &self.alg
    }

    pub fn subcat(&self) -> &CTSubcat {
        &self.ct
    }

    fn step(&self) -> i64 {
        self.ct.n as i64 - 2
    }

    /// The summand with the given name, in grade 0.
    pub fn summand(&self, name: &str) -> Result<ObjRef> {
        self.ct
            .summands
            .iter()
            .position(|s| s.name == name)
            .map(|i| ObjRef::new(i + 1, 0))
            .ok_or_else(|| Error::Invalid(format!("unknown object {name}")))
    }

    fn register_fresh(&self, c: ProjComplex, name: &str) -> ObjRef {
        let mut reg = self.reg.write();
        let id = reg.complexes.len();
        reg.complexes.push(c.clone());
        reg.names.push(name.to_string());
        reg.lookup.entry(c).or_insert(id);
        ObjRef::new(id, 0)
    }

    /// Registers a complex (reusing an equal one) and returns it in grade 0.
    pub fn register(&self, c: ProjComplex, name: &str) -> ObjRef {
        let c = c.normalized();
        if let Some(&id) = self.reg.read().lookup.get(&c) {
            return ObjRef::new(id, 0);
        }
        self.register_fresh(c, name)
    }

    /// The complex an object stands for, with its shift applied.
    pub fn complex(&self, x: ObjRef) -> Result<ProjComplex> {
        let reg = self.reg.read();
        let c = reg.complexes.get(x.id).ok_or_else(|| Error::Invalid(format!("unknown object {x}")))?;
        Ok(c.shift(self.alg.ring(), self.step() * x.grade))
    }

    fn hom_data(&self, x: ObjRef, y: ObjRef) -> Result<Arc<HomData>> {
        let t = self.step() * (y.grade - x.grade);
        let key = (x.id, y.id, t);
        if let Some(h) = self.reg.read().homs.get(&key) {
            return Ok(h.clone());
        }
        let cx = self.complex(ObjRef::new(x.id, 0))?;
        let cy = self.complex(ObjRef::new(y.id, 0))?.shift(self.alg.ring(), t);
        let h = Arc::new(HomData::new(&self.alg, &cx, &cy));
        self.reg.write().homs.insert(key, h.clone());
        Ok(h)
    }

    /// A chain map representing `f` between the shifted complexes.
    pub fn chain_map(&self, f: &Morphism) -> Result<ChainMap> {
        let h = self.hom_data(f.src, f.tgt)?;
        Ok(h.representative(&self.alg, &f.coords).shift(self.step() * f.src.grade))
    }

    /// The homotopy class of a chain map between the shifted complexes.
    pub fn morphism(&self, x: ObjRef, y: ObjRef, f: &ChainMap) -> Result<Morphism> {
        let cx = self.complex(x)?;
        let cy = self.complex(y)?;
        if !f.is_chain_map(&self.alg, &cx, &cy) {
            return Err(Error::NotChainMap(format!("{} -> {}", self.describe_object(x), self.describe_object(y))));
        }
        let h = self.hom_data(x, y)?;
        let coords = h.coords(&self.alg, &f.shift(-self.step() * x.grade))?;
        Ok(Morphism::new(x, y, self.ring(), coords))
    }

    /// Lifts a module map between two summands.
    pub fn module_morphism(&self, x: ObjRef, y: ObjRef, g: &ModuleMap) -> Result<Morphism> {
        let (sx, sy) = (self.summand_data(x)?, self.summand_data(y)?);
        g.check(&self.alg, &sx.module, &sy.module)?;
        let lifted = lift_module_map(&self.alg, g, &sx.resolution, (&sy.module, &sy.resolution))?;
        self.morphism(ObjRef::new(x.id, 0), ObjRef::new(y.id, 0), &lifted)
    }

    fn summand_data(&self, x: ObjRef) -> Result<&Summand> {
        if x.grade != 0 || x.id == 0 || x.id > self.ct.summands.len() {
            return Err(Error::Invalid(format!("{x} is not a summand in degree zero")));
        }
        Ok(&self.ct.summands[x.id - 1])
    }

    /// `(lo, hi)` with `Hom(C, D[m]) = 0` unless `lo <= m <= hi`.
    fn shift_range(c: &ProjComplex, d: &ProjComplex) -> Option<(i64, i64)> {
        let (clo, chi) = c.support()?;
        let (dlo, dhi) = d.support()?;
        Some((dlo - chi, dhi - clo))
    }

    /// A left approximation `C -> U` by the subcategory: every basis map into
    /// a shifted summand, stacked.
    pub fn left_approximation(&self, c: ObjRef) -> Result<Morphism> {
        let s = self.step();
        let cc = self.complex(c)?;
        let mut targets = Vec::new();
        let mut maps = Vec::new();
        for i in 1..=self.ct.summands.len() {
            let m = ObjRef::new(i, 0);
            let Some((lo, hi)) = Self::shift_range(&cc, &self.complex(m)?) else { continue };
            for k in lo.div_euclid(s)..=hi.div_euclid(s) + 1 {
                let t = m.suspend(k);
                let rank = self.hom_rank(c, t)?;
                for j in 0..rank {
                    let mut coords = vec![0; rank];
                    coords[j] = 1;
                    targets.push(t);
                    maps.push(Morphism::new(c, t, self.ring(), coords));
                }
            }
        }
        let sum = self.direct_sum(&targets)?;
        let mut beta = zero_morphism(self, c, sum.object)?;
        for (inj, e) in sum.injections.iter().zip(&maps) {
            beta = beta.add(&compose(self, inj, e)?)?;
        }
        Ok(beta)
    }

    fn build_extension(&self, f: &Morphism) -> Result<NSeq> {
        let alg = &*self.alg;
        let n = self.ct.n;
        let x1 = self.complex(f.src)?;
        let x2 = self.complex(f.tgt)?;
        let first = cone(alg, &self.chain_map(f)?, &x1, &x2)?;
        let mut c_prev = self.register(first.complex.clone(), "cone");
        let mut prev_inc = self.morphism(f.tgt, c_prev, &first.inc)?;
        // connecting maps C_t -> C_{t-1}[1], outermost first
        let mut conn: Vec<(ProjComplex, ChainMap)> = vec![(first.complex, first.proj)];
        let mut maps = vec![f.clone()];
        for _ in 3..n {
            let beta = self.left_approximation(c_prev)?;
            maps.push(compose(self, &beta, &prev_inc)?);
            let cb = self.complex(c_prev)?;
            let xt = self.complex(beta.tgt)?;
            let next = cone(alg, &self.chain_map(&beta)?, &cb, &xt)?;
            c_prev = self.register(next.complex.clone(), "cone");
            prev_inc = self.morphism(beta.tgt, c_prev, &next.inc)?;
            conn.push((next.complex, next.proj));
        }
        maps.push(prev_inc);
        // C_{n-1} -> C_{n-2}[1] -> ... -> X_1[n-2]
        let ring = alg.ring();
        let m = conn.len();
        let top = conn[m - 1].0.clone();
        let mut acc = conn[m - 1].1.clone();
        for (shift, i) in (0..m - 1).rev().enumerate() {
            let shift = shift as i64 + 1;
            let below = if i == 0 { &x1 } else { &conn[i - 1].0 };
            let mid = conn[i].0.shift(ring, shift);
            let tgt = below.shift(ring, shift + 1);
            acc = conn[i].1.shift(shift).compose(alg, &acc, &top, &mid, &tgt);
        }
        maps.push(self.morphism(c_prev, f.src.suspend(1), &acc)?);
        NSeq::new(self, maps)
    }
}

/// The staircase extension of `f`, certified by Heller's criterion.
pub fn extend_gko(b: &QuiverBackend, f: &Morphism) -> Result<NSeq> {
    let s = b.extend(f)?;
    let verdict = heller_is_n_angle(b, &s)?;
    if !verdict.is_yes() {
        return Err(Error::CertificationFailed(verdict.reason().into()));
    }
    Ok(s)
}

impl Backend for QuiverBackend {
    fn n(&self) -> usize {
        self.ct.n
    }

    fn ring(&self) -> Ring {
        self.alg.ring()
    }

    fn name(&self) -> &'static str {
        "quiver"
    }

    fn hom_rank(&self, x: ObjRef, y: ObjRef) -> Result<usize> {
        Ok(self.hom_data(x, y)?.rank())
    }

    fn hom_basis(&self, x: ObjRef, y: ObjRef) -> Result<Vec<String>> {
        Ok(self.hom_data(x, y)?.tags(&self.alg))
    }

    fn compose_tensor(&self, x: ObjRef, y: ObjRef, z: ObjRef) -> Result<Arc<Tensor>> {
        let key = (x, y, z);
        if let Some(t) = self.reg.read().tensors.get(&key) {
            return Ok(t.clone());
        }
        let (cx, cy, cz) = (self.complex(x)?, self.complex(y)?, self.complex(z)?);
        let (hxy, hyz, hxz) = (self.hom_data(x, y)?, self.hom_data(y, z)?, self.hom_data(x, z)?);
        let (right, left, out) = (hxy.rank(), hyz.rank(), hxz.rank());
        let s = self.step();
        let fs: Vec<ChainMap> = (0..right).map(|j| hxy.basis_map(&self.alg, j).shift(s * x.grade)).collect();
        let mut data = Vec::with_capacity(left * right * out);
        for k in 0..left {
            let g = hyz.basis_map(&self.alg, k).shift(s * y.grade);
            for f in &fs {
                let h = g.compose(&self.alg, f, &cx, &cy, &cz).shift(-s * x.grade);
                data.extend(hxz.coords(&self.alg, &h)?);
            }
        }
        let t = Arc::new(Tensor { left, right, out, data });
        self.reg.write().tensors.insert(key, t.clone());
        Ok(t)
    }

    fn suspend_coords(&self, _x: ObjRef, _y: ObjRef, _k: i64, coords: &[u64]) -> Result<Vec<u64>> {
        Ok(coords.to_vec())
    }

    fn identity_coords(&self, x: ObjRef) -> Result<Vec<u64>> {
        let c = self.complex(x)?;
        Ok(self.morphism(x, x, &ChainMap::identity(&self.alg, &c))?.coords)
    }

    fn extend(&self, f: &Morphism) -> Result<NSeq> {
        if let Some(s) = self.reg.read().extensions.get(f) {
            return Ok(s.clone());
        }
        let s = self.build_extension(f)?;
        self.reg.write().extensions.insert(f.clone(), s.clone());
        Ok(s)
    }

    fn generators(&self) -> Vec<ObjRef> {
        (1..=self.ct.summands.len()).map(|i| ObjRef::new(i, 0)).collect()
    }

    fn hom_window(&self, a: ObjRef, x: ObjRef) -> Result<(i64, i64)> {
        let s = self.step();
        let Some((lo, hi)) = Self::shift_range(&self.complex(a)?, &self.complex(x)?) else {
            return Ok((1, 0));
        };
        // Hom(a[s k], x) = Hom(a, x[-s k])
        Ok(((-hi).div_euclid(s), (-lo).div_euclid(s) + 1))
    }

    fn direct_sum(&self, objs: &[ObjRef]) -> Result<DirectSum> {
        let ring = self.ring();
        let live: Vec<usize> = (0..objs.len()).filter(|&i| !self.complex(objs[i]).map(|c| c.is_zero()).unwrap_or(true)).collect();
        if live.is_empty() {
            let z = self.zero_object();
            let injections = objs.iter().map(|&o| zero_morphism(self, o, z)).collect::<Result<_>>()?;
            let projections = objs.iter().map(|&o| zero_morphism(self, z, o)).collect::<Result<_>>()?;
            return Ok(DirectSum { object: z, injections, projections });
        }
        let base = live.iter().map(|&i| objs[i].grade).min().unwrap();
        let key: Vec<ObjRef> = live.iter().map(|&i| objs[i].suspend(-base)).collect();
        let cached = self.reg.read().sums.get(&key).copied();
        let object = if key.len() == 1 {
            key[0]
        } else if let Some(o) = cached {
            o
        } else {
            let parts = key.iter().map(|&o| self.complex(o)).collect::<Result<Vec<_>>>()?;
            let refs: Vec<&ProjComplex> = parts.iter().collect();
            let (sum, _, _) = ProjComplex::direct_sum(&self.alg, &refs);
            let name = key.iter().map(|&o| self.describe_object(o)).collect::<Vec<_>>().join(" ⊕ ");
            let o = self.register_fresh(sum.normalized(), &name);
            self.reg.write().sums.insert(key.clone(), o);
            o
        }
        .suspend(base);
        let parts = key.iter().map(|&o| self.complex(o.suspend(base))).collect::<Result<Vec<_>>>()?;
        let refs: Vec<&ProjComplex> = parts.iter().collect();
        let (_, inj, proj) = ProjComplex::direct_sum(&self.alg, &refs);
        let mut injections = Vec::with_capacity(objs.len());
        let mut projections = Vec::with_capacity(objs.len());
        for (i, &o) in objs.iter().enumerate() {
            match live.iter().position(|&l| l == i) {
                Some(pos) if key.len() > 1 => {
                    injections.push(self.morphism(o, object, &inj[pos])?);
                    projections.push(self.morphism(object, o, &proj[pos])?);
                }
                Some(_) => {
                    injections.push(Morphism::new(o, object, ring, self.identity_coords(o)?));
                    projections.push(Morphism::new(object, o, ring, self.identity_coords(o)?));
                }
                None => {
                    injections.push(zero_morphism(self, o, object)?);
                    projections.push(zero_morphism(self, object, o)?);
                }
            }
        }
        Ok(DirectSum { object, injections, projections })
    }

    fn zero_object(&self) -> ObjRef {
        ObjRef::new(0, 0)
    }

    fn obj_eq(&self, x: ObjRef, y: ObjRef) -> bool {
        x == y || (x.id == 0 && y.id == 0)
    }

    fn describe_object(&self, x: ObjRef) -> String {
        let reg = self.reg.read();
        let name = reg.names.get(x.id).cloned().unwrap_or_else(|| format!("#{}", x.id));
        match x.grade {
            0 => name,
            g => format!("Σ^{g}({name})"),
        }
    }
}

/// Description of a chain map for reports.
pub fn describe_chain_map(b: &QuiverBackend, f: &Morphism) -> Result<String> {
    Ok(describe(b.algebra(), &b.chain_map(f)?))
}
